#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "pdsolve/linops.hpp"
#include "pdsolve/prox.hpp"
#include "pdsolve/rng.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// Orthogonal projection onto {x : B x = b} for a row-orthonormal operator,
// prox of the indicator of that affine set:
//
//     proj(x) = x + B*(b - B x),    valid because B B* = I.
//
// The proximity parameter is irrelevant for an indicator and is ignored.
// Row-orthonormality is validated at construction with q seeded random probes
// (tolerance 1e-10) instead of a dense check.
class AffineProjection {
public:
    AffineProjection(LinearMap map, Vec data, std::uint64_t probe_seed = 0x0badc0deULL)
        : map_(std::move(map)), data_(std::move(data)) {
        check_dim("AffineProjection: data", map_.out_dim(), data_.size());
        SeededRng rng(probe_seed);
        const std::size_t q = map_.out_dim();
        for (std::size_t probe = 0; probe < q; ++probe) {
            Vec v = rng.normal_vector(q);
            const Vec round_trip = map_.apply(map_.adjoint_apply(v));
            const double gap = norm_inf(sub(round_trip, v));
            if (!(gap <= 1e-10 * (1.0 + norm_inf(v))))
                throw std::invalid_argument(
                    "AffineProjection: operator rows are not orthonormal (B B* != I), probe gap " +
                    std::to_string(gap));
        }
    }

    const LinearMap& map() const { return map_; }
    const Vec& data() const { return data_; }
    std::size_t dim() const { return map_.in_dim(); }

    Vec project(const Vec& x) const {
        check_dim("AffineProjection::project", dim(), x.size());
        const Vec residual = sub(data_, map_.apply(x));
        return add(x, map_.adjoint_apply(residual));
    }

    double constraint_residual_inf(const Vec& x) const {
        return norm_inf(sub(map_.apply(x), data_));
    }

    ProxFunction as_prox() const {
        auto self = std::make_shared<const AffineProjection>(*this);
        return ProxFunction(
            dim(),
            [self](const Vec& x) {
                return self->constraint_residual_inf(x) <= 1e-8
                           ? 0.0
                           : std::numeric_limits<double>::infinity();
            },
            [self](double, const Vec& x) { return self->project(x); });
    }

private:
    LinearMap map_;
    Vec data_;
};

}  // namespace pdsolve
