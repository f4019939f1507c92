#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdsolve/rng.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// Matrix-free linear operator: a forward/adjoint pair with fixed dimensions and
// an optional upper bound on rho(A^T A).  Immutable after construction; apply
// and adjoint_apply keep no interior state, so a map can be shared across
// concurrent solves.
class LinearMap {
public:
    using ApplyFn = std::function<Vec(const Vec&)>;

    LinearMap(std::size_t in_dim, std::size_t out_dim, ApplyFn forward, ApplyFn adjoint,
              std::optional<double> norm_bound = std::nullopt)
        : in_dim_(in_dim),
          out_dim_(out_dim),
          forward_(std::move(forward)),
          adjoint_(std::move(adjoint)),
          norm_bound_(norm_bound) {
        if (in_dim_ == 0 || out_dim_ == 0)
            throw std::invalid_argument("LinearMap: dimensions must be positive");
        if (!forward_ || !adjoint_) throw std::invalid_argument("LinearMap: missing forward/adjoint");
        if (norm_bound_ && *norm_bound_ < 0.0)
            throw std::invalid_argument("LinearMap: norm bound must be nonnegative");
    }

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }
    const std::optional<double>& norm_bound() const { return norm_bound_; }

    Vec apply(const Vec& u) const {
        check_dim("LinearMap::apply input", in_dim_, u.size());
        Vec out = forward_(u);
        check_dim("LinearMap::apply output", out_dim_, out.size());
        return out;
    }

    Vec adjoint_apply(const Vec& v) const {
        check_dim("LinearMap::adjoint_apply input", out_dim_, v.size());
        Vec out = adjoint_(v);
        check_dim("LinearMap::adjoint_apply output", in_dim_, out.size());
        return out;
    }

    LinearMap with_norm_bound(double bound) const {
        return LinearMap(in_dim_, out_dim_, forward_, adjoint_, bound);
    }

private:
    std::size_t in_dim_;
    std::size_t out_dim_;
    ApplyFn forward_;
    ApplyFn adjoint_;
    std::optional<double> norm_bound_;
};

// Dense row-major matrix as a LinearMap.  Intended for tests and small
// problems; the solvers never require materialized matrices.
inline LinearMap dense_map(std::size_t rows, std::size_t cols, std::vector<double> entries,
                           std::optional<double> norm_bound = std::nullopt) {
    if (entries.size() != rows * cols)
        throw std::invalid_argument("dense_map: entry count does not match rows*cols");
    auto data = std::make_shared<const std::vector<double>>(std::move(entries));
    auto forward = [data, rows, cols](const Vec& u) {
        Vec out(rows, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            const double* row = data->data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) s += row[c] * u[c];
            out[r] = s;
        }
        return out;
    };
    auto adjoint = [data, rows, cols](const Vec& v) {
        Vec out(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = data->data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * v[r];
        }
        return out;
    };
    return LinearMap(cols, rows, std::move(forward), std::move(adjoint), norm_bound);
}

inline LinearMap identity_map(std::size_t dim) {
    auto pass = [](const Vec& u) { return u; };
    return LinearMap(dim, dim, pass, pass, 1.0);
}

// Power iteration on A^T A from a seeded random start.  Returns the Rayleigh
// quotient ||A v||^2 of the final unit iterate, which is nondecreasing in the
// iteration count and approaches rho(A^T A) from below.  Known analytic bounds
// on concrete operators take precedence over this estimate.
inline double estimate_spectral_bound(const LinearMap& map, std::size_t iters, std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("estimate_spectral_bound: iters must be >= 1");
    SeededRng rng(seed);
    Vec v = rng.normal_vector(map.in_dim());
    double vn = norm(v);
    for (int attempt = 0; vn == 0.0 && attempt < 64; ++attempt) {
        v = rng.normal_vector(map.in_dim());
        vn = norm(v);
    }
    if (vn == 0.0) throw std::runtime_error("estimate_spectral_bound: could not draw a nonzero start");
    for (auto& c : v) c /= vn;

    double estimate = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        Vec w = map.apply(v);
        estimate = norm_sq(w);  // = v^T (A^T A) v for unit v
        Vec next = map.adjoint_apply(w);
        const double nn = norm(next);
        if (nn == 0.0) return estimate;  // v is in the nullspace of A^T A
        for (auto& c : next) c /= nn;
        v = std::move(next);
    }
    return estimate;
}

// The bound Assumption-style checks should use: the stored analytic bound when
// present, otherwise the default 200-iteration power estimate.
inline double resolved_norm_bound(const LinearMap& map) {
    if (map.norm_bound()) return *map.norm_bound();
    return estimate_spectral_bound(map, 200, 0x5eed5eed5eed5eedULL);
}

}  // namespace pdsolve
