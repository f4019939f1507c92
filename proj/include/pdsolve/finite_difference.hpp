#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>

#include "pdsolve/linops.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// First-order forward finite differences of an n-by-n image with periodic
// boundary conditions.  Images are column-stacked in left-upper to right-lower
// order: pixel (r, c) lives at index c*n + r.  The forward map returns the
// horizontal differences (next column) stacked over the vertical ones (next
// row), so the output has 2 n^2 entries.  Under periodic boundaries
// rho(A^T A) = 8 exactly for even n, and 8 remains a valid upper bound for odd
// n, so the map always advertises 8.
class FiniteDifferenceMap {
public:
    explicit FiniteDifferenceMap(std::size_t n) : n_(n) {
        if (n < 2) throw std::invalid_argument("FiniteDifferenceMap: image side must be >= 2");
    }

    std::size_t side() const { return n_; }
    std::size_t pixel_count() const { return n_ * n_; }
    std::size_t in_dim() const { return n_ * n_; }
    std::size_t out_dim() const { return 2 * n_ * n_; }

    static constexpr double norm_bound() { return 8.0; }

    Vec forward(const Vec& x) const {
        check_dim("FiniteDifferenceMap::forward", in_dim(), x.size());
        const std::size_t n = n_, n2 = n * n;
        Vec out(2 * n2);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cn = c * n;
            const std::size_t cn_right = ((c + 1 == n) ? 0 : c + 1) * n;
            for (std::size_t r = 0; r < n; ++r) {
                const std::size_t i = cn + r;
                const std::size_t r_down = (r + 1 == n) ? 0 : r + 1;
                out[i] = x[cn_right + r] - x[i];     // horizontal: next column
                out[n2 + i] = x[cn + r_down] - x[i]; // vertical: next row
            }
        }
        return out;
    }

    Vec adjoint(const Vec& d) const {
        check_dim("FiniteDifferenceMap::adjoint", out_dim(), d.size());
        const std::size_t n = n_, n2 = n * n;
        Vec out(n2, 0.0);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cn = c * n;
            const std::size_t cn_left = ((c == 0) ? n - 1 : c - 1) * n;
            for (std::size_t r = 0; r < n; ++r) {
                const std::size_t i = cn + r;
                const std::size_t r_up = (r == 0) ? n - 1 : r - 1;
                out[i] += d[cn_left + r] - d[i];           // horizontal channel
                out[i] += d[n2 + cn + r_up] - d[n2 + i];   // vertical channel
            }
        }
        return out;
    }

    LinearMap map() const {
        auto self = std::make_shared<const FiniteDifferenceMap>(*this);
        return LinearMap(
            in_dim(), out_dim(), [self](const Vec& x) { return self->forward(x); },
            [self](const Vec& d) { return self->adjoint(d); }, norm_bound());
    }

private:
    std::size_t n_;
};

}  // namespace pdsolve
