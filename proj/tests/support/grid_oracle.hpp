#pragma once

// Brute-force proximity oracle: exhaustive grid minimization of
// h(z) + ||z - x||^2 / (2 gamma) over the box x +- half_width with the given
// step, for dimensions 1 and 2.  Deliberately knows nothing about closed-form
// prox maps.

#include <functional>
#include <stdexcept>

#include "pdsolve/vec.hpp"

namespace testutil {

inline pdsolve::Vec grid_prox_oracle(const std::function<double(const pdsolve::Vec&)>& h,
                                     double gamma, const pdsolve::Vec& x,
                                     double half_width = 5.0, double step = 1e-3) {
    const auto steps = static_cast<long>(2.0 * half_width / step) + 1;
    const double inv2g = 1.0 / (2.0 * gamma);
    if (x.size() == 1) {
        pdsolve::Vec best{0.0}, z{0.0};
        double best_val = std::numeric_limits<double>::infinity();
        for (long i = 0; i < steps; ++i) {
            z[0] = x[0] - half_width + step * static_cast<double>(i);
            const double d = z[0] - x[0];
            const double val = h(z) + inv2g * d * d;
            if (val < best_val) {
                best_val = val;
                best = z;
            }
        }
        return best;
    }
    if (x.size() == 2) {
        pdsolve::Vec best{0.0, 0.0}, z{0.0, 0.0};
        double best_val = std::numeric_limits<double>::infinity();
        for (long i = 0; i < steps; ++i) {
            z[0] = x[0] - half_width + step * static_cast<double>(i);
            const double d0 = z[0] - x[0];
            for (long j = 0; j < steps; ++j) {
                z[1] = x[1] - half_width + step * static_cast<double>(j);
                const double d1 = z[1] - x[1];
                const double val = h(z) + inv2g * (d0 * d0 + d1 * d1);
                if (val < best_val) {
                    best_val = val;
                    best = z;
                }
            }
        }
        return best;
    }
    throw std::invalid_argument("grid_prox_oracle: only dimensions 1 and 2 are supported");
}

}  // namespace testutil
