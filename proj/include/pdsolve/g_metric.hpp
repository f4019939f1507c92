#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "pdsolve/linops.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// Weighting matrix of the proximal-point view of the primal-dual schemes,
//
//     G = [ I/tau    s A^T ]        s = +1 for the y-ybar-x family,
//         [ s A      I/sigma ]      s = -1 for the xbar-x-y family.
//
// G is symmetric positive definite iff tau sigma rho(A^T A) < 1, which is
// checked at construction against the map's resolved norm bound.  All
// evaluations are matrix-free.
enum class GSign : int { plus = +1, minus = -1 };

class GMetric {
public:
    GMetric(GSign sign, double tau, double sigma, LinearMap map,
            std::optional<double> norm_bound_override = std::nullopt)
        : sign_(static_cast<int>(sign)), tau_(tau), sigma_(sigma), map_(std::move(map)) {
        if (!(tau_ > 0.0) || !(sigma_ > 0.0))
            throw std::invalid_argument("GMetric: step sizes must be positive");
        const double bound = norm_bound_override ? *norm_bound_override : resolved_norm_bound(map_);
        if (!(tau_ * sigma_ * bound < 1.0))
            throw std::invalid_argument(
                "GMetric: step sizes violate tau*sigma*rho(A^T A) < 1 (tau*sigma*rho = " +
                std::to_string(tau_ * sigma_ * bound) + ")");
    }

    double tau() const { return tau_; }
    double sigma() const { return sigma_; }
    int sign() const { return sign_; }
    const LinearMap& map() const { return map_; }

    // ||w||_G^2 = ||x||^2/tau + ||y||^2/sigma + 2 s <Ax, y>
    double norm_sq(const Vec& x, const Vec& y) const {
        check_dim("GMetric::norm_sq x", map_.in_dim(), x.size());
        check_dim("GMetric::norm_sq y", map_.out_dim(), y.size());
        return norm_sq_impl(x, y, map_.apply(x));
    }

    // G (dx, dy) = (dx/tau + s A^T dy, s A dx + dy/sigma)
    std::pair<Vec, Vec> apply(const Vec& dx, const Vec& dy) const {
        check_dim("GMetric::apply dx", map_.in_dim(), dx.size());
        check_dim("GMetric::apply dy", map_.out_dim(), dy.size());
        const double s = static_cast<double>(sign_);
        Vec gx = combine(1.0 / tau_, dx, s, map_.adjoint_apply(dy));
        Vec gy = combine(s, map_.apply(dx), 1.0 / sigma_, dy);
        return {std::move(gx), std::move(gy)};
    }

    // ||G (w_new - anchor)||, the optimality residue logged by the experiments
    double residual(const Vec& x_new, const Vec& y_new, const Vec& anchor_x,
                    const Vec& anchor_y) const {
        const auto [gx, gy] = apply(sub(x_new, anchor_x), sub(y_new, anchor_y));
        return norm_pair(gx, gy);
    }

    // ||w_new - anchor||_G^2, the quantity appearing in the rate results
    double step_norm_sq(const Vec& x_new, const Vec& y_new, const Vec& anchor_x,
                        const Vec& anchor_y) const {
        return norm_sq(sub(x_new, anchor_x), sub(y_new, anchor_y));
    }

private:
    double norm_sq_impl(const Vec& x, const Vec& y, const Vec& ax) const {
        return pdsolve::norm_sq(x) / tau_ + pdsolve::norm_sq(y) / sigma_ +
               2.0 * static_cast<double>(sign_) * dot(ax, y);
    }

    int sign_;
    double tau_;
    double sigma_;
    LinearMap map_;
};

}  // namespace pdsolve
