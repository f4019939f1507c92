#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "pdsolve/vec.hpp"

namespace pdsolve {

// A closed proper convex function h given by its value (possibly +inf) and its
// proximity operator prox_gamma(z) = argmin_w h(w) + ||w - z||^2 / (2 gamma).
// Instances are immutable; prox is a pure function of (gamma, z).
class ProxFunction {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using ProxFn = std::function<Vec(double, const Vec&)>;

    ProxFunction(std::size_t dim, ValueFn value, ProxFn prox)
        : dim_(dim), value_(std::move(value)), prox_(std::move(prox)) {
        if (dim_ == 0) throw std::invalid_argument("ProxFunction: dimension must be positive");
        if (!value_ || !prox_) throw std::invalid_argument("ProxFunction: missing value/prox");
    }

    std::size_t dim() const { return dim_; }

    double value(const Vec& z) const {
        check_dim("ProxFunction::value", dim_, z.size());
        return value_(z);
    }

    Vec prox(double gamma, const Vec& z) const {
        if (!(gamma > 0.0))
            throw std::invalid_argument("ProxFunction::prox: parameter must be positive, got " +
                                        std::to_string(gamma));
        check_dim("ProxFunction::prox", dim_, z.size());
        Vec out = prox_(gamma, z);
        check_dim("ProxFunction::prox output", dim_, out.size());
        return out;
    }

private:
    std::size_t dim_;
    ValueFn value_;
    ProxFn prox_;
};

// prox of the conjugate through Moreau's decomposition
//   z = prox_t^h(z) + t prox_{1/t}^{h*}(z / t),
// i.e. prox_t^{h*}(z) = z - t prox_{1/t}^h(z / t).  No conjugate formula is
// required.
inline Vec prox_conjugate_via_moreau(const ProxFunction& h, double t, const Vec& z) {
    if (!(t > 0.0))
        throw std::invalid_argument("prox_conjugate_via_moreau: parameter must be positive, got " +
                                    std::to_string(t));
    const Vec inner = h.prox(1.0 / t, scaled(z, 1.0 / t));
    return combine(1.0, z, -t, inner);
}

inline ProxFunction zero_function(std::size_t dim) {
    return ProxFunction(
        dim, [](const Vec&) { return 0.0; }, [](double, const Vec& z) { return z; });
}

// Indicator of the single point p; its prox is the constant map z -> p.
inline ProxFunction point_indicator(Vec point) {
    auto p = std::make_shared<const Vec>(std::move(point));
    return ProxFunction(
        p->size(),
        [p](const Vec& z) {
            for (std::size_t i = 0; i < z.size(); ++i)
                if (std::abs(z[i] - (*p)[i]) > 1e-10) return std::numeric_limits<double>::infinity();
            return 0.0;
        },
        [p](double, const Vec&) { return *p; });
}

// h(x) = 1/2 sum_i w_i (x_i - c_i)^2 with w_i >= 0;
// prox_gamma(z)_i = (z_i + gamma w_i c_i) / (1 + gamma w_i).
inline ProxFunction diagonal_quadratic(Vec weights, Vec center) {
    if (weights.size() != center.size())
        throw std::invalid_argument("diagonal_quadratic: weights/center size mismatch");
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("diagonal_quadratic: weights must be nonnegative");
    auto w = std::make_shared<const Vec>(std::move(weights));
    auto c = std::make_shared<const Vec>(std::move(center));
    return ProxFunction(
        w->size(),
        [w, c](const Vec& z) {
            double s = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double d = z[i] - (*c)[i];
                s += 0.5 * (*w)[i] * d * d;
            }
            return s;
        },
        [w, c](double gamma, const Vec& z) {
            Vec out(z.size());
            for (std::size_t i = 0; i < z.size(); ++i)
                out[i] = (z[i] + gamma * (*w)[i] * (*c)[i]) / (1.0 + gamma * (*w)[i]);
            return out;
        });
}

// h(x) = a/2 ||x||^2
inline ProxFunction scaled_sq_norm(std::size_t dim, double a = 1.0) {
    return diagonal_quadratic(Vec(dim, a), Vec(dim, 0.0));
}

namespace detail {

// Shrink one 2-vector (a, b) by eta; the 0/0 convention maps the zero pair to
// zero, never to NaN.
inline std::pair<double, double> shrink_pair(double eta, double a, double b) {
    const double nrm = std::hypot(a, b);
    if (nrm <= eta || nrm == 0.0) return {0.0, 0.0};
    const double scale = (nrm - eta) / nrm;
    return {scale * a, scale * b};
}

}  // namespace detail

// g(u) = sum_{i<n_groups} ||(u_i, u_{n_groups+i})|| over the two stacked
// channels of u; its prox shrinks each pair toward zero (group soft
// thresholding).
class GroupSoftThreshold {
public:
    explicit GroupSoftThreshold(std::size_t n_groups) : n_groups_(n_groups) {
        if (n_groups == 0) throw std::invalid_argument("GroupSoftThreshold: need at least one group");
    }

    std::size_t n_groups() const { return n_groups_; }
    std::size_t dim() const { return 2 * n_groups_; }

    double value(const Vec& u) const {
        check_dim("GroupSoftThreshold::value", dim(), u.size());
        double s = 0.0;
        for (std::size_t i = 0; i < n_groups_; ++i) s += std::hypot(u[i], u[n_groups_ + i]);
        return s;
    }

    Vec apply(double eta, const Vec& u) const {
        if (!(eta > 0.0))
            throw std::invalid_argument("GroupSoftThreshold::apply: parameter must be positive");
        check_dim("GroupSoftThreshold::apply", dim(), u.size());
        Vec out(u.size());
        for (std::size_t i = 0; i < n_groups_; ++i) {
            const auto [a, b] = detail::shrink_pair(eta, u[i], u[n_groups_ + i]);
            out[i] = a;
            out[n_groups_ + i] = b;
        }
        return out;
    }

    ProxFunction as_prox() const {
        const GroupSoftThreshold self = *this;
        return ProxFunction(
            dim(), [self](const Vec& u) { return self.value(u); },
            [self](double eta, const Vec& u) { return self.apply(eta, u); });
    }

private:
    std::size_t n_groups_;
};

inline ProxFunction group_l2_norm(std::size_t n_groups) {
    return GroupSoftThreshold(n_groups).as_prox();
}

// Conjugate of the group norm: the indicator of the product of per-pair unit
// balls.  Its prox is the per-pair projection, independent of the parameter.
inline ProxFunction group_l2_ball_indicator(std::size_t n_groups) {
    if (n_groups == 0) throw std::invalid_argument("group_l2_ball_indicator: need at least one group");
    return ProxFunction(
        2 * n_groups,
        [n_groups](const Vec& y) {
            for (std::size_t i = 0; i < n_groups; ++i)
                if (std::hypot(y[i], y[n_groups + i]) > 1.0 + 1e-10)
                    return std::numeric_limits<double>::infinity();
            return 0.0;
        },
        [n_groups](double, const Vec& y) {
            Vec out(y.size());
            for (std::size_t i = 0; i < n_groups; ++i) {
                const double nrm = std::hypot(y[i], y[n_groups + i]);
                const double scale = nrm > 1.0 ? 1.0 / nrm : 1.0;
                out[i] = scale * y[i];
                out[n_groups + i] = scale * y[n_groups + i];
            }
            return out;
        });
}

}  // namespace pdsolve
