#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "pdsolve/linops.hpp"
#include "pdsolve/prox.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// The structured problem min_x f(x) + g(Ax) and its saddle form
// min_x max_y f(x) + <Ax, y> - g*(y).  Either the prox of g or the prox of g*
// may be registered; the missing side is always bridged through Moreau's
// decomposition, so no conjugate formulas are ever required.  Everything is
// immutable after construction and shareable across concurrent solves.
class SaddleProblem {
public:
    SaddleProblem(LinearMap A, ProxFunction f, std::optional<ProxFunction> g,
                  std::optional<ProxFunction> g_star,
                  std::optional<ProxFunction> f_star = std::nullopt,
                  std::function<double(const Vec&)> objective = nullptr)
        : A_(std::move(A)),
          f_(std::move(f)),
          g_(std::move(g)),
          g_star_(std::move(g_star)),
          f_star_(std::move(f_star)),
          objective_(std::move(objective)) {
        check_dim("SaddleProblem: f", A_.in_dim(), f_.dim());
        if (!g_ && !g_star_)
            throw std::invalid_argument("SaddleProblem: need the prox of g or of g*");
        if (g_) check_dim("SaddleProblem: g", A_.out_dim(), g_->dim());
        if (g_star_) check_dim("SaddleProblem: g*", A_.out_dim(), g_star_->dim());
        if (f_star_) check_dim("SaddleProblem: f*", A_.in_dim(), f_star_->dim());
    }

    const LinearMap& A() const { return A_; }
    const ProxFunction& f() const { return f_; }
    const std::optional<ProxFunction>& g() const { return g_; }
    const std::optional<ProxFunction>& g_star() const { return g_star_; }
    std::size_t primal_dim() const { return A_.in_dim(); }
    std::size_t dual_dim() const { return A_.out_dim(); }

    Vec prox_f(double gamma, const Vec& z) const { return f_.prox(gamma, z); }

    Vec prox_f_star(double t, const Vec& z) const {
        if (f_star_) return f_star_->prox(t, z);
        return prox_conjugate_via_moreau(f_, t, z);
    }

    Vec prox_g(double gamma, const Vec& z) const {
        if (g_) return g_->prox(gamma, z);
        return prox_conjugate_via_moreau(*g_star_, gamma, z);
    }

    Vec prox_g_star(double t, const Vec& z) const {
        if (g_star_) return g_star_->prox(t, z);
        return prox_conjugate_via_moreau(*g_, t, z);
    }

    // Optional reporting hook: the objective value at a primal point (the TV
    // value in the imaging experiments).  NaN when not registered.
    double objective(const Vec& x) const {
        if (objective_) return objective_(x);
        if (g_) return f_.value(x) + g_->value(A_.apply(x));
        return std::numeric_limits<double>::quiet_NaN();
    }

    bool has_objective() const { return static_cast<bool>(objective_) || g_.has_value(); }

private:
    LinearMap A_;
    ProxFunction f_;
    std::optional<ProxFunction> g_;
    std::optional<ProxFunction> g_star_;
    std::optional<ProxFunction> f_star_;
    std::function<double(const Vec&)> objective_;
};

inline SaddleProblem problem_with_g(LinearMap A, ProxFunction f, ProxFunction g) {
    return SaddleProblem(std::move(A), std::move(f), std::move(g), std::nullopt);
}

inline SaddleProblem problem_with_g_star(LinearMap A, ProxFunction f, ProxFunction g_star) {
    return SaddleProblem(std::move(A), std::move(f), std::nullopt, std::move(g_star));
}

}  // namespace pdsolve
