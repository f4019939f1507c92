#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdsolve/g_metric.hpp"
#include "pdsolve/problem.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// The ten iteration schemes: the four orderings of the Chambolle-Pock scheme,
// their two inertial versions, and the four linearized-ADM forms they are
// equivalent to (applied to the dual problem, LADMD, or the primal problem,
// LADMP).
enum class Variant {
    cp_yxx,     // dual first, primal, extrapolate the primal
    cp_xxy,     // primal, extrapolate, dual
    cp_xyy,     // primal first, dual, extrapolate the dual
    cp_yyx,     // dual, extrapolate, primal
    icp_yyx,    // inertial cp_yyx
    icp_xxy,    // inertial cp_xxy
    ladmd_yvx,  // linearized ADM on the dual, order y, v, x; needs v0
    ladmd_vxy,  // order v, x, y; no auxiliary start needed
    ladmp_xuy,  // linearized ADM on the primal, order x, u, y; needs u0
    ladmp_uyx,  // order u, y, x; no auxiliary start needed
};

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::cp_yxx: return "cp-yxx";
        case Variant::cp_xxy: return "cp-xxy";
        case Variant::cp_xyy: return "cp-xyy";
        case Variant::cp_yyx: return "cp-yyx";
        case Variant::icp_yyx: return "icp-yyx";
        case Variant::icp_xxy: return "icp-xxy";
        case Variant::ladmd_yvx: return "ladmd-yvx";
        case Variant::ladmd_vxy: return "ladmd-vxy";
        case Variant::ladmp_xuy: return "ladmp-xuy";
        case Variant::ladmp_uyx: return "ladmp-uyx";
    }
    return "unknown";
}

inline std::optional<Variant> parse_variant(std::string_view name) {
    for (Variant v :
         {Variant::cp_yxx, Variant::cp_xxy, Variant::cp_xyy, Variant::cp_yyx, Variant::icp_yyx,
          Variant::icp_xxy, Variant::ladmd_yvx, Variant::ladmd_vxy, Variant::ladmp_xuy,
          Variant::ladmp_uyx}) {
        if (name == variant_name(v)) return v;
    }
    return std::nullopt;
}

inline bool is_inertial(Variant v) { return v == Variant::icp_yyx || v == Variant::icp_xxy; }

inline bool needs_aux_v(Variant v) { return v == Variant::ladmd_yvx; }
inline bool needs_aux_u(Variant v) { return v == Variant::ladmp_xuy; }

// Sign of the weighting matrix G associated with each scheme: +1 for the
// y-ybar-x family (and everything sequence-equivalent to it), -1 for the
// xbar-x-y family.
inline GSign variant_g_sign(Variant v) {
    switch (v) {
        case Variant::cp_yyx:
        case Variant::icp_yyx:
        case Variant::cp_xyy:
        case Variant::ladmp_xuy:
        case Variant::ladmp_uyx: return GSign::plus;
        case Variant::cp_yxx:
        case Variant::cp_xxy:
        case Variant::icp_xxy:
        case Variant::ladmd_yvx:
        case Variant::ladmd_vxy: return GSign::minus;
    }
    return GSign::plus;
}

// Extrapolation schedule alpha_k: either constant or an explicit nondecreasing
// table whose last entry persists.  The convergence theory requires
// 0 <= alpha_k <= alpha_{k+1} <= alpha < 1/3; construction enforces it unless
// the caller explicitly opts out (the alpha sweep probes 0.35, above the
// proven range).
class AlphaSchedule {
public:
    static AlphaSchedule constant(double alpha, bool enforce_bound = true) {
        return AlphaSchedule({alpha}, enforce_bound);
    }

    static AlphaSchedule table(std::vector<double> values, bool enforce_bound = true) {
        return AlphaSchedule(std::move(values), enforce_bound);
    }

    double at(std::size_t k) const {
        return k < values_.size() ? values_[k] : values_.back();
    }

    double sup() const { return values_.back(); }
    bool is_constant() const { return values_.size() == 1; }

private:
    AlphaSchedule(std::vector<double> values, bool enforce_bound) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("AlphaSchedule: empty table");
        double prev = 0.0;
        for (double a : values_) {
            if (a < 0.0) throw std::invalid_argument("AlphaSchedule: alpha must be nonnegative");
            if (a < prev) throw std::invalid_argument("AlphaSchedule: alpha must be nondecreasing");
            prev = a;
        }
        if (enforce_bound && !(values_.back() < 1.0 / 3.0))
            throw std::invalid_argument("AlphaSchedule: sup alpha must be < 1/3, got " +
                                        std::to_string(values_.back()));
    }

    std::vector<double> values_;
};

struct SolverConfig {
    double tau = 0.0;
    double sigma = 0.0;
    AlphaSchedule alpha = AlphaSchedule::constant(0.0);
    double epsilon = 1e-6;
    std::size_t max_iters = 100000;
    Variant variant = Variant::cp_yyx;
    std::size_t history_stride = 1;  // record every stride-th iteration (and the last)
};

// Assumption-style validation: positivity of the parameters and
// tau*sigma*rho(A^T A) < 1 against the map's resolved bound.  The boundary
// case tau*sigma*rho = 1 (G merely semidefinite) is rejected.
inline void validate_config(const SolverConfig& cfg, const LinearMap& A) {
    if (!(cfg.tau > 0.0) || !(cfg.sigma > 0.0))
        throw std::invalid_argument("SolverConfig: tau and sigma must be positive");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("SolverConfig: epsilon must be positive");
    if (cfg.max_iters == 0) throw std::invalid_argument("SolverConfig: max_iters must be positive");
    if (cfg.history_stride == 0)
        throw std::invalid_argument("SolverConfig: history_stride must be positive");
    const double bound = resolved_norm_bound(A);
    if (!(cfg.tau * cfg.sigma * bound < 1.0))
        throw std::invalid_argument(
            "SolverConfig: tau*sigma*rho(A^T A) must be < 1, got " +
            std::to_string(cfg.tau * cfg.sigma * bound));
}

// Iterate pair w^k = (x^k, y^k) plus the previous pair needed by the
// extrapolations, and the LADM auxiliaries when present.  At k = 0 the
// previous pair equals the current one, matching (x^0, y^0) = (x^-1, y^-1).
struct PrimalDualState {
    Vec x, y;
    Vec x_prev, y_prev;
    std::optional<Vec> u;  // LADMP splitting variable
    std::optional<Vec> v;  // LADMD splitting variable
    std::size_t k = 0;

    static PrimalDualState start(Vec x0, Vec y0) {
        PrimalDualState s;
        s.x = x0;
        s.y = y0;
        s.x_prev = std::move(x0);
        s.y_prev = std::move(y0);
        return s;
    }
};

// One iteration's byproducts: the advanced state, the anchor the stopping rule
// and residuals compare against (w^k, or the extrapolated point for inertial
// schemes), and the feasibility residue of the splitting formulation.
struct StepOutcome {
    PrimalDualState state;
    Vec anchor_x, anchor_y;
    double feas_inf = 0.0;
};

namespace detail {

inline void require_dims(const SaddleProblem& p, const PrimalDualState& s) {
    check_dim("step: x", p.primal_dim(), s.x.size());
    check_dim("step: y", p.dual_dim(), s.y.size());
    check_dim("step: x_prev", p.primal_dim(), s.x_prev.size());
    check_dim("step: y_prev", p.dual_dim(), s.y_prev.size());
}

inline PrimalDualState advance(const PrimalDualState& s, Vec x_new, Vec y_new) {
    PrimalDualState next;
    next.x = std::move(x_new);
    next.y = std::move(y_new);
    next.x_prev = s.x;
    next.y_prev = s.y;
    next.u = s.u;
    next.v = s.v;
    next.k = s.k + 1;
    return next;
}

}  // namespace detail

// CP-y-ybar-x: dual ascent step, extrapolate the dual, primal descent step.
inline StepOutcome step_cp_yyx(const SaddleProblem& p, const SolverConfig& cfg,
                               const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(s.x)));
    Vec y_bar = combine(2.0, y_new, -1.0, s.y);
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, -tau, p.A().adjoint_apply(y_bar)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    // u - A x^k = (y^k - y^{k+1}) / sigma for the Moreau intermediate u
    out.feas_inf = norm_inf(sub(s.y, out.state.y)) / sigma;
    return out;
}

// CP-xbar-x-y: primal step, extrapolate the primal, dual step.
inline StepOutcome step_cp_xxy(const SaddleProblem& p, const SolverConfig& cfg,
                               const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, -tau, p.A().adjoint_apply(s.y)));
    Vec x_bar = combine(2.0, x_new, -1.0, s.x);
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(x_bar)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(sub(s.y, out.state.y)) / sigma;
    return out;
}

// CP-y-x-xbar (the original scheme): dual step against the extrapolated
// primal xbar^k = 2 x^k - x^{k-1}, then primal step.  xbar^0 = x^0 because the
// starting state carries x_prev = x.
inline StepOutcome step_cp_yxx(const SaddleProblem& p, const SolverConfig& cfg,
                               const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec x_bar = combine(2.0, s.x, -1.0, s.x_prev);
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(x_bar)));
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, -tau, p.A().adjoint_apply(y_new)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(sub(s.y, out.state.y)) / sigma;
    return out;
}

// CP-x-y-ybar: primal step against ybar^k = 2 y^k - y^{k-1}, then dual step.
inline StepOutcome step_cp_xyy(const SaddleProblem& p, const SolverConfig& cfg,
                               const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec y_bar = combine(2.0, s.y, -1.0, s.y_prev);
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, -tau, p.A().adjoint_apply(y_bar)));
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(x_new)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(sub(s.y, out.state.y)) / sigma;
    return out;
}

// Inertial CP-y-ybar-x: the whole sweep is anchored at the extrapolated point
// w-hat^k = w^k + alpha_k (w^k - w^{k-1}), including the dual extrapolation
// ybar^{k+1} = 2 y^{k+1} - yhat^k.
inline StepOutcome step_icp_yyx(const SaddleProblem& p, const SolverConfig& cfg,
                                const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    const double alpha = cfg.alpha.at(s.k);
    Vec x_hat = combine(1.0 + alpha, s.x, -alpha, s.x_prev);
    Vec y_hat = combine(1.0 + alpha, s.y, -alpha, s.y_prev);
    Vec y_new = p.prox_g_star(sigma, combine(1.0, y_hat, sigma, p.A().apply(x_hat)));
    Vec y_bar = combine(2.0, y_new, -1.0, y_hat);
    Vec x_new = p.prox_f(tau, combine(1.0, x_hat, -tau, p.A().adjoint_apply(y_bar)));
    double feas = norm_inf(sub(y_hat, y_new)) / sigma;
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), std::move(x_hat),
                    std::move(y_hat), feas};
    return out;
}

// Inertial CP-xbar-x-y.
inline StepOutcome step_icp_xxy(const SaddleProblem& p, const SolverConfig& cfg,
                                const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    const double alpha = cfg.alpha.at(s.k);
    Vec x_hat = combine(1.0 + alpha, s.x, -alpha, s.x_prev);
    Vec y_hat = combine(1.0 + alpha, s.y, -alpha, s.y_prev);
    Vec x_new = p.prox_f(tau, combine(1.0, x_hat, -tau, p.A().adjoint_apply(y_hat)));
    Vec x_bar = combine(2.0, x_new, -1.0, x_hat);
    Vec y_new = p.prox_g_star(sigma, combine(1.0, y_hat, sigma, p.A().apply(x_bar)));
    double feas = norm_inf(sub(y_hat, y_new)) / sigma;
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), std::move(x_hat),
                    std::move(y_hat), feas};
    return out;
}

// Linearized ADM on the dual problem, order y, v, x.  The gradient of the
// quadratic coupling is used in the expanded form
// y^k - sigma grad_y Q = y^k + sigma A (x^k - tau (v^k + A^T y^k)).
inline StepOutcome step_ladmd_yvx(const SaddleProblem& p, const SolverConfig& cfg,
                                  const PrimalDualState& s) {
    detail::require_dims(p, s);
    if (!s.v) throw std::invalid_argument("step_ladmd_yvx: auxiliary v not initialized");
    check_dim("step_ladmd_yvx: v", p.primal_dim(), s.v->size());
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec inner = combine(1.0, s.x, -tau, add(*s.v, p.A().adjoint_apply(s.y)));
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(inner)));
    Vec aty_new = p.A().adjoint_apply(y_new);
    Vec v_new = p.prox_f_star(1.0 / tau, combine(1.0 / tau, s.x, -1.0, aty_new));
    Vec x_new = combine(1.0, s.x, -tau, add(v_new, aty_new));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(add(v_new, aty_new));  // dual feasibility ||v + A^T y||_inf
    out.state.v = std::move(v_new);
    return out;
}

// Linearized ADM on the dual problem, order v, x, y; no v^0 required.
inline StepOutcome step_ladmd_vxy(const SaddleProblem& p, const SolverConfig& cfg,
                                  const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec aty = p.A().adjoint_apply(s.y);
    Vec v_new = p.prox_f_star(1.0 / tau, combine(1.0 / tau, s.x, -1.0, aty));
    Vec v_plus_aty = add(v_new, aty);
    Vec x_new = combine(1.0, s.x, -tau, v_plus_aty);
    Vec inner = combine(1.0, x_new, -tau, v_plus_aty);
    Vec y_new = p.prox_g_star(sigma, combine(1.0, s.y, sigma, p.A().apply(inner)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(add(v_new, p.A().adjoint_apply(out.state.y)));
    out.state.v = std::move(v_new);
    return out;
}

// Linearized ADM on the primal problem, order x, u, y.  The gradient of the
// coupling term is used as grad_x Q = -A^T (sigma (u - A x) - y).
inline StepOutcome step_ladmp_xuy(const SaddleProblem& p, const SolverConfig& cfg,
                                  const PrimalDualState& s) {
    detail::require_dims(p, s);
    if (!s.u) throw std::invalid_argument("step_ladmp_xuy: auxiliary u not initialized");
    check_dim("step_ladmp_xuy: u", p.dual_dim(), s.u->size());
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec slack = combine(sigma, sub(*s.u, p.A().apply(s.x)), -1.0, s.y);
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, tau, p.A().adjoint_apply(slack)));
    Vec ax_new = p.A().apply(x_new);
    Vec u_new = p.prox_g(1.0 / sigma, combine(1.0 / sigma, s.y, 1.0, ax_new));
    Vec y_new = combine(1.0, s.y, -sigma, sub(u_new, ax_new));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(sub(u_new, ax_new));
    out.state.u = std::move(u_new);
    return out;
}

// Linearized ADM on the primal problem, order u, y, x; no u^0 required.
inline StepOutcome step_ladmp_uyx(const SaddleProblem& p, const SolverConfig& cfg,
                                  const PrimalDualState& s) {
    detail::require_dims(p, s);
    const double tau = cfg.tau, sigma = cfg.sigma;
    Vec ax = p.A().apply(s.x);
    Vec u_new = p.prox_g(1.0 / sigma, combine(1.0 / sigma, s.y, 1.0, ax));
    Vec u_minus_ax = sub(u_new, ax);
    Vec y_new = combine(1.0, s.y, -sigma, u_minus_ax);
    Vec slack = combine(sigma, u_minus_ax, -1.0, y_new);
    Vec x_new = p.prox_f(tau, combine(1.0, s.x, tau, p.A().adjoint_apply(slack)));
    StepOutcome out{detail::advance(s, std::move(x_new), std::move(y_new)), s.x, s.y, 0.0};
    out.feas_inf = norm_inf(u_minus_ax);
    out.state.u = std::move(u_new);
    return out;
}

inline StepOutcome step(const SaddleProblem& p, const SolverConfig& cfg,
                        const PrimalDualState& s) {
    switch (cfg.variant) {
        case Variant::cp_yxx: return step_cp_yxx(p, cfg, s);
        case Variant::cp_xxy: return step_cp_xxy(p, cfg, s);
        case Variant::cp_xyy: return step_cp_xyy(p, cfg, s);
        case Variant::cp_yyx: return step_cp_yyx(p, cfg, s);
        case Variant::icp_yyx: return step_icp_yyx(p, cfg, s);
        case Variant::icp_xxy: return step_icp_xxy(p, cfg, s);
        case Variant::ladmd_yvx: return step_ladmd_yvx(p, cfg, s);
        case Variant::ladmd_vxy: return step_ladmd_vxy(p, cfg, s);
        case Variant::ladmp_xuy: return step_ladmp_xuy(p, cfg, s);
        case Variant::ladmp_uyx: return step_ladmp_uyx(p, cfg, s);
    }
    throw std::logic_error("step: unknown variant");
}

// Relative optimality residue ||w^{k+1} - anchor|| / (1 + ||anchor||) < eps,
// where the anchor is w^k for the plain schemes and w-hat^k for the inertial
// ones.
inline bool check_stopping(const PrimalDualState& next, const Vec& anchor_x, const Vec& anchor_y,
                           double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("check_stopping: epsilon must be positive");
    const double step_norm =
        norm_pair(sub(next.x, anchor_x), sub(next.y, anchor_y));
    return step_norm / (1.0 + norm_pair(anchor_x, anchor_y)) < epsilon;
}

// Per-iteration diagnostics.  res is the experiment-style residue
// ||G (w^{k+1} - anchor)||; step_g_norm_sq is ||w^{k+1} - anchor||_G^2, the
// quantity the convergence-rate certificates bound.
struct IterationRecord {
    std::size_t k = 0;
    double res = 0.0;
    double tv = std::numeric_limits<double>::quiet_NaN();
    double snr = std::numeric_limits<double>::quiet_NaN();
    double feas_inf = 0.0;
    double wall_clock = 0.0;
    double step_g_norm_sq = 0.0;
};

enum class Termination { converged, iteration_cap };

inline const char* termination_name(Termination t) {
    return t == Termination::converged ? "converged" : "iteration_cap";
}

struct SolveResult {
    PrimalDualState state;
    std::vector<IterationRecord> history;
    Termination reason = Termination::iteration_cap;
    std::size_t iterations = 0;
    std::vector<std::pair<Vec, Vec>> trajectory;  // filled on request, w^0 included
};

struct SolveOptions {
    std::function<double(const Vec&)> snr_hook;  // e.g. snr against a ground-truth image
    std::function<void(const IterationRecord&, const PrimalDualState&)> on_iteration;
    bool record_trajectory = false;
};

// Iterate the configured scheme from the given start until the stopping rule
// or the iteration cap.  Throws on invalid configuration, missing auxiliary
// starts, and non-finite iterates.
inline SolveResult solve(const SaddleProblem& problem, const SolverConfig& cfg,
                         PrimalDualState start, const SolveOptions& options = {}) {
    validate_config(cfg, problem.A());
    if (needs_aux_v(cfg.variant) && !start.v)
        throw std::invalid_argument("solve: variant ladmd-yvx requires an initial v");
    if (needs_aux_u(cfg.variant) && !start.u)
        throw std::invalid_argument("solve: variant ladmp-xuy requires an initial u");
    detail::require_dims(problem, start);

    const GMetric metric(variant_g_sign(cfg.variant), cfg.tau, cfg.sigma, problem.A());
    const auto t0 = std::chrono::steady_clock::now();

    SolveResult result;
    result.state = std::move(start);
    if (options.record_trajectory) result.trajectory.emplace_back(result.state.x, result.state.y);

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        StepOutcome outcome = step(problem, cfg, result.state);
        if (!all_finite(outcome.state.x) || !all_finite(outcome.state.y))
            throw std::runtime_error("solve: non-finite iterate detected at iteration " +
                                     std::to_string(it + 1));

        const bool stop = check_stopping(outcome.state, outcome.anchor_x, outcome.anchor_y,
                                         cfg.epsilon);
        const bool record = (it % cfg.history_stride == 0) || stop || it + 1 == cfg.max_iters;
        if (record || options.on_iteration) {
            IterationRecord rec;
            rec.k = outcome.state.k;
            rec.res = metric.residual(outcome.state.x, outcome.state.y, outcome.anchor_x,
                                      outcome.anchor_y);
            rec.step_g_norm_sq = metric.step_norm_sq(outcome.state.x, outcome.state.y,
                                                     outcome.anchor_x, outcome.anchor_y);
            rec.feas_inf = outcome.feas_inf;
            if (problem.has_objective()) rec.tv = problem.objective(outcome.state.x);
            if (options.snr_hook) rec.snr = options.snr_hook(outcome.state.x);
            rec.wall_clock =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (record) result.history.push_back(rec);
            if (options.on_iteration) options.on_iteration(rec, outcome.state);
        }

        result.state = std::move(outcome.state);
        if (options.record_trajectory) result.trajectory.emplace_back(result.state.x, result.state.y);
        result.iterations = it + 1;
        if (stop) {
            result.reason = Termination::converged;
            return result;
        }
    }
    result.reason = Termination::iteration_cap;
    return result;
}

}  // namespace pdsolve
