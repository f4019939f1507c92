#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdsolve/affine_projection.hpp"
#include "pdsolve/diagnostics.hpp"
#include "pdsolve/finite_difference.hpp"
#include "pdsolve/problem.hpp"
#include "pdsolve/rng.hpp"
#include "pdsolve/solver.hpp"
#include "pdsolve/walsh_hadamard.hpp"

namespace pdsolve {

// Piecewise-constant synthetic image: a constant background overpainted with
// random axis-aligned rectangles at quantized intensities in [0, 1].  Such
// images have precisely sparse gradients, the regime where TV reconstruction
// from compressive measurements is exact.  The side must be a power of two so
// the Walsh-Hadamard transform size 2^j equals n^2.
struct Phantom {
    std::size_t n = 0;
    Vec image;
    std::uint64_t seed = 0;
    std::size_t rect_count = 0;
    std::size_t gradient_sparsity_bound = 0;  // 4 n * rect_count, a perimeter budget
    std::size_t nonzero_gradient_pairs = 0;   // measured after generation
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// max_rect_side caps the rectangle dimensions (0 means n/2).  Few large
// rectangles give cartoon images with sparse gradients and exact recovery;
// many small ones give textured images whose reconstruction stays inexact at
// the tested measurement levels, the regime of the reference experiments.
inline Phantom generate_phantom(std::size_t n, std::size_t rect_count, std::size_t levels,
                                std::uint64_t seed, std::size_t max_rect_side = 0) {
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument(
            "generate_phantom: image side must be a power of two (>= 2) so that the "
            "Walsh-Hadamard transform order satisfies 2^j = n^2");
    if (levels < 2) throw std::invalid_argument("generate_phantom: need at least two intensity levels");
    const std::size_t side_cap = std::min(max_rect_side == 0 ? n / 2 : max_rect_side, n);

    Phantom ph;
    ph.n = n;
    ph.seed = seed;
    ph.rect_count = rect_count;
    ph.gradient_sparsity_bound = 4 * n * rect_count;  // total perimeter budget

    SeededRng rng(seed);
    const auto level_value = [levels](std::uint64_t lvl) {
        return static_cast<double>(lvl) / static_cast<double>(levels - 1);
    };
    ph.image.assign(n * n, level_value(rng.below(levels)));
    for (std::size_t rect = 0; rect < rect_count; ++rect) {
        const std::size_t r0 = rng.below(n);
        const std::size_t c0 = rng.below(n);
        const std::size_t h = 1 + rng.below(side_cap);
        const std::size_t w = 1 + rng.below(side_cap);
        const double val = level_value(rng.below(levels));
        for (std::size_t c = c0; c < std::min(c0 + w, n); ++c)
            for (std::size_t r = r0; r < std::min(r0 + h, n); ++r) ph.image[c * n + r] = val;
    }

    const FiniteDifferenceMap fd(n);
    const Vec d = fd.forward(ph.image);
    for (std::size_t i = 0; i < n * n; ++i)
        if (d[i] != 0.0 || d[n * n + i] != 0.0) ++ph.nonzero_gradient_pairs;
    return ph;
}

// Raw grayscale ingestion: a flat binary file of n^2 native 64-bit reals in
// column-stacked order plus a side-car text header "<path>.hdr" whose first
// integer token is the side length n.
inline Phantom read_raw_image(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("read_raw_image: cannot open header " + path + ".hdr");
    std::size_t n = 0;
    std::string token;
    while (hdr >> token) {
        try {
            n = std::stoul(token);
            break;
        } catch (const std::exception&) {
            continue;  // skip label tokens such as "n"
        }
    }
    if (n == 0) throw std::runtime_error("read_raw_image: header " + path + ".hdr has no side length");
    if (!is_power_of_two(n) || n < 2)
        throw std::runtime_error("read_raw_image: side length " + std::to_string(n) +
                                 " must be a power of two (>= 2)");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_raw_image: cannot open " + path);
    Phantom ph;
    ph.n = n;
    ph.image.resize(n * n);
    in.read(reinterpret_cast<char*>(ph.image.data()),
            static_cast<std::streamsize>(ph.image.size() * sizeof(double)));
    if (!in || in.gcount() != static_cast<std::streamsize>(ph.image.size() * sizeof(double)))
        throw std::runtime_error("read_raw_image: " + path + " does not hold n^2 = " +
                                 std::to_string(n * n) + " doubles");
    const FiniteDifferenceMap fd(n);
    const Vec d = fd.forward(ph.image);
    for (std::size_t i = 0; i < n * n; ++i)
        if (d[i] != 0.0 || d[n * n + i] != 0.0) ++ph.nonzero_gradient_pairs;
    return ph;
}

// The assembled TV compressive-sensing problem
//
//     min_x  i_{Bx=b}(x) + sum_i ||A_i x||
//
// with A the periodic finite-difference stack and B a randomized partial
// Walsh-Hadamard operator with q = round(fraction * n^2) rows.  Measurements
// are noiseless: b = B x*.
struct TvProblem {
    FiniteDifferenceMap fd;
    PartialWalshHadamardMap sampler;
    Vec b;
    Vec x_star;
    SaddleProblem problem;
};

inline TvProblem assemble_problem(const Phantom& phantom, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("assemble_problem: measurement fraction must lie in (0, 1]");
    const std::size_t n = phantom.n;
    const std::size_t n2 = n * n;
    std::size_t order_exp = 0;
    while ((std::size_t{1} << order_exp) < n2) ++order_exp;
    if ((std::size_t{1} << order_exp) != n2)
        throw std::invalid_argument("assemble_problem: n^2 is not a power of two");
    const auto q = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n2)));
    if (q < 1) throw std::invalid_argument("assemble_problem: fraction yields q < 1 measurements");

    FiniteDifferenceMap fd(n);
    auto sampler = PartialWalshHadamardMap::randomized(order_exp, q, seed);
    Vec b = sampler.forward(phantom.image);

    AffineProjection projection(sampler.map(), b, seed ^ 0x9e3779b97f4a7c15ULL);
    ProxFunction f = projection.as_prox();
    ProxFunction g = group_l2_norm(n2);

    const FiniteDifferenceMap fd_for_obj = fd;
    SaddleProblem problem(fd.map(), std::move(f), std::move(g), std::nullopt, std::nullopt,
                          [fd_for_obj](const Vec& x) { return tv_value(fd_for_obj, x); });
    return TvProblem{std::move(fd), std::move(sampler), std::move(b), phantom.image,
                     std::move(problem)};
}

// Batch configuration reproducing the paper's setting at desk scale: sigma = 5,
// tau = 0.124 / sigma (so tau*sigma = 0.124 < 1/8), constant alpha = 0.28, and
// measurement levels q/n^2 in {20%, 40%, 60%, 80%}.
struct ExperimentConfig {
    std::size_t n = 64;
    std::vector<double> fractions = {0.2, 0.4, 0.6, 0.8};
    double sigma = 5.0;
    double tau = 0.124 / 5.0;
    double alpha = 0.28;
    double epsilon = 1e-3;
    std::uint64_t seed = 1;
    std::vector<Variant> variants = {Variant::cp_yyx, Variant::icp_yyx};
    std::string output_dir = "tvcs_out";
    std::size_t max_iters = 100000;
    // default phantom: dense small-rectangle texture, so the reconstruction is
    // inexact at all tested measurement levels as with real photographs
    std::size_t rect_count = 800;
    std::size_t levels = 8;
    std::size_t rect_side = 4;
    std::optional<Phantom> image;       // raw-ingested ground truth; overrides the phantom
    bool allow_unstable_alpha = false;  // opt-in for alpha >= 1/3 (alpha sweep)
};

struct SummaryRow {
    double fraction = 0.0;
    Variant variant = Variant::cp_yyx;
    double tv = 0.0;
    double feas_inf = 0.0;
    double snr = 0.0;
    std::size_t iterations = 0;
    std::optional<double> it_ratio;  // iters(icp-yyx) / iters(cp-yyx), on the inertial row
};

struct RunOutput {
    double fraction = 0.0;
    Variant variant = Variant::cp_yyx;
    std::vector<IterationRecord> history;
    Termination reason = Termination::iteration_cap;
    std::size_t iterations = 0;
    std::string csv_path;
};

struct ExperimentResult {
    Phantom phantom;
    std::vector<SummaryRow> summary;
    std::vector<RunOutput> runs;
    std::string summary_path;
};

namespace detail {

inline std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline std::string csv_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return format_double("%.10e", v);
}

inline std::string fraction_tag(double fraction) {
    return format_double("%g", fraction);
}

inline void write_iteration_csv(const std::string& path,
                                const std::vector<IterationRecord>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_iteration_csv: cannot open " + path);
    out << "k,res,tv,snr,feas_inf,wall_clock\n";
    for (const auto& rec : history) {
        out << rec.k << ',' << csv_number(rec.res) << ',' << csv_number(rec.tv) << ','
            << csv_number(rec.snr) << ',' << csv_number(rec.feas_inf) << ','
            << format_double("%.6e", rec.wall_clock) << '\n';
    }
}

inline std::uint64_t mix_seed(std::uint64_t seed, double fraction) {
    const auto tag = static_cast<std::uint64_t>(std::llround(fraction * 1e6));
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline void ensure_writable_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = fs::path(dir) / ".write_probe";
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory is not writable: " + dir);
    out << "ok";
    out.close();
    fs::remove(probe, ec);
}

}  // namespace detail

inline void validate_experiment_config(const ExperimentConfig& cfg) {
    if (cfg.fractions.empty())
        throw std::invalid_argument("ExperimentConfig: need at least one measurement fraction");
    for (double f : cfg.fractions)
        if (!(f > 0.0) || f > 1.0)
            throw std::invalid_argument("ExperimentConfig: fractions must lie in (0, 1]");
    if (cfg.variants.empty())
        throw std::invalid_argument("ExperimentConfig: need at least one variant");
    if (!(cfg.sigma > 0.0) || !(cfg.tau > 0.0))
        throw std::invalid_argument("ExperimentConfig: sigma and tau must be positive");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("ExperimentConfig: epsilon must be positive");
    if (!(cfg.tau * cfg.sigma * FiniteDifferenceMap::norm_bound() < 1.0))
        throw std::invalid_argument(
            "ExperimentConfig: tau*sigma must be < 1/8 for the periodic difference operator");
    if (!cfg.allow_unstable_alpha && !(cfg.alpha < 1.0 / 3.0))
        throw std::invalid_argument("ExperimentConfig: alpha must be < 1/3 (set allow_unstable_alpha "
                                    "to probe beyond the proven range)");
}

// Runs every (fraction, variant) pair: one per-iteration CSV per run plus a
// summary table.  All runs start from x0 = B* b, y0 = 0.  Given identical
// seeds and configuration the iterate sequences, and hence all CSV columns
// except wall_clock, are reproduced exactly.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_experiment_config(cfg);
    detail::ensure_writable_dir(cfg.output_dir);

    ExperimentResult result;
    result.phantom = cfg.image ? *cfg.image
                               : generate_phantom(cfg.n, cfg.rect_count, cfg.levels, cfg.seed,
                                                  cfg.rect_side);

    for (double fraction : cfg.fractions) {
        TvProblem tv = assemble_problem(result.phantom, fraction, detail::mix_seed(cfg.seed, fraction));
        const Vec x0 = tv.sampler.adjoint(tv.b);
        const Vec y0(tv.problem.dual_dim(), 0.0);

        std::optional<std::size_t> iters_cp, iters_icp;
        std::vector<std::size_t> row_indices;
        for (Variant variant : cfg.variants) {
            SolverConfig sc;
            sc.tau = cfg.tau;
            sc.sigma = cfg.sigma;
            sc.epsilon = cfg.epsilon;
            sc.max_iters = cfg.max_iters;
            sc.variant = variant;
            if (is_inertial(variant))
                sc.alpha = AlphaSchedule::constant(cfg.alpha, !cfg.allow_unstable_alpha);

            PrimalDualState start = PrimalDualState::start(x0, y0);
            if (needs_aux_u(variant)) start.u = tv.problem.A().apply(x0);
            if (needs_aux_v(variant)) start.v = scaled(tv.problem.A().adjoint_apply(y0), -1.0);

            SolveOptions options;
            const Vec& x_star = tv.x_star;
            options.snr_hook = [&x_star](const Vec& x) { return snr_db(x, x_star); };

            SolveResult solved = solve(tv.problem, sc, std::move(start), options);

            RunOutput run;
            run.fraction = fraction;
            run.variant = variant;
            run.iterations = solved.iterations;
            run.reason = solved.reason;
            run.csv_path = cfg.output_dir + "/run_q" + detail::fraction_tag(fraction) + "_" +
                           variant_name(variant) + ".csv";
            detail::write_iteration_csv(run.csv_path, solved.history);

            SummaryRow row;
            row.fraction = fraction;
            row.variant = variant;
            row.iterations = solved.iterations;
            if (!solved.history.empty()) {
                row.tv = solved.history.back().tv;
                row.feas_inf = solved.history.back().feas_inf;
                row.snr = solved.history.back().snr;
            }
            if (variant == Variant::cp_yyx) iters_cp = solved.iterations;
            if (variant == Variant::icp_yyx) iters_icp = solved.iterations;
            row_indices.push_back(result.summary.size());
            result.summary.push_back(row);
            run.history = std::move(solved.history);
            result.runs.push_back(std::move(run));
        }
        if (iters_cp && iters_icp && *iters_cp > 0) {
            const double ratio = static_cast<double>(*iters_icp) / static_cast<double>(*iters_cp);
            for (std::size_t idx : row_indices)
                if (result.summary[idx].variant == Variant::icp_yyx)
                    result.summary[idx].it_ratio = ratio;
        }
    }

    result.summary_path = cfg.output_dir + "/summary.csv";
    std::ofstream out(result.summary_path);
    if (!out) throw std::runtime_error("run_experiment: cannot open " + result.summary_path);
    out << "fraction,variant,tv,feas_inf,snr,iterations,it2_over_it1\n";
    for (const auto& row : result.summary) {
        out << detail::format_double("%g", row.fraction) << ',' << variant_name(row.variant) << ','
            << detail::format_double("%.6e", row.tv) << ','
            << detail::format_double("%.6e", row.feas_inf) << ','
            << (std::isinf(row.snr) ? std::string("inf") : detail::format_double("%.6f", row.snr))
            << ',' << row.iterations << ','
            << (row.it_ratio ? detail::format_double("%.6f", *row.it_ratio) : std::string()) << '\n';
    }
    return result;
}

// Columnar (k, quantity) plot data for any plotting tool.
inline void write_history_curves(const std::string& dir, const std::string& tag,
                                 const std::vector<IterationRecord>& history) {
    detail::ensure_writable_dir(dir);
    const auto dump = [&](const char* what, auto getter) {
        std::ofstream out(dir + "/" + tag + "_" + what + ".dat");
        for (const auto& rec : history) out << rec.k << ' ' << detail::csv_number(getter(rec)) << '\n';
    };
    dump("res", [](const IterationRecord& r) { return r.res; });
    dump("tv", [](const IterationRecord& r) { return r.tv; });
    dump("snr", [](const IterationRecord& r) { return r.snr; });
    dump("feas", [](const IterationRecord& r) { return r.feas_inf; });
}

// Per-iteration differences between two runs of the same length scale, in both
// absolute and relative (|a-b| / |a|) senses.
inline void write_difference_curves(const std::string& dir, const std::string& tag,
                                    const std::vector<IterationRecord>& a,
                                    const std::vector<IterationRecord>& b) {
    detail::ensure_writable_dir(dir);
    const std::size_t len = std::min(a.size(), b.size());
    const auto dump = [&](const char* what, auto getter) {
        std::ofstream abs_out(dir + "/" + tag + "_" + what + "_absdiff.dat");
        std::ofstream rel_out(dir + "/" + tag + "_" + what + "_reldiff.dat");
        for (std::size_t i = 0; i < len; ++i) {
            const double va = getter(a[i]);
            const double vb = getter(b[i]);
            const double ad = std::abs(va - vb);
            abs_out << a[i].k << ' ' << detail::csv_number(ad) << '\n';
            rel_out << a[i].k << ' ' << detail::csv_number(ad / (std::abs(va) + 1e-300)) << '\n';
        }
    };
    dump("res", [](const IterationRecord& r) { return r.res; });
    dump("tv", [](const IterationRecord& r) { return r.tv; });
    dump("snr", [](const IterationRecord& r) { return r.snr; });
}

// Bar data: iteration counts averaged per (fraction, variant) over the summary
// rows, one line per bar.
inline void write_average_iteration_bars(const std::string& dir, const std::string& tag,
                                         const std::vector<SummaryRow>& rows) {
    detail::ensure_writable_dir(dir);
    std::ofstream out(dir + "/" + tag + "_iteration_bars.dat");
    std::vector<std::pair<double, Variant>> keys;
    for (const auto& row : rows) {
        const auto key = std::make_pair(row.fraction, row.variant);
        bool seen = false;
        for (const auto& k : keys) seen = seen || (k == key);
        if (seen) continue;
        keys.push_back(key);
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& r : rows)
            if (r.fraction == row.fraction && r.variant == row.variant) {
                total += static_cast<double>(r.iterations);
                ++count;
            }
        out << detail::format_double("%g", row.fraction) << ' ' << variant_name(row.variant) << ' '
            << detail::format_double("%.2f", total / static_cast<double>(count)) << '\n';
    }
}

struct AlphaSweepRow {
    double fraction = 0.0;
    double alpha = 0.0;
    std::size_t iterations = 0;
    double tv = 0.0;
    double snr = 0.0;
};

// Constant-alpha sweep of the inertial scheme, reproducing the paper's probe
// of alpha in {0.05, 0.15, 0.25, 0.35}.  Values >= 1/3 are outside the proven
// range and run through the explicit opt-out.
inline std::vector<AlphaSweepRow> run_alpha_sweep(
    ExperimentConfig cfg, const std::vector<double>& alphas = {0.05, 0.15, 0.25, 0.35}) {
    cfg.variants = {Variant::icp_yyx};
    validate_experiment_config(cfg);
    detail::ensure_writable_dir(cfg.output_dir);

    const Phantom phantom = cfg.image ? *cfg.image
                                      : generate_phantom(cfg.n, cfg.rect_count, cfg.levels,
                                                         cfg.seed, cfg.rect_side);
    std::vector<AlphaSweepRow> rows;
    for (double fraction : cfg.fractions) {
        TvProblem tv = assemble_problem(phantom, fraction, detail::mix_seed(cfg.seed, fraction));
        const Vec x0 = tv.sampler.adjoint(tv.b);
        const Vec y0(tv.problem.dual_dim(), 0.0);
        for (double alpha : alphas) {
            SolverConfig sc;
            sc.tau = cfg.tau;
            sc.sigma = cfg.sigma;
            sc.epsilon = cfg.epsilon;
            sc.max_iters = cfg.max_iters;
            sc.variant = Variant::icp_yyx;
            sc.alpha = AlphaSchedule::constant(alpha, /*enforce_bound=*/alpha < 1.0 / 3.0);

            SolveOptions options;
            const Vec& x_star = tv.x_star;
            options.snr_hook = [&x_star](const Vec& x) { return snr_db(x, x_star); };
            SolveResult solved = solve(tv.problem, sc, PrimalDualState::start(x0, y0), options);

            AlphaSweepRow row;
            row.fraction = fraction;
            row.alpha = alpha;
            row.iterations = solved.iterations;
            if (!solved.history.empty()) {
                row.tv = solved.history.back().tv;
                row.snr = solved.history.back().snr;
            }
            rows.push_back(row);
            write_history_curves(cfg.output_dir,
                                 "alpha_q" + detail::fraction_tag(fraction) + "_a" +
                                     detail::fraction_tag(alpha),
                                 solved.history);
        }
    }
    std::ofstream out(cfg.output_dir + "/alpha_sweep.csv");
    out << "fraction,alpha,iterations,tv,snr\n";
    for (const auto& row : rows) {
        out << detail::format_double("%g", row.fraction) << ','
            << detail::format_double("%g", row.alpha) << ',' << row.iterations << ','
            << detail::format_double("%.6e", row.tv) << ','
            << (std::isinf(row.snr) ? std::string("inf") : detail::format_double("%.6f", row.snr))
            << '\n';
    }
    return rows;
}

}  // namespace pdsolve
