#pragma once

// experiments.hpp -- operator-norm estimation over a scene bank and the
// weighted-norm scaling experiments: the square-function budget sweep, the
// rough-singular-integral budget sweep, and the maximal-function (sharp A_p
// power) sweep.  Operator outputs do not depend on the weight, so each sweep
// evaluates the operator once per scene and reuses the outputs across all
// weight rows.

#include <chrono>
#include <cstdio>
#include <fstream>

#include "dyadic.hpp"
#include "fourier.hpp"
#include "scenes.hpp"

namespace mz {

/* ---------------- operator norm estimation ---------------- */

using SceneBank = std::vector<std::pair<std::string, SampledField>>;

// 8 named scenes plus n_random seeded random bump superpositions.
inline SceneBank norm_scene_bank(const GridSpec& g, uint64_t seed = 20240801,
                                 int n_random = 20) {
    SceneBank bank;
    for (const char* nm : {"disk", "gaussian", "two-bump", "annulus-bump", "wbump2",
                           "wbump3", "wbump4", "wbump5"})
        bank.emplace_back(nm, make_scene(nm, g));
    for (int i = 0; i < n_random; ++i)
        bank.emplace_back(strf("rand%d", i + 1), make_random_scene(g, seed + uint64_t(i)));
    return bank;
}

struct NormEstimate {
    double ratio = 0.0;
    std::string argmax_scene;
    std::vector<std::pair<std::string, double>> per_scene;
};

// max over scenes of ||op f||_{L^p(w)} / ||f||_{L^p(w)}; zero-norm scenes are
// skipped with a warning on stderr (they carry no information).
template <typename Op>
inline NormEstimate operator_norm_estimate(Op&& op, const SceneBank& scenes, const Weight& w,
                                           double p) {
    require(!scenes.empty(), "operator_norm_estimate: empty scene bank");
    NormEstimate est;
    for (const auto& [name, f] : scenes) {
        double fn = weighted_lp_norm(f, w.field, p);
        if (fn <= 0.0) {
            std::fprintf(stderr, "warning: scene %s has zero weighted norm; skipped\n",
                         name.c_str());
            continue;
        }
        double r = weighted_lp_norm(op(f), w.field, p) / fn;
        est.per_scene.emplace_back(name, r);
        if (r > est.ratio) {
            est.ratio = r;
            est.argmax_scene = name;
        }
    }
    require(!est.per_scene.empty(), "operator_norm_estimate: all scenes had zero norm");
    return est;
}

/* ---------------- weight sweeps ---------------- */

struct SweepConfig {
    double p = 2.0;       // norm exponent
    int l = 1;            // mollification parameter (square-function sweep)
    double a_max = -1.0;  // power-weight ceiling; < 0 selects the default
    int a_steps = 12;     // rows = a_steps + 1 (includes a = 0)
    double slack = 4.0;   // multiplicative budget slack
    uint64_t seed = 20240801;
    int n_random_scenes = 4;
    int threads = 1;
};

struct SweepRow {
    double a = 0.0;
    double ap = 1.0;         // [w]_{A_pc}
    double ainf = 1.0;       // [w]_{A_inf}
    double ainf_dual = 1.0;  // [sigma]_{A_inf}
    double curly = 1.0;      // {w}_{A_pc, p}
    double paren = 1.0;      // (w)_{A_pc}
    double norm = 0.0;       // estimated operator norm on L^p(w)
    bool within_budget = true;
};

struct SweepReport {
    std::string kind;           // "square-function" | "singular-integral" | "maximal"
    std::string omega_id;       // empty for the maximal sweep
    double p = 2.0, pc = 2.0, qprime = 1.0;
    int l = 0;
    double a_max = 0.0, slack = 4.0;
    double omega_norm = 1.0;    // budget prefactor ||Omega||
    double exponent_cap = 0.0;  // admissible beta-hat ceiling
    std::vector<SweepRow> rows;
    std::vector<std::string> scenes;
    double beta_hat = 0.0, fit_r2 = 0.0;
    std::vector<double> residuals;
    bool low_r2 = false;
    bool rows_ok = true, beta_ok = true, passed = false;
};

namespace detail {

template <typename Op>
inline SweepReport run_weight_sweep(const std::string& kind, const std::string& omega_id,
                                    Op&& op, const GridSpec& g, const SweepConfig& cfg,
                                    double pc, double omega_norm, double exponent_cap) {
    require(cfg.a_steps >= 2, "weight sweep: need at least 3 rows");
    require(cfg.slack >= 1.0, strf("weight sweep: slack must be >= 1, got %g", cfg.slack));
    double a_max = cfg.a_max >= 0.0 ? cfg.a_max : 0.9 * double(g.n) * (pc - 1.0);
    require(a_max > 0.0, strf("weight sweep: a_max = %g must be positive", a_max));

    auto t0 = std::chrono::steady_clock::now();
    SceneBank scenes = norm_scene_bank(g, cfg.seed, cfg.n_random_scenes);
    std::vector<SampledField> outs;
    outs.reserve(scenes.size());
    for (const auto& [name, f] : scenes) outs.push_back(op(f));
    CubeBank bank = standard_cube_bank(g);

    SweepReport rep;
    rep.kind = kind;
    rep.omega_id = omega_id;
    rep.p = cfg.p;
    rep.pc = pc;
    rep.l = cfg.l;
    rep.a_max = a_max;
    rep.slack = cfg.slack;
    rep.omega_norm = omega_norm;
    rep.exponent_cap = exponent_cap;
    for (const auto& [name, f] : scenes) rep.scenes.push_back(name);

    for (int i = 0; i <= cfg.a_steps; ++i) {
        double a = a_max * double(i) / double(cfg.a_steps);
        Weight w = power_weight(a, g, pc);
        CompositeConstants cc = composite_constants(w, pc, cfg.p, bank);
        SweepRow row;
        row.a = a;
        row.ap = cc.ap;
        row.ainf = cc.ainf;
        row.ainf_dual = cc.ainf_dual;
        row.curly = cc.curly;
        row.paren = cc.paren;
        for (size_t s = 0; s < scenes.size(); ++s) {
            double fn = weighted_lp_norm(scenes[s].second, w.field, cfg.p);
            if (fn <= 0.0) continue;
            row.norm = std::max(row.norm, weighted_lp_norm(outs[s], w.field, cfg.p) / fn);
        }
        row.within_budget = row.norm <= cfg.slack * omega_norm * row.curly * row.paren;
        rep.rows_ok = rep.rows_ok && row.within_budget;
        rep.rows.push_back(row);
    }

    std::vector<double> xs, ys;
    for (const SweepRow& row : rep.rows)
        if (row.norm > 0.0) {
            xs.push_back(std::log2(row.ap));
            ys.push_back(std::log2(row.norm));
        }
    LineFit fit = fit_line(xs, ys);
    rep.beta_hat = fit.slope;
    rep.fit_r2 = fit.r2;
    for (size_t i = 0; i < xs.size(); ++i)
        rep.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
    rep.low_r2 = fit.r2 < 0.8;
    rep.beta_ok = rep.beta_hat <= exponent_cap;
    rep.passed = rep.rows_ok && rep.beta_ok;

    auto t1 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "sweep %s: %zu rows x %zu scenes in %.1f s\n", kind.c_str(),
                 rep.rows.size(), scenes.size(),
                 std::chrono::duration<double>(t1 - t0).count());
    return rep;
}

}  // namespace detail

// Square-function budget: for Omega of class q, weights run in A_{p/q'} and the
// estimated L^p(w) norm must stay below slack * ||Omega||_q * {w} * (w); the
// fitted growth exponent in [w]_{A_{p/q'}} must not exceed 2*max(1, 1/(pc-1))
// plus a fitting margin of 0.25.
inline SweepReport square_function_sweep(const AngularKernel& omega, const GridSpec& g,
                                   const SweepConfig& cfg,
                                   const QuadratureSpec& quad) {
    double q = omega.q_class;
    double qp = (q == AngularKernel::kInf) ? 1.0 : q / (q - 1.0);
    require(cfg.p > qp, strf("square-function sweep: requires p > q' (got p = %g, q' = %g)",
                             cfg.p, qp));
    double pc = cfg.p / qp;
    double cap = 2.0 * std::max(1.0, 1.0 / (pc - 1.0)) + 0.25;
    double on = lq_sphere_norm(omega, q);
    SweepReport rep = detail::run_weight_sweep(
        "square-function", omega.id,
        [&](const SampledField& f) {
            return marcinkiewicz_mollified(omega, f, cfg.l, quad, cfg.threads).field;
        },
        g, cfg, pc, on, cap);
    rep.qprime = qp;
    return rep;
}

// Rough-singular-integral budget: bounded Omega only, eps = 4h, R = L/2.
inline SweepReport singular_integral_sweep(const AngularKernel& omega, const GridSpec& g,
                                   const SweepConfig& cfg) {
    require(omega.q_class == AngularKernel::kInf,
            "singular-integral sweep: requires a bounded angular kernel (q = inf)");
    double on = lq_sphere_norm(omega, AngularKernel::kInf);
    double cap = 2.0 * std::max(1.0, 1.0 / (cfg.p - 1.0)) + 0.25;
    SweepReport rep = detail::run_weight_sweep(
        "singular-integral", omega.id,
        [&](const SampledField& f) {
            return rough_singular_integral(omega, f, 4.0 * g.h(), g.L / 2.0);
        },
        g, cfg, cfg.p, on, cap);
    rep.qprime = 1.0;
    return rep;
}

// Maximal-function sweep: the sharp A_p power for the maximal function is
// 1/(p-1), so the fitted exponent must stay below 1/(p-1) + 0.25.
inline SweepReport buckley_sweep(const GridSpec& g, const SweepConfig& cfg) {
    require(cfg.p > 1.0, strf("maximal sweep: p must be > 1, got %g", cfg.p));
    double cap = 1.0 / (cfg.p - 1.0) + 0.25;
    SweepReport rep = detail::run_weight_sweep(
        "maximal", "", [&](const SampledField& f) { return hl_maximal(f); }, g, cfg, cfg.p,
        1.0, cap);
    rep.qprime = 1.0;
    return rep;
}

/* ---------------- report serialization ---------------- */

// RFC 4180: CRLF line endings, header row, %.17g numerics.
inline void write_sweep_csv(const SweepReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(bool(out), strf("write_sweep_csv: cannot open %s", path.c_str()));
    out << "a,ap_constant,ainf,ainf_dual,curly,paren,norm_ratio,within_budget\r\n";
    for (const SweepRow& r : rep.rows)
        out << fmt_g17(r.a) << ',' << fmt_g17(r.ap) << ',' << fmt_g17(r.ainf) << ','
            << fmt_g17(r.ainf_dual) << ',' << fmt_g17(r.curly) << ',' << fmt_g17(r.paren)
            << ',' << fmt_g17(r.norm) << ',' << (r.within_budget ? 1 : 0) << "\r\n";
}

inline nlohmann::ordered_json sweep_json(const SweepReport& rep) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["kind"] = rep.kind;
    j["config"] = {{"omega", rep.omega_id}, {"p", rep.p},      {"pc", rep.pc},
                   {"qprime", rep.qprime},  {"l", rep.l},      {"a_max", rep.a_max},
                   {"slack", rep.slack},    {"scenes", rep.scenes}};
    j["budget"] = {{"omega_norm", rep.omega_norm}, {"exponent_cap", rep.exponent_cap}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const SweepRow& r : rep.rows)
        rows.push_back({{"a", r.a},
                        {"ap", r.ap},
                        {"ainf", r.ainf},
                        {"ainf_dual", r.ainf_dual},
                        {"curly", r.curly},
                        {"paren", r.paren},
                        {"norm", r.norm},
                        {"within_budget", r.within_budget}});
    j["rows"] = rows;
    j["fit"] = {{"beta_hat", rep.beta_hat},
                {"r2", rep.fit_r2},
                {"residuals", rep.residuals},
                {"low_r2", rep.low_r2}};
    j["result"] = {{"rows_ok", rep.rows_ok}, {"beta_ok", rep.beta_ok}, {"passed", rep.passed}};
    return j;
}

/* ---------------- weight table (constants vs a) ---------------- */

struct WeightTableRow {
    double a, ap, ainf, ainf_dual, curly, paren, eps;
    bool rh_holds;
};

inline std::vector<WeightTableRow> weight_table(const std::vector<double>& a_values,
                                                double p, double r, const GridSpec& g,
                                                double eps_constant = 0.25,
                                                double rh_slack = 4.0) {
    CubeBank bank = standard_cube_bank(g);
    std::vector<WeightTableRow> rows;
    for (double a : a_values) {
        Weight w = power_weight(a, g, p);
        CompositeConstants cc = composite_constants(w, p, r, bank);
        ReverseHolderResult rh = reverse_holder_check(w, p, eps_constant, bank, rh_slack);
        rows.push_back({a, cc.ap, cc.ainf, cc.ainf_dual, cc.curly, cc.paren, rh.eps,
                        rh.holds});
    }
    return rows;
}

inline void write_weight_table_csv(const std::vector<WeightTableRow>& rows,
                                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(bool(out), strf("write_weight_table_csv: cannot open %s", path.c_str()));
    out << "a,ap_constant,ainf,ainf_dual,curly,paren,rh_eps,rh_holds\r\n";
    for (const WeightTableRow& r : rows)
        out << fmt_g17(r.a) << ',' << fmt_g17(r.ap) << ',' << fmt_g17(r.ainf) << ','
            << fmt_g17(r.ainf_dual) << ',' << fmt_g17(r.curly) << ',' << fmt_g17(r.paren)
            << ',' << fmt_g17(r.eps) << ',' << (r.rh_holds ? 1 : 0) << "\r\n";
}

}  // namespace mz
