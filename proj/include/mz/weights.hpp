#pragma once

// weights.hpp -- Muckenhoupt machinery: A_p constants over cube banks, the
// Fujii-Wilson A_inf constant via nested dyadic towers, the composite
// constants of the weighted-norm estimates, power weights, the
// reverse-Holder step, and the geometric tail sums.

#include "grid.hpp"

namespace mz {

struct Weight {
    SampledField field;
    bool is_power = false;
    double a = 0.0;  // exponent when is_power

    void validate() const {
        field.grid.validate();
        double mn = std::numeric_limits<double>::infinity();
        for (double v : field.v) {
            require(std::isfinite(v), "Weight: non-finite value");
            mn = std::min(mn, v);
        }
        require(mn > 0.0, strf("Weight: min value %g must be > 0", mn));
    }
};

// w(x) = |x|^a at cell centers (cell-centering keeps it strictly positive).
// The admissibility window -n < a < n*(p_target - 1) is the A_{p_target}
// membership range for power weights.
inline Weight power_weight(double a, const GridSpec& g, double p_target = 2.0) {
    g.validate();
    require(p_target > 1.0, strf("power_weight: p_target must be > 1, got %g", p_target));
    const double n = 2.0;
    require(a > -n && a < n * (p_target - 1.0),
            strf("power_weight: a = %g outside the A_p window (-%g, %g) for p = %g",
                 a, n, n * (p_target - 1.0), p_target));
    Weight w;
    w.is_power = true;
    w.a = a;
    w.field = sample(g, [a](double x, double y) { return std::pow(std::hypot(x, y), a); });
    w.validate();
    return w;
}

inline Weight constant_weight(double c, const GridSpec& g) {
    require(c > 0.0, "constant_weight: c must be > 0");
    Weight w;
    w.field = sample(g, [c](double, double) { return c; });
    return w;
}

// dual weight sigma = w^{1-p'} = w^{-1/(p-1)}
inline Weight dual_weight(const Weight& w, double p) {
    require(p > 1.0, strf("dual_weight: p must be > 1, got %g", p));
    Weight s;
    s.field.grid = w.field.grid;
    s.field.v.resize(w.field.v.size());
    double e = -1.0 / (p - 1.0);
    for (size_t i = 0; i < w.field.v.size(); ++i) s.field.v[i] = std::pow(w.field.v[i], e);
    s.validate();
    return s;
}

inline Weight pow_weight(const Weight& w, double e) {
    Weight s;
    s.field.grid = w.field.grid;
    s.field.v.resize(w.field.v.size());
    for (size_t i = 0; i < w.field.v.size(); ++i) s.field.v[i] = std::pow(w.field.v[i], e);
    s.validate();
    return s;
}

/* ---------------- A_p ---------------- */

// [w]_{A_p} = max over bank cubes of <w>_Q <w^{-1/(p-1)}>_Q^{p-1}.
inline double ap_constant(const Weight& w, double p, const CubeBank& bank) {
    require(p > 1.0, strf("ap_constant: p must be > 1, got %g", p));
    require(!bank.cubes.empty(), "ap_constant: empty cube bank");
    w.validate();
    Weight sigma = dual_weight(w, p);
    Sat sw = build_sat(w.field), ss = build_sat(sigma.field);
    double best = 0.0;
    for (const Cube& c : bank.cubes) {
        if (c.empty()) continue;
        double inv = 1.0 / double(c.cells());
        double prod = (sw.sum(c) * inv) * std::pow(ss.sum(c) * inv, p - 1.0);
        if (prod > best) best = prod;
    }
    require(best >= 1.0 - 1e-6,
            strf("ap_constant: computed value %.12g < 1, averaging is broken", best));
    return best;
}

/* ---------------- Fujii-Wilson A_inf ---------------- */

// [w]_{A_inf} = sup_Q (1/w(Q)) * integral over Q of M(w chi_Q).
//
// Realization: for each shifted grid, a fine-to-coarse tower of per-level
// cube averages gives, at every cell x inside a dyadic cube Q, the maximum of
// <w>_R over same-grid dyadic R with x in R, R inside Q; a per-level
// summed-area table then yields the integral over every Q of that level in
// O(1).  This evaluates the literal definition with the inner sup restricted
// to same-grid nested cubes -- an honest lower realization of M on which the
// constant-weight value is exactly 1.  Levels run over sides [4h, 2L].
inline double ainf_constant(const Weight& w, const GridSpec& g) {
    w.validate();
    require(w.field.grid == g, "ainf_constant: grid mismatch");
    const int N = g.N;
    auto grids = build_grids();
    int klo = level_above(4.0 * g.h()), khi = level_below(2.0 * g.L);
    Sat sw = build_sat(w.field);
    double best = 0.0;
    std::vector<double> Mk(size_t(N) * N, 0.0);
    SampledField Mf;
    Mf.grid = g;
    for (const auto& d : grids) {
        std::fill(Mk.begin(), Mk.end(), 0.0);
        for (int k = klo; k <= khi; ++k) {
            auto cubes = level_cubes(g, d, k);
            // fold this level's averages into the running cellwise max
            for (const Cube& c : cubes) {
                double avg = sw.sum(c) / double(c.cells());
                for (int ky = c.ky0; ky <= c.ky1; ++ky)
                    for (int kx = c.kx0; kx <= c.kx1; ++kx) {
                        double& m = Mk[size_t(ky) * N + kx];
                        if (avg > m) m = avg;
                    }
            }
            Mf.v = Mk;
            Sat sm = build_sat(Mf);
            for (const Cube& c : cubes) {
                double wq = sw.sum(c);
                if (wq <= 0.0) continue;
                double ratio = sm.sum(c) / wq;
                if (ratio > best) best = ratio;
            }
        }
    }
    require(best >= 1.0 - 1e-6,
            strf("ainf_constant: computed value %.12g < 1", best));
    return best;
}

/* ---------------- composite constants ---------------- */

struct CompositeConstants {
    double ap = 0.0;        // [w]_{A_p}
    double ainf = 0.0;      // [w]_{A_inf}
    double ainf_dual = 0.0; // [w^{1-p'}]_{A_inf}
    double curly = 0.0;     // {w}_{A_p,r}
    double paren = 0.0;     // (w)_{A_p}
};

// curly {w}_{A_p,r} = [w]_{A_p}^{1/r} * max([w]_{A_inf}^{1/r'}, [sigma]_{A_inf}^{1/r});
// paren (w)_{A_p}   = max([w]_{A_inf}, [sigma]_{A_inf}).
inline CompositeConstants composite_constants(const Weight& w, double p, double r,
                                              const CubeBank& bank) {
    require(p > 1.0 && r > 1.0, strf("composite_constants: need p, r > 1, got p=%g r=%g", p, r));
    CompositeConstants c;
    c.ap = ap_constant(w, p, bank);
    c.ainf = ainf_constant(w, w.field.grid);
    c.ainf_dual = ainf_constant(dual_weight(w, p), w.field.grid);
    double rp = r / (r - 1.0);
    c.curly = std::pow(c.ap, 1.0 / r) *
              std::max(std::pow(c.ainf, 1.0 / rp), std::pow(c.ainf_dual, 1.0 / r));
    c.paren = std::max(c.ainf, c.ainf_dual);
    return c;
}

/* ---------------- reverse Holder ---------------- */

struct ReverseHolderResult {
    double eps = 0.0;
    double lhs = 0.0;        // [w^{1+eps}]_{A_p}
    double rhs = 0.0;        // 4 * [w]_{A_p}^{1+eps}
    bool holds = false;      // lhs <= slack * rhs
    double ainf_ratio = 0.0;       // [w^{1+eps}]_{A_inf} / [w]_{A_inf}^{1+eps}
    double ainf_dual_ratio = 0.0;  // same for the dual weight
};

// eps = eps_constant / (w)_{A_p}; checks the self-improvement
// [w^{1+eps}]_{A_p} <= slack * 4 [w]_{A_p}^{1+eps} and records the two A_inf
// self-improvement ratios.
inline ReverseHolderResult reverse_holder_check(const Weight& w, double p,
                                                double eps_constant, const CubeBank& bank,
                                                double slack = 1.0) {
    require(eps_constant > 0.0, "reverse_holder_check: eps_constant must be > 0");
    require(slack > 0.0, "reverse_holder_check: slack must be > 0");
    CompositeConstants cc = composite_constants(w, p, std::max(p, 2.0), bank);
    ReverseHolderResult res;
    res.eps = eps_constant / cc.paren;
    Weight w1 = pow_weight(w, 1.0 + res.eps);
    res.lhs = ap_constant(w1, p, bank);
    res.rhs = 4.0 * std::pow(cc.ap, 1.0 + res.eps);
    res.holds = res.lhs <= slack * res.rhs;
    res.ainf_ratio = ainf_constant(w1, w.field.grid) / std::pow(cc.ainf, 1.0 + res.eps);
    Weight sigma = dual_weight(w, p);
    Weight s1 = pow_weight(sigma, 1.0 + res.eps);
    res.ainf_dual_ratio =
        ainf_constant(s1, w.field.grid) / std::pow(cc.ainf_dual, 1.0 + res.eps);
    return res;
}

/* ---------------- tail sums ---------------- */

struct TailSumResult {
    double S = 0.0;
    int terms = 0;
    double S_times_eps = 0.0;
};

// S(eps, rho) = sum over l >= 1 of 2^l * 2^{-rho 2^l eps/(1+eps)}, truncated
// when the term falls below 1e-15.
inline TailSumResult tail_sum_check(double eps, double rho) {
    require(eps > 0.0 && rho > 0.0,
            strf("tail_sum_check: need eps, rho > 0, got eps=%g rho=%g", eps, rho));
    double c = rho * eps / (1.0 + eps);
    TailSumResult res;
    for (int l = 1; l <= 4000; ++l) {
        double term = std::exp2(double(l) - c * std::exp2(double(l)));
        res.S += term;
        res.terms = l;
        if (term < 1e-15 && c * std::exp2(double(l)) > double(l)) break;
    }
    res.S_times_eps = res.S * eps;
    return res;
}

}  // namespace mz
