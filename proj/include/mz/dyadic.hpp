#pragma once

// dyadic.hpp -- Calderon-Zygmund decomposition on a dyadic grid, stopping-time
// construction of eta-sparse families, the sparse operators, and the
// weighted-bound / sparse-domination / weak-type checks they power.

#include <functional>

#include "json.hpp"
#include "operators.hpp"
#include "weights.hpp"

namespace mz {

/* ---------------- dyadic descent helpers ---------------- */

namespace detail {

// coarsest level whose cubes can cover the window (side >= 2L)
inline int root_level(const GridSpec& g) { return level_above(2.0 * g.L); }
// finest level (single-cell cubes when h is a power of two)
inline int floor_level(const GridSpec& g) { return level_above(g.h()); }

// the up-to-4 children of a dyadic cube (next finer level, geometric
// containment; exact because 3 * shift is an integer across levels)
inline std::vector<Cube> cube_children(const GridSpec& g, const DyadicGridSpec& d,
                                       const Cube& c) {
    std::vector<Cube> out;
    int k = c.level - 1;
    double s = std::ldexp(1.0, k);
    double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    double tol = s * 1e-9;
    long mx0 = long(std::floor(c.x0 / s - sgn * d.a1 + 0.5)) - 1;
    long my0 = long(std::floor(c.y0 / s - sgn * d.a2 + 0.5)) - 1;
    for (long m1 = mx0; m1 <= mx0 + 2; ++m1)
        for (long m2 = my0; m2 <= my0 + 2; ++m2) {
            Cube ch = dyadic_cube(g, d, k, m1, m2);
            if (ch.x0 < c.x0 - tol || ch.x0 + ch.side > c.x0 + c.side + tol) continue;
            if (ch.y0 < c.y0 - tol || ch.y0 + ch.side > c.y0 + c.side + tol) continue;
            if (!ch.empty()) out.push_back(ch);
        }
    return out;
}

}  // namespace detail

/* ---------------- Calderon-Zygmund decomposition ---------------- */

struct CZPart {
    Cube cube;
    std::vector<double> values;  // row-major over the cube's cell range
};

struct CZDecomposition {
    double lambda = 0.0;
    std::vector<Cube> cubes;   // maximal cubes with <|f|>_Q > lambda
    SampledField good;
    std::vector<CZPart> bad;   // mean-zero parts, one per cube
    std::vector<size_t> clipped;  // indices of boundary-clipped cubes (invariant
                                  // exemptions: the 4x volume-ratio argument
                                  // needs unclipped children)
};

inline CZDecomposition cz_decompose(const SampledField& f, double lambda,
                                    const DyadicGridSpec& d) {
    const GridSpec& g = f.grid;
    g.validate();
    require(lambda > 0.0, "cz_decompose: lambda must be > 0");
    Sat sabs = build_sat(f, 1.0), sraw = build_sat(f);
    double global_avg = sabs.sum(0, g.N - 1, 0, g.N - 1) / double(g.cells());
    require(lambda > global_avg,
            strf("cz_decompose: lambda = %g must exceed the window average %g",
                 lambda, global_avg));

    CZDecomposition out;
    out.lambda = lambda;
    int kfloor = detail::floor_level(g);

    std::vector<Cube> stack;
    for (const Cube& root : level_cubes(g, d, detail::root_level(g))) {
        if (root.empty()) continue;
        require(sabs.sum(root) / double(root.cells()) <= lambda,
                strf("cz_decompose: root cube already exceeds level lambda = %g", lambda));
        stack.push_back(root);
    }
    while (!stack.empty()) {
        Cube c = stack.back();
        stack.pop_back();
        if (c.level <= kfloor) continue;
        for (const Cube& ch : detail::cube_children(g, d, c)) {
            double avg = sabs.sum(ch) / double(ch.cells());
            if (avg > lambda) {
                out.cubes.push_back(ch);
                long full = lround(ch.side / g.h()) * lround(ch.side / g.h());
                if (ch.cells() < full) out.clipped.push_back(out.cubes.size() - 1);
            } else {
                stack.push_back(ch);
            }
        }
    }

    // good part: f off the cubes, the signed cube average on them
    out.good = f;
    for (const Cube& c : out.cubes) {
        double avg = sraw.sum(c) / double(c.cells());
        CZPart part;
        part.cube = c;
        part.values.reserve(size_t(c.cells()));
        for (int ky = c.ky0; ky <= c.ky1; ++ky)
            for (int kx = c.kx0; kx <= c.kx1; ++kx) {
                out.good.v[size_t(ky) * g.N + kx] = avg;
                part.values.push_back(f.at(kx, ky) - avg);
            }
        out.bad.push_back(std::move(part));
    }
    return out;
}

inline SampledField cz_reconstruct(const CZDecomposition& cz) {
    SampledField f = cz.good;
    const int N = f.grid.N;
    for (const CZPart& part : cz.bad) {
        size_t i = 0;
        for (int ky = part.cube.ky0; ky <= part.cube.ky1; ++ky)
            for (int kx = part.cube.kx0; kx <= part.cube.kx1; ++kx)
                f.v[size_t(ky) * N + kx] += part.values[i++];
    }
    return f;
}

/* ---------------- sparse families ---------------- */

struct SparseMember {
    Cube cube;
    std::vector<uint8_t> e_mask;  // row-major over the cube's cells; 1 = in E_Q
    long e_cells = 0;
};

struct SparseFamily {
    DyadicGridSpec grid;
    GridSpec window;
    double eta = 0.5;
    std::vector<SparseMember> members;
};

// Stopping-time construction: from each cube, the stopping children are the
// maximal descendants whose |f|-average exceeds (2/eta) times the cube's own;
// E_Q is Q minus its stopping children.  The selected mass argument gives
// |E_Q| >= (1 - eta/2)|Q|, so every eta <= 2/3 is certifiably feasible; the
// constructor still audits |E_Q| >= eta|Q| on every member and rejects naming
// the violator.
inline SparseFamily build_sparse_family(const SampledField& f, const DyadicGridSpec& d,
                                        double eta) {
    const GridSpec& g = f.grid;
    g.validate();
    require(eta > 0.0 && eta < 1.0, strf("build_sparse_family: eta must be in (0,1), got %g", eta));
    bool nonzero = false;
    for (double v : f.v)
        if (v != 0.0) { nonzero = true; break; }
    require(nonzero, "build_sparse_family: f is identically zero");

    Sat sabs = build_sat(f, 1.0);
    int kfloor = detail::floor_level(g);
    const double mult = 2.0 / eta;

    // maximal descendants of c with average > thr (collected into sel)
    std::function<void(const Cube&, double, std::vector<Cube>&)> collect =
        [&](const Cube& c, double thr, std::vector<Cube>& sel) {
            if (c.level <= kfloor) return;
            for (const Cube& ch : detail::cube_children(g, d, c)) {
                if (sabs.sum(ch) / double(ch.cells()) > thr)
                    sel.push_back(ch);
                else
                    collect(ch, thr, sel);
            }
        };

    SparseFamily fam;
    fam.grid = d;
    fam.window = g;
    fam.eta = eta;
    std::vector<Cube> queue;
    for (const Cube& root : level_cubes(g, d, detail::root_level(g)))
        if (!root.empty()) queue.push_back(root);

    while (!queue.empty()) {
        Cube c = queue.back();
        queue.pop_back();
        std::vector<Cube> children;
        double avg = sabs.sum(c) / double(c.cells());
        if (avg > 0.0) collect(c, mult * avg, children);

        SparseMember m;
        m.cube = c;
        m.e_mask.assign(size_t(c.cells()), 1);
        int W = c.kx1 - c.kx0 + 1;
        for (const Cube& ch : children)
            for (int ky = ch.ky0; ky <= ch.ky1; ++ky)
                for (int kx = ch.kx0; kx <= ch.kx1; ++kx)
                    m.e_mask[size_t(ky - c.ky0) * W + (kx - c.kx0)] = 0;
        for (uint8_t b : m.e_mask) m.e_cells += b;
        require(double(m.e_cells) >= eta * double(c.cells()) - 1e-9,
                strf("build_sparse_family: cube at level %d, m=(%ld,%ld) has |E_Q| = %ld "
                     "< eta|Q| = %g (eta-infeasible selection)",
                     c.level, c.m1, c.m2, m.e_cells, eta * double(c.cells())));
        fam.members.push_back(std::move(m));
        for (const Cube& ch : children) queue.push_back(ch);
    }
    return fam;
}

/* ---------------- sparse operators ---------------- */

namespace detail {
// paint sum over members of g(<avg over Q>) * chi_Q, then postprocess
template <typename AvgFn>
inline SampledField sparse_paint(const SparseFamily& S, AvgFn&& avg_of) {
    SampledField out;
    out.grid = S.window;
    out.v.assign(S.window.cells(), 0.0);
    const int N = S.window.N;
    for (const SparseMember& m : S.members) {
        double a = avg_of(m.cube);
        if (a == 0.0) continue;
        for (int ky = m.cube.ky0; ky <= m.cube.ky1; ++ky)
            for (int kx = m.cube.kx0; kx <= m.cube.kx1; ++kx)
                out.v[size_t(ky) * N + kx] += a;
    }
    return out;
}
}  // namespace detail

// A_S f = sum over members of <f>_Q chi_Q (signed averages).
inline SampledField sparse_operator(const SparseFamily& S, const SampledField& f) {
    require(f.grid == S.window, "sparse_operator: grid mismatch");
    Sat s = build_sat(f);
    return detail::sparse_paint(S, [&](const Cube& c) { return s.sum(c) / double(c.cells()); });
}

// A_S^r f = (sum over members of <f>_Q^r chi_Q)^{1/r}; r = 1 shares the exact
// code path of sparse_operator (no pow calls), so the two agree bit for bit.
inline SampledField sparse_operator_r(const SparseFamily& S, const SampledField& f, double r) {
    require(f.grid == S.window, "sparse_operator_r: grid mismatch");
    require(r > 0.0, strf("sparse_operator_r: r must be > 0, got %g", r));
    Sat s = build_sat(f);
    bool integral_r = (r == std::floor(r));
    SampledField out = detail::sparse_paint(S, [&](const Cube& c) {
        double a = s.sum(c) / double(c.cells());
        if (r == 1.0) return a;
        require(a >= 0.0 || integral_r,
                strf("sparse_operator_r: negative average %g with fractional r = %g", a, r));
        return std::pow(a, r);
    });
    if (r != 1.0)
        for (double& v : out.v) v = std::pow(v, 1.0 / r);
    return out;
}

// A_{S,r} f = sum over members of <|f|^r>_Q^{1/r} chi_Q.
inline SampledField sparse_operator_Lr(const SparseFamily& S, const SampledField& f, double r) {
    require(f.grid == S.window, "sparse_operator_Lr: grid mismatch");
    require(r >= 1.0, strf("sparse_operator_Lr: r must be >= 1, got %g", r));
    Sat s = build_sat(f, r == 1.0 ? 1.0 : r);
    return detail::sparse_paint(S, [&](const Cube& c) {
        double a = s.sum(c) / double(c.cells());
        return r == 1.0 ? a : std::pow(a, 1.0 / r);
    });
}

/* ---------------- checks ---------------- */

struct Lemma21Result {
    double lhs = 0.0;    // ||A_S^r |f| ||_{L^p(w)} / ||f||_{L^p(w)}
    double rhs = 0.0;    // [w]_{A_p}^{1/p} ([w]_{A_inf}^{1/r - 1/p} + [sigma]_{A_inf}^{1/p})
    double ratio = 0.0;
};

inline Lemma21Result lemma21_bound_check(const SparseFamily& S, const SampledField& f,
                                         const Weight& w, double p, double r,
                                         const CubeBank& bank) {
    require(p > 1.0 && r > 0.0 && r < p,
            strf("lemma21_bound_check: need 0 < r < p with p > 1, got r=%g p=%g", r, p));
    SampledField absf;
    absf.grid = f.grid;
    absf.v.resize(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);
    SampledField af = sparse_operator_r(S, absf, r);
    double fn = weighted_lp_norm(f, w.field, p);
    require(fn > 0.0, "lemma21_bound_check: ||f||_{L^p(w)} = 0");
    Lemma21Result res;
    res.lhs = weighted_lp_norm(af, w.field, p) / fn;
    double ap = ap_constant(w, p, bank);
    double ai = ainf_constant(w, w.field.grid);
    double aid = ainf_constant(dual_weight(w, p), w.field.grid);
    res.rhs = std::pow(ap, 1.0 / p) *
              (std::pow(ai, 1.0 / r - 1.0 / p) + std::pow(aid, 1.0 / p));
    res.ratio = res.lhs / res.rhs;
    return res;
}

struct SparseDominationResult {
    double constant = 0.0;  // sup of Mtilde^l f / (l * sum_j A_{S_j,q'} f)
    long flagged = 0;       // cells where the numerator lives but the denominator vanishes
    double qprime = 1.0;
};

// Builds sparse families on all 9 shifted grids from the |f|^{q'} stopping
// data and measures the pointwise domination constant of the mollified square
// function by l times the summed sparse L^{q'} operators.
inline SparseDominationResult sparse_domination_check(const AngularKernel& omega,
                                                      const SampledField& f, int l, double eta,
                                                      const QuadratureSpec& quad,
                                                      int threads = 1) {
    const GridSpec& g = f.grid;
    double q = omega.q_class;
    double qp = (q == AngularKernel::kInf) ? 1.0 : q / (q - 1.0);

    SparseDominationResult zero_res;
    zero_res.qprime = qp;
    bool all_zero = true;
    for (double v : f.v)
        if (v != 0.0) { all_zero = false; break; }
    if (all_zero) return zero_res;  // vacuous domination: 0 <= l * 0

    SampledField fpow;
    fpow.grid = g;
    fpow.v.resize(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i)
        fpow.v[i] = qp == 1.0 ? std::fabs(f.v[i]) : std::pow(std::fabs(f.v[i]), qp);

    SampledField denom;
    denom.grid = g;
    denom.v.assign(g.cells(), 0.0);
    for (const DyadicGridSpec& d : build_grids()) {
        SparseFamily S = build_sparse_family(fpow, d, eta);
        SampledField a = sparse_operator_Lr(S, f, qp);
        for (size_t i = 0; i < denom.v.size(); ++i) denom.v[i] += a.v[i];
    }

    SampledField num = marcinkiewicz_mollified(omega, f, l, quad, threads).field;
    SparseDominationResult res;
    res.qprime = qp;
    for (size_t i = 0; i < num.v.size(); ++i) {
        double d = double(l) * denom.v[i];
        if (d > 1e-12) {
            double ratio = num.v[i] / d;
            if (ratio > res.constant) res.constant = ratio;
        } else if (num.v[i] > 1e-9) {
            res.flagged++;
        }
    }
    return res;
}

struct Weak11Row {
    double lambda = 0.0;
    double measure = 0.0;  // |{Mtilde^l f > lambda}|
    double value = 0.0;    // lambda * measure / ||f||_1
};

struct Weak11Result {
    std::vector<Weak11Row> rows;
    double max_value = 0.0;
    double ratio_to_l = 0.0;
};

inline Weak11Result weak11_check(const AngularKernel& omega, const SampledField& f, int l,
                                 const std::vector<double>& lambda_grid,
                                 const QuadratureSpec& quad, int threads = 1) {
    require(!lambda_grid.empty(), "weak11_check: empty lambda grid");
    for (double lam : lambda_grid)
        require(lam > 0.0, "weak11_check: lambda values must be positive");
    SampledField m = marcinkiewicz_mollified(omega, f, l, quad, threads).field;
    double f1 = lp_norm(f, 1.0);
    double h2 = f.grid.h() * f.grid.h();
    Weak11Result res;
    for (double lam : lambda_grid) {
        long cnt = 0;
        for (double v : m.v)
            if (v > lam) ++cnt;
        Weak11Row row;
        row.lambda = lam;
        row.measure = double(cnt) * h2;
        // f = 0 gives empty level sets; report 0 rather than 0/0
        row.value = f1 > 0.0 ? lam * row.measure / f1 : 0.0;
        res.max_value = std::max(res.max_value, row.value);
        res.rows.push_back(row);
    }
    res.ratio_to_l = res.max_value / double(l);
    return res;
}

/* ---------------- serialization ---------------- */

// JSON layout: grid shift, eta, members as (level, m-indices, cell box,
// E_Q as run-length pairs over the cube's row-major cells).
inline nlohmann::ordered_json sparse_family_json(const SparseFamily& S) {
    nlohmann::ordered_json j;
    j["format"] = "sparse-family-v1";
    j["grid"] = {{"id", S.grid.id}, {"shift", {S.grid.a1, S.grid.a2}}};
    j["window"] = {{"n", S.window.n}, {"N", S.window.N}, {"L", S.window.L}};
    j["eta"] = S.eta;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const SparseMember& m : S.members) {
        nlohmann::ordered_json e = nlohmann::ordered_json::array();
        size_t i = 0, n = m.e_mask.size();
        while (i < n) {
            if (!m.e_mask[i]) { ++i; continue; }
            size_t start = i;
            while (i < n && m.e_mask[i]) ++i;
            e.push_back({start, i - start});
        }
        members.push_back({{"level", m.cube.level},
                           {"m", {m.cube.m1, m.cube.m2}},
                           {"cells", {m.cube.kx0, m.cube.kx1, m.cube.ky0, m.cube.ky1}},
                           {"e_cells", m.e_cells},
                           {"e_runs", e}});
    }
    j["members"] = members;
    return j;
}

}  // namespace mz
