#pragma once

// operators.hpp -- the square-function operators (full, dyadic, mollified,
// scale-restricted), the grand maximal operator, the truncated rough singular
// integral, and the Omega-weighted / L^r maximal operators.
//
// Square functions are evaluated through a KernelFamily: the full list of
// per-(scale, t-node) kernel fields with their quadrature coefficients, built
// once and applied to any number of scenes.  Partial squares are accumulated
// in a fixed scale-then-node order before the square root, so results are
// independent of thread count.

#include "grid.hpp"
#include "kernels.hpp"

namespace mz {

struct SquareFunctionOutput {
    SampledField field;
    std::string op;
    std::string omega_id;
    int l = 0;  // 0 = unsmoothed
    QuadratureSpec quad;
};

/* ---------------- kernel families ---------------- */

enum class FamilyKind { ball, annulus, smoothed };

struct ScaleKernel {
    int j = 0;
    double t = 1.0;
    double coeff = 1.0;  // multiplies |k * f|^2 in the square sum
    SampledField k;
};

struct KernelFamily {
    FamilyKind kind = FamilyKind::annulus;
    std::string omega_id;
    int l = 0;
    QuadratureSpec quad;
    std::vector<ScaleKernel> terms;  // ordered j ascending, then t-node ascending
    bool degraded = false;           // some mollifier fell below the lattice (delta)
};

// Ball kernel Omega(u')/|u| on 0 < |u| <= radius, cell-mean valued (shared by
// the spectral operator path and the direct-sum reference oracle, which must
// agree on the discrete kernel to isolate the operator plumbing).
inline SampledField build_ball_kernel(const AngularKernel& omega, double radius,
                                      const GridSpec& g) {
    require(radius >= 2.0 * g.h() - 1e-12,
            strf("build_ball_kernel: radius %g unresolvable (2h = %g)", radius, 2.0 * g.h()));
    return sample_offset_kernel_avg(
        g,
        [&](double u1, double u2) { return std::hypot(u1, u2) <= radius; },
        [&](double u1, double u2) {
            return evaluate_homogeneous(omega, u1, u2) / std::hypot(u1, u2);
        });
}

// kind = ball: B_{j,m}(u) = Omega(u') / |u| on 0 < |u| <= 2^j s_m with
//   coefficient 2^{-2j} w_m / s_m^3  (the t -> 2^j s substitution of the
//   continuous square function);
// kind = annulus: K_{s_m}^j with coefficient w_m;
// kind = smoothed: K_{s_m}^j * phi_{j-l} with coefficient w_m.
inline KernelFamily build_family(const AngularKernel& omega, const GridSpec& g,
                                 const QuadratureSpec& quad, FamilyKind kind, int l = 0) {
    g.validate();
    quad.validate(g);
    omega.validate();
    if (kind == FamilyKind::smoothed)
        require(l >= 1, strf("build_family: smoothing level l must be >= 1, got %d", l));
    KernelFamily fam;
    fam.kind = kind;
    fam.omega_id = omega.id;
    fam.l = (kind == FamilyKind::smoothed) ? l : 0;
    fam.quad = quad;
    for (int j = quad.j_min; j <= quad.j_max; ++j)
        for (size_t m = 0; m < quad.t_nodes.size(); ++m) {
            double s = quad.t_nodes[m], w = quad.t_weights[m];
            ScaleKernel term;
            term.j = j;
            term.t = s;
            if (kind == FamilyKind::ball) {
                term.k = build_ball_kernel(omega, std::ldexp(s, j), g);
                term.coeff = std::ldexp(w / (s * s * s), -2 * j);
            } else {
                TruncatedKernel K = build_k_jt(omega, j, s, g);
                if (kind == FamilyKind::annulus) {
                    term.k = K.field;
                } else {
                    bool deg = false;
                    term.k = smooth_kernel_relaxed(K, l, &deg);
                    fam.degraded = fam.degraded || deg;
                }
                term.coeff = w;
            }
            fam.terms.push_back(std::move(term));
        }
    return fam;
}

// out(x) = sqrt( sum over terms with j <= j_cap of coeff * (k * f)(x)^2 ).
inline SampledField evaluate_family(const KernelFamily& fam, const SampledField& f,
                                    int j_cap, int threads = 1) {
    std::vector<const ScaleKernel*> active;
    for (const auto& term : fam.terms)
        if (term.j <= j_cap) active.push_back(&term);
    SampledField out;
    out.grid = f.grid;
    out.v.assign(f.grid.cells(), 0.0);
    if (active.empty()) return out;
    std::vector<SampledField> conv(active.size());
    parallel_for(active.size(), threads, [&](size_t i) {
        conv[i] = spectral_convolve(f, active[i]->k);
    });
    for (size_t i = 0; i < active.size(); ++i) {  // fixed scale-then-node order
        double c = active[i]->coeff;
        for (size_t idx = 0; idx < out.v.size(); ++idx) {
            double v = conv[i].v[idx];
            out.v[idx] += c * v * v;
        }
    }
    for (double& v : out.v) v = std::sqrt(v);
    return out;
}

/* ---------------- the operators ---------------- */

// F_{Omega,t} f(x) = integral over |x-y| <= t of Omega((x-y)')/|x-y| f(y) dy.
inline SampledField f_omega_t(const AngularKernel& omega, const SampledField& f, double t) {
    const GridSpec& g = f.grid;
    g.validate();
    require(t >= 2.0 * g.h() - 1e-12,
            strf("f_omega_t: radius t = %g unresolvable (2h = %g)", t, 2.0 * g.h()));
    return spectral_convolve(f, build_ball_kernel(omega, t, g));
}

namespace detail {
inline void require_half_box(const SampledField& f) {
    double rf = scene_support_radius(f);
    require(rf <= f.grid.L / 2.0 + 1e-9,
            strf("operator input must be supported in the inner half-box "
                 "(support radius %g > L/2 = %g)", rf, f.grid.L / 2.0));
}
}  // namespace detail

// The full square function: discretizes (int_0^inf |F_{Omega,t}f|^2 dt/t^3)^{1/2}
// by t -> 2^j s, s in [1,2] over the quadrature window.
inline SquareFunctionOutput marcinkiewicz(const AngularKernel& omega, const SampledField& f,
                                          const QuadratureSpec& quad, int threads = 1) {
    detail::require_half_box(f);
    KernelFamily fam = build_family(omega, f.grid, quad, FamilyKind::ball);
    SquareFunctionOutput out;
    out.field = evaluate_family(fam, f, quad.j_max, threads);
    out.op = "marc";
    out.omega_id = omega.id;
    out.quad = quad;
    return out;
}

// The dyadic square function (int_1^2 sum_j |K_t^j * f|^2 dt)^{1/2}.
inline SquareFunctionOutput marcinkiewicz_dyadic(const AngularKernel& omega,
                                                 const SampledField& f,
                                                 const QuadratureSpec& quad, int threads = 1) {
    detail::require_half_box(f);
    KernelFamily fam = build_family(omega, f.grid, quad, FamilyKind::annulus);
    SquareFunctionOutput out;
    out.field = evaluate_family(fam, f, quad.j_max, threads);
    out.op = "marc-dyadic";
    out.omega_id = omega.id;
    out.quad = quad;
    return out;
}

// Scale-restricted mollified square function: the sum runs over j <= j0.
// j0 below the window gives the zero field; j0 is capped at j_max above it.
inline SquareFunctionOutput scale_restricted(const AngularKernel& omega, const SampledField& f,
                                             int l, int j0, const QuadratureSpec& quad,
                                             int threads = 1) {
    detail::require_half_box(f);
    KernelFamily fam = build_family(omega, f.grid, quad, FamilyKind::smoothed, l);
    SquareFunctionOutput out;
    out.field = evaluate_family(fam, f, std::min(j0, quad.j_max), threads);
    out.op = "marc-restricted";
    out.omega_id = omega.id;
    out.l = l;
    out.quad = quad;
    return out;
}

// The mollified square function == scale_restricted with the full window
// (shared code path, so the two agree bit for bit at j0 = j_max).
inline SquareFunctionOutput marcinkiewicz_mollified(const AngularKernel& omega,
                                                    const SampledField& f, int l,
                                                    const QuadratureSpec& quad,
                                                    int threads = 1) {
    SquareFunctionOutput out = scale_restricted(omega, f, l, quad.j_max, quad, threads);
    out.op = "marc-l";
    return out;
}

/* ---------------- grand maximal operator ---------------- */

// S^l f(x) = max over bank cubes Q containing x, over the 3^n lattice probes
// xi of Q, of M-tilde^l(f restricted off 3Q)(xi).  The off-3Q square function
// at a probe is evaluated as (full convolution at xi) minus (direct sum of
// kernel against f on 3Q), so the full fields are convolved once per term.
inline SampledField grand_maximal(const AngularKernel& omega, const SampledField& f, int l,
                                  const std::vector<Cube>& cube_bank,
                                  const QuadratureSpec& quad, int threads = 1) {
    const GridSpec& g = f.grid;
    detail::require_half_box(f);
    require(!cube_bank.empty(), "grand_maximal: empty cube bank");
    for (const Cube& c : cube_bank)
        require(!c.empty() && c.side >= 4.0 * g.h() - 1e-12,
                strf("grand_maximal: bank cube with side %g < 4h", c.side));

    KernelFamily fam = build_family(omega, g, quad, FamilyKind::smoothed, l);
    std::vector<SampledField> conv(fam.terms.size());
    parallel_for(fam.terms.size(), threads, [&](size_t i) {
        conv[i] = spectral_convolve(f, fam.terms[i].k);
    });

    const int N = g.N, o = N / 2;
    const double h = g.h(), h2 = h * h;
    std::vector<double> cube_val(cube_bank.size(), 0.0);

    parallel_for(cube_bank.size(), threads, [&](size_t ci) {
        const Cube& Q = cube_bank[ci];
        Cube Q3 = make_cube(g, Q.x0 - Q.side, Q.y0 - Q.side, 3.0 * Q.side);
        double best = 0.0;
        for (int py = 0; py < 3; ++py)
            for (int px = 0; px < 3; ++px) {
                // probe = cube lattice point snapped to the nearest in-cube cell
                double gx = Q.x0 + 0.5 * px * Q.side, gy = Q.y0 + 0.5 * py * Q.side;
                int kx = std::min(std::max(int(std::floor((gx + g.L) / h)), Q.kx0), Q.kx1);
                int ky = std::min(std::max(int(std::floor((gy + g.L) / h)), Q.ky0), Q.ky1);
                double sq = 0.0;
                for (size_t i = 0; i < fam.terms.size(); ++i) {
                    // direct kernel sum against f on 3Q
                    double local = 0.0;
                    const SampledField& K = fam.terms[i].k;
                    for (int yy = Q3.ky0; yy <= Q3.ky1; ++yy) {
                        int dy = ky - yy + o;
                        if (dy < 0 || dy >= N) continue;
                        for (int xx = Q3.kx0; xx <= Q3.kx1; ++xx) {
                            int dx = kx - xx + o;
                            if (dx < 0 || dx >= N) continue;
                            double fv = f.at(xx, yy);
                            if (fv != 0.0) local += K.at(dx, dy) * fv;
                        }
                    }
                    double val = conv[i].v[size_t(ky) * N + kx] - local * h2;
                    sq += fam.terms[i].coeff * val * val;
                }
                best = std::max(best, std::sqrt(sq));
            }
        cube_val[ci] = best;
    });

    SampledField out;
    out.grid = g;
    out.v.assign(g.cells(), 0.0);
    for (size_t ci = 0; ci < cube_bank.size(); ++ci) {
        const Cube& Q = cube_bank[ci];
        for (int ky = Q.ky0; ky <= Q.ky1; ++ky)
            for (int kx = Q.kx0; kx <= Q.kx1; ++kx) {
                double& v = out.v[size_t(ky) * N + kx];
                if (cube_val[ci] > v) v = cube_val[ci];
            }
    }
    return out;
}

// Default bank for the grand maximal operator: all nine grids, sides in
// [8h, L/4].
inline std::vector<Cube> grand_maximal_bank(const GridSpec& g) {
    CubeBank bank;
    append_dyadic_cubes(bank, g, 8.0 * g.h(), g.L / 4.0);
    return bank.cubes;
}

/* ---------------- singular integral and maximal operators ---------------- */

// T_Omega f(x) = integral over eps < |y| < R of Omega(y')/|y|^2 f(x-y) dy.
inline SampledField rough_singular_integral(const AngularKernel& omega, const SampledField& f,
                                            double eps, double R) {
    const GridSpec& g = f.grid;
    g.validate();
    require(eps >= 2.0 * g.h() - 1e-12 && eps < R && R <= g.L / 2.0 + 1e-12,
            strf("rough_singular_integral: need 2h <= eps < R <= L/2, got eps = %g, R = %g "
                 "(h = %g, L = %g)", eps, R, g.h(), g.L));
    SampledField k = sample_offset_kernel_avg(
        g,
        [&](double u1, double u2) {
            double r = std::hypot(u1, u2);
            return r > eps && r < R;
        },
        [&](double u1, double u2) {
            double r2 = u1 * u1 + u2 * u2;
            return evaluate_homogeneous(omega, u1, u2) / r2;
        });
    return spectral_convolve(f, k);
}

// M_{r} f = (M(|f|^r))^{1/r}.
inline SampledField mq_maximal(const SampledField& f, double r) {
    require(r > 1.0, strf("mq_maximal: r must be > 1, got %g", r));
    SampledField p;
    p.grid = f.grid;
    p.v.resize(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i) p.v[i] = std::pow(std::fabs(f.v[i]), r);
    SampledField m = hl_maximal(p);
    for (double& v : m.v) v = std::pow(v, 1.0 / r);
    return m;
}

// M_Omega f(x) = sup over the radius ladder r in {4h, 8h, ..., <= L/2} of
// (1/(pi r^2)) * integral over |y| <= r of |Omega(y')| |f(x-y)| dy.
inline SampledField omega_maximal(const AngularKernel& omega, const SampledField& f,
                                  int threads = 1) {
    const GridSpec& g = f.grid;
    g.validate();
    SampledField absf;
    absf.grid = g;
    absf.v.resize(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);

    std::vector<double> radii;
    for (double r = 4.0 * g.h(); r <= g.L / 2.0 + 1e-12; r *= 2.0) radii.push_back(r);
    require(!radii.empty(), "omega_maximal: no resolvable radius (grid too coarse)");

    std::vector<SampledField> avgs(radii.size());
    parallel_for(radii.size(), threads, [&](size_t i) {
        double r = radii[i];
        SampledField k = sample_offset_kernel_avg(
            g,
            [&](double u1, double u2) { return std::hypot(u1, u2) <= r; },
            [&](double u1, double u2) {
                return std::fabs(evaluate_homogeneous(omega, u1, u2));
            },
            4, /*zero_origin=*/false);
        avgs[i] = spectral_convolve(absf, k);
        double inv = 1.0 / (M_PI * r * r);
        for (double& v : avgs[i].v) v *= inv;
    });

    SampledField out;
    out.grid = g;
    out.v.assign(g.cells(), 0.0);
    for (const auto& a : avgs)
        for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::max(out.v[i], a.v[i]);
    return out;
}

}  // namespace mz
