#pragma once

// regress_checks.hpp -- the registry of named regression checks.  Each check
// computes one scalar at a pinned configuration using only deterministic code
// paths (fixed seeds, fixed accumulation order), so golden values reproduce
// bit-for-bit on a given toolchain and within rel_tol across toolchains.

#include <functional>

#include "experiments.hpp"
#include "reference.hpp"

namespace mz {

struct RegressCheck {
    std::string name;
    double rel_tol;
    std::function<double()> eval;
};

inline std::vector<RegressCheck> regress_checks() {
    std::vector<RegressCheck> out;
    auto add = [&](const std::string& name, double tol, std::function<double()> fn) {
        out.push_back({name, tol, std::move(fn)});
    };

    add("sphere.cos.l2", 1e-12, [] {
        return lq_sphere_norm(make_bank_kernel("cos"), 2.0);
    });
    add("sphere.sing-q2.mass", 1e-12, [] {
        return l1_sphere_mass(make_bank_kernel("sing-q2"));
    });
    add("kernel.cos.j0.mass", 1e-10, [] {
        GridSpec g = make_grid(256, 8.0);
        return kernel_l1_mass(build_k_jt(make_bank_kernel("cos"), 0, 1.5, g));
    });
    add("kernel.mollifier.l1.moment", 1e-10, [] {
        GridSpec g = make_grid(256, 8.0);
        return mollifier_first_moment(build_mollifier(1, g));
    });
    add("marc.cos.disk.l2.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        return lp_norm(marcinkiewicz(make_bank_kernel("cos"), make_scene("disk", g),
                                     default_quadrature(g))
                           .field,
                       2.0);
    });
    add("marc-dyadic.cos.gaussian.l2.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        return lp_norm(marcinkiewicz_dyadic(make_bank_kernel("cos"),
                                            make_scene("gaussian", g), default_quadrature(g))
                           .field,
                       2.0);
    });
    add("marc-l.cos.disk.l2.n256", 1e-8, [] {
        GridSpec g = make_grid(256, 8.0);
        return lp_norm(marcinkiewicz_mollified(make_bank_kernel("cos"), make_scene("disk", g),
                                               2, default_quadrature(g))
                           .field,
                       2.0);
    });
    add("tsing.step.disk.l2.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        return lp_norm(rough_singular_integral(make_bank_kernel("step"),
                                               make_scene("disk", g), 4.0 * g.h(), g.L / 2.0),
                       2.0);
    });
    add("hl.two-bump.l2.n128", 1e-10, [] {
        GridSpec g = make_grid(128, 8.0);
        return lp_norm(hl_maximal(make_scene("two-bump", g)), 2.0);
    });
    add("grand.cos.disk.max.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        SampledField gm = grand_maximal(make_bank_kernel("cos"), make_scene("disk", g), 1,
                                        grand_maximal_bank(g), default_quadrature(g));
        return lp_norm(gm, kInfP);
    });
    add("weights.ap.a1.p2.n128", 1e-10, [] {
        GridSpec g = make_grid(128, 8.0);
        return ap_constant(power_weight(1.0, g, 2.0), 2.0, standard_cube_bank(g));
    });
    add("weights.ainf.a1.n128", 1e-10, [] {
        GridSpec g = make_grid(128, 8.0);
        return ainf_constant(power_weight(1.0, g, 2.0), g);
    });
    add("weights.tail.s11", 1e-12, [] { return tail_sum_check(1.0, 1.0).S; });
    add("cz.good.max.disk.n128", 1e-10, [] {
        GridSpec g = make_grid(128, 8.0);
        SampledField f = make_scene("two-bump", g);
        Sat s = build_sat(f, 1.0);
        double avg = s.sum(0, g.N - 1, 0, g.N - 1) / double(g.cells());
        CZDecomposition cz = cz_decompose(f, 3.0 * avg, build_grids()[0]);
        return lp_norm(cz.good, kInfP);
    });
    add("sparse.dom.cos.disk.l2.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        return sparse_domination_check(make_bank_kernel("cos"), make_scene("disk", g), 2, 0.5,
                                       default_quadrature(g))
            .constant;
    });
    add("weak11.cos.spike.l2.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        return weak11_check(make_bank_kernel("cos"), make_scene("spike", g), 2,
                            {0.5, 1.0, 2.0, 4.0}, default_quadrature(g))
            .max_value;
    });
    add("lemma21.lhs.a05.n128", 1e-8, [] {
        GridSpec g = make_grid(128, 8.0);
        SampledField f = make_scene("two-bump", g);
        SparseFamily S = build_sparse_family(f, build_grids()[0], 0.5);
        Weight w = power_weight(0.5, g, 2.0);
        return lemma21_bound_check(S, f, w, 2.0, 1.5, standard_cube_bank(g)).lhs;
    });
    add("fourier.tail.cos.j0.n256", 1e-6, [] {
        GridSpec g = make_grid(256, 8.0);
        DecayProfile p = decay_profile(make_bank_kernel("cos"), 0, 1.5, g);
        return profile_tail_slope(p, 2.0, 1e9);
    });
    add("fourier.collapse.cos.j1.n256", 1e-6, [] {
        GridSpec g = make_grid(256, 8.0);
        return symbol_collapse_check(make_bank_kernel("cos"), 1, 1.5, g).rel_l2;
    });
    add("regularity.cos.ratio", 1e-8, [] {
        GridSpec g = make_grid(256, 8.0);
        double h = g.h();
        RegularityResult r = regularity_sum_check(make_bank_kernel("cos"), 2, 1.0, h, 0.0, 0,
                                                  g, gauss_legendre_12(4), 4.0);
        return r.ratio;
    });
    add("approx.theta.cos.n512", 1e-6, [] {
        GridSpec g = make_grid(512, 8.0);
        QuadratureSpec quad = quadrature_with_range(g, 1, 1);
        ApproxDecayResult r = approximation_decay(make_bank_kernel("cos"),
                                                  make_scene("disk", g), {1, 2}, quad);
        return r.theta_hat;
    });

    return out;
}

}  // namespace mz
