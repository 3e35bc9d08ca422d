// Square-function, maximal, and truncated singular-integral operators:
// oracle agreement at coarse resolution, closed-form single-scale response,
// norm equivalence of the ball and annulus forms, smoothing-level
// monotonicity, weak-type behaviour of the grand maximal operator, and the
// contract guards shared by the whole operator set.
#include "helpers.hpp"

namespace {

mz::AngularKernel constant_omega(bool projected_flag) {
    mz::AngularKernel one;
    one.samples.assign(2048, 1.0);
    one.projected = projected_flag;
    one.id = "one";
    return one;
}

mz::SampledField disk_indicator(const mz::GridSpec& g, double radius) {
    return mz::sample(g, [radius](double x, double y) {
        return (x * x + y * y <= radius * radius) ? 1.0 : 0.0;
    });
}

double l2_gap(const mz::SampledField& a, const mz::SampledField& b) {
    mz::SampledField d(a.grid);
    for (size_t i = 0; i < d.v.size(); ++i) d.v[i] = a.v[i] - b.v[i];
    return mz::lp_norm(d, 2.0);
}

}  // namespace

TEST_CASE("fast square functions match the direct-sum evaluation at coarse resolution") {
    mz::GridSpec g = mz::make_grid(64, 8.0);
    mz::QuadratureSpec quad = mz::quadrature_with_range(g, 0, 1, 4);
    struct Pair { const char* omega; const char* scene; };
    for (Pair p : {Pair{"cos", "disk"}, Pair{"sing-q2", "two-bump"}}) {
        mz::AngularKernel o = mz::make_bank_kernel(p.omega);
        mz::SampledField f = mz::make_scene(p.scene, g);
        mz::SampledField fast = mz::marcinkiewicz(o, f, quad).field;
        mz::SampledField ref = mz::reference_marcinkiewicz(o, f, quad);
        double rel = l2_gap(fast, ref) / mz::lp_norm(ref, 2.0);
        INFO(p.omega << " on " << p.scene);
        REQUIRE(rel <= 1e-12);  // far inside the 5% agreement contract
        REQUIRE(rel <= 0.05);
    }
}

TEST_CASE("dyadic and continuous square functions are norm-equivalent on the banks") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::SceneBank scenes = mz::norm_scene_bank(g, 20240801, 2);
    REQUIRE(scenes.size() == 10);
    double lo = 1e18, hi = 0.0;
    for (const char* name : {"cos", "sin3", "step", "sing-q2", "sing-q4"}) {
        mz::AngularKernel o = mz::make_bank_kernel(name);
        for (const auto& [scene_name, f] : scenes) {
            double dyadic = mz::lp_norm(mz::marcinkiewicz_dyadic(o, f, quad).field, 2.0);
            double ball = mz::lp_norm(mz::marcinkiewicz(o, f, quad).field, 2.0);
            INFO(name << " on " << scene_name);
            REQUIRE(ball > 0.0);
            double r = dyadic / ball;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    REQUIRE(lo >= 0.25);
    REQUIRE(hi <= 4.0);
}

TEST_CASE("single-scale response to a radial indicator matches the closed form") {
    // Constant angular part, annulus scene 4.5 < |x| < 5.5, one dyadic scale:
    // at the origin every t-node sees the exact shell overlap, so the squared
    // output is a plain quadrature sum with hit length min(4s, 5.5) - 4.5.
    mz::GridSpec g = mz::make_grid(256, 16.0);
    mz::AngularKernel one = constant_omega(true);
    mz::QuadratureSpec quad = mz::quadrature_with_range(g, 2, 2, 4);
    mz::SampledField f = mz::sample(g, [](double x, double y) {
        double r = std::hypot(x, y);
        return (r > 4.5 && r < 5.5) ? 1.0 : 0.0;
    });
    mz::SquareFunctionOutput M = mz::marcinkiewicz(one, f, quad);
    double sq = 0.0;
    for (size_t m = 0; m < quad.t_nodes.size(); ++m) {
        double s = quad.t_nodes[m];
        double hit = std::max(0.0, std::min(4.0 * s, 5.5) - 4.5);
        double F = 2.0 * M_PI * hit;
        sq += quad.t_weights[m] / (s * s * s) / 16.0 * F * F;
    }
    double expect = std::sqrt(sq);
    double got = M.field.at(g.N / 2, g.N / 2);
    REQUIRE(expect > 0.0);
    REQUIRE(std::fabs(got - expect) / expect <= 0.03);
}

TEST_CASE("scales that cannot reach the scene contribute nothing near the origin") {
    // Scene supported on |y| in [4.6, 7.4]; j = 1 annuli reach at most radius
    // 4, so near the origin the j = 2 partial sum already equals the full sum.
    mz::GridSpec g = mz::make_grid(256, 16.0);
    mz::SampledField f = mz::sample(g, [](double x, double y) {
        double d = (std::hypot(x, y) - 6.0) / 1.4;
        return (d * d >= 1.0) ? 0.0 : std::exp(-1.0 / (1.0 - d * d));
    });
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField full =
        mz::marcinkiewicz_dyadic(o, f, mz::quadrature_with_range(g, 1, 2, 4)).field;
    mz::SampledField top =
        mz::marcinkiewicz_dyadic(o, f, mz::quadrature_with_range(g, 2, 2, 4)).field;
    double num = 0.0, den = 0.0;
    int cells = 0;
    for (int ky = 0; ky < g.N; ++ky)
        for (int kx = 0; kx < g.N; ++kx) {
            if (std::hypot(g.coord(kx), g.coord(ky)) > 0.4) continue;
            ++cells;
            double va = full.v[size_t(ky) * g.N + kx];
            double vb = top.v[size_t(ky) * g.N + kx];
            num += (va - vb) * (va - vb);
            den += va * va;
        }
    REQUIRE(cells == 32);
    REQUIRE(den > 0.0);
    REQUIRE(std::sqrt(num / den) <= 1e-12);  // well inside the 1% contract
}

TEST_CASE("local generator vanishes deep inside a plateau and rejects tiny radii") {
    mz::GridSpec g = mz::make_grid(256, 8.0);
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField f = disk_indicator(g, 3.0);
    for (double t : {0.5, 1.0, 2.0}) {
        mz::SampledField F = mz::f_omega_t(o, f, t);
        double lim = 3.0 - t - 4.0 * g.h();
        double worst = 0.0;
        for (int ky = 0; ky < g.N; ++ky)
            for (int kx = 0; kx < g.N; ++kx) {
                double x = g.coord(kx), y = g.coord(ky);
                if (x * x + y * y <= lim * lim)
                    worst = std::max(worst, std::fabs(F.v[size_t(ky) * g.N + kx]));
            }
        INFO("t = " << t);
        REQUIRE(worst <= 1e-6);
    }
    REQUIRE_THROWS_AS(mz::f_omega_t(o, f, 0.5 * g.h()), mz::contract_error);
}

TEST_CASE("square functions are positively homogeneous and sublinear") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("step");
    mz::SampledField f = mz::make_scene("disk", g);
    mz::SampledField q = mz::make_scene("two-bump", g);

    mz::SampledField Mf = mz::marcinkiewicz_dyadic(o, f, quad).field;
    mz::SampledField f3(g);
    for (size_t i = 0; i < f3.v.size(); ++i) f3.v[i] = 3.0 * f.v[i];
    mz::SampledField Mf3 = mz::marcinkiewicz_dyadic(o, f3, quad).field;
    double scale = mz::lp_norm(Mf, mz::kInfP);
    REQUIRE(scale > 0.0);
    for (size_t i = 0; i < Mf.v.size(); ++i)
        REQUIRE(std::fabs(Mf3.v[i] - 3.0 * Mf.v[i]) <= 1e-12 * scale);

    mz::SampledField s(g);
    for (size_t i = 0; i < s.v.size(); ++i) s.v[i] = f.v[i] + q.v[i];
    mz::SampledField Ms = mz::marcinkiewicz_dyadic(o, s, quad).field;
    mz::SampledField Mq = mz::marcinkiewicz_dyadic(o, q, quad).field;
    for (size_t i = 0; i < Ms.v.size(); ++i)
        REQUIRE(Ms.v[i] <= Mf.v[i] + Mq.v[i] + 1e-8);

    mz::SampledField G1 = mz::grand_maximal(o, s, 1, mz::grand_maximal_bank(g), quad);
    mz::SampledField G2 = mz::grand_maximal(o, f, 1, mz::grand_maximal_bank(g), quad);
    mz::SampledField G3 = mz::grand_maximal(o, q, 1, mz::grand_maximal_bank(g), quad);
    for (size_t i = 0; i < G1.v.size(); ++i)
        REQUIRE(G1.v[i] <= G2.v[i] + G3.v[i] + 1e-8);
}

TEST_CASE("operator inputs must stay inside the inner half-box") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField f = mz::sample(g, [&](double x, double y) {
        return (std::hypot(x - 0.7 * g.L, y) <= 0.5) ? 1.0 : 0.0;
    });
    REQUIRE_THROWS_MATCHES(mz::marcinkiewicz(o, f, quad), mz::contract_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("inner half-box")));
    REQUIRE_THROWS_AS(mz::marcinkiewicz_dyadic(o, f, quad), mz::contract_error);
    REQUIRE_THROWS_AS(mz::marcinkiewicz_mollified(o, f, 1, quad), mz::contract_error);
    REQUIRE_THROWS_AS(mz::grand_maximal(o, f, 1, mz::grand_maximal_bank(g), quad),
                      mz::contract_error);
}

TEST_CASE("zero input maps to the zero field across the operator set") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("sin3");
    mz::SampledField z(g);
    REQUIRE(tst::max_abs(mz::marcinkiewicz(o, z, quad).field) == 0.0);
    REQUIRE(tst::max_abs(mz::marcinkiewicz_dyadic(o, z, quad).field) == 0.0);
    REQUIRE(tst::max_abs(mz::marcinkiewicz_mollified(o, z, 2, quad).field) == 0.0);
    REQUIRE(tst::max_abs(mz::grand_maximal(o, z, 1, mz::grand_maximal_bank(g), quad)) == 0.0);
    REQUIRE(tst::max_abs(mz::rough_singular_integral(o, z, 4.0 * g.h(), 2.0)) == 0.0);
    REQUIRE(tst::max_abs(mz::mq_maximal(z, 2.0)) == 0.0);
    REQUIRE(tst::max_abs(mz::omega_maximal(o, z)) == 0.0);
}

TEST_CASE("scale restriction reproduces the mollified operator at full range") {
    mz::GridSpec g = mz::make_grid(256, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("sin3");
    mz::SampledField f = mz::make_scene("annulus-bump", g);

    mz::SquareFunctionOutput moll = mz::marcinkiewicz_mollified(o, f, 2, quad);
    mz::SquareFunctionOutput top = mz::scale_restricted(o, f, 2, quad.j_max, quad);
    REQUIRE(moll.field.v.size() == top.field.v.size());
    REQUIRE(std::memcmp(moll.field.v.data(), top.field.v.data(),
                        moll.field.v.size() * sizeof(double)) == 0);
    REQUIRE(moll.op == "marc-l");
    REQUIRE(top.op == "marc-restricted");

    mz::SquareFunctionOutput below = mz::scale_restricted(o, f, 2, quad.j_min - 1, quad);
    REQUIRE(tst::max_abs(below.field) == 0.0);

    // The partial sum of squares grows with the scale cap.
    mz::SquareFunctionOutput mid = mz::scale_restricted(o, f, 2, quad.j_min, quad);
    for (size_t i = 0; i < mid.field.v.size(); ++i)
        REQUIRE(mid.field.v[i] <= moll.field.v[i] + 1e-12);
    REQUIRE(l2_gap(mid.field, moll.field) / mz::lp_norm(moll.field, 2.0) > 1e-6);
}

TEST_CASE("distance from the mollified to the dyadic operator shrinks with the level") {
    mz::GridSpec g = mz::make_grid(256, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::SampledField f = mz::make_scene("two-bump", g);
    for (const char* name : {"cos", "step"}) {
        mz::AngularKernel o = mz::make_bank_kernel(name);
        mz::SampledField dyadic = mz::marcinkiewicz_dyadic(o, f, quad).field;
        std::vector<double> err;
        for (int l = 1; l <= 5; ++l)
            err.push_back(l2_gap(dyadic, mz::marcinkiewicz_mollified(o, f, l, quad).field));
        INFO(name);
        REQUIRE(err[0] > 0.0);
        for (size_t i = 1; i < err.size(); ++i) REQUIRE(err[i] <= 1.10 * err[i - 1]);
        REQUIRE(err.back() <= 0.5 * err.front());
    }
}

TEST_CASE("grand maximal operator obeys a weak-type bound growing at most linearly") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField f = mz::make_scene("two-bump", g);
    double f1 = mz::lp_norm(f, 1.0);
    double h2 = g.h() * g.h();
    for (int l : {1, 2}) {
        mz::SampledField G = mz::grand_maximal(o, f, l, mz::grand_maximal_bank(g), quad);
        for (double v : G.v) REQUIRE(v >= 0.0);
        double mx = mz::lp_norm(G, mz::kInfP);
        REQUIRE(mx > 0.0);
        double worst = 0.0;
        for (double frac : {0.05, 0.1, 0.2, 0.4, 0.7}) {
            double lam = mx * frac;
            long cnt = 0;
            for (double v : G.v)
                if (v > lam) ++cnt;
            worst = std::max(worst, lam * double(cnt) * h2 / f1);
        }
        INFO("l = " << l);
        REQUIRE(worst <= 3.5 * l);
    }
}

TEST_CASE("grand maximal operator validates its cube bank") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::QuadratureSpec quad = mz::default_quadrature(g, 4);
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField f = mz::make_scene("disk", g);
    REQUIRE_THROWS_MATCHES(mz::grand_maximal(o, f, 1, {}, quad), mz::contract_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("empty cube bank")));
    std::vector<mz::Cube> tiny = {mz::make_cube(g, 0.0, 0.0, 2.0 * g.h())};
    REQUIRE_THROWS_MATCHES(mz::grand_maximal(o, f, 1, tiny, quad), mz::contract_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("4h")));
}

TEST_CASE("truncated singular integral: guards, cancellation, truncation stability") {
    mz::GridSpec g = mz::make_grid(256, 8.0);
    mz::AngularKernel o = mz::make_bank_kernel("cos");
    mz::SampledField f = disk_indicator(g, 3.0);
    double h = g.h();

    SECTION("truncation guards") {
        REQUIRE_THROWS_MATCHES(
            mz::rough_singular_integral(o, f, h, 2.0), mz::contract_error,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("2h <= eps < R <= L/2")));
        REQUIRE_THROWS_AS(mz::rough_singular_integral(o, f, 2.0, 1.0), mz::contract_error);
        REQUIRE_THROWS_AS(mz::rough_singular_integral(o, f, 4.0 * h, 0.75 * g.L),
                          mz::contract_error);
    }

    SECTION("cancellation deep inside a plateau") {
        for (double R : {1.0, 2.0}) {
            mz::SampledField T = mz::rough_singular_integral(o, f, 4.0 * h, R);
            double lim = 3.0 - R - 4.0 * h;
            double worst = 0.0;
            for (int ky = 0; ky < g.N; ++ky)
                for (int kx = 0; kx < g.N; ++kx) {
                    double x = g.coord(kx), y = g.coord(ky);
                    if (x * x + y * y <= lim * lim)
                        worst = std::max(worst, std::fabs(T.v[size_t(ky) * g.N + kx]));
                }
            INFO("R = " << R);
            REQUIRE(worst <= 1e-6);
        }
    }

    SECTION("inner-radius refinement is stable on a smooth scene") {
        mz::GridSpec gf = mz::make_grid(1024, 8.0);
        mz::SampledField smooth = mz::make_scene("gaussian", gf);
        mz::SampledField a = mz::rough_singular_integral(o, smooth, 8.0 * gf.h(), gf.L / 2.0);
        mz::SampledField b = mz::rough_singular_integral(o, smooth, 4.0 * gf.h(), gf.L / 2.0);
        REQUIRE(l2_gap(a, b) / mz::lp_norm(b, 2.0) <= 0.05);
    }
}

TEST_CASE("power-mean maximal dominates the plain maximal and rejects r <= 1") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::SampledField f = mz::make_scene("two-bump", g);
    mz::SampledField absf(g);
    for (size_t i = 0; i < absf.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);
    mz::SampledField base = mz::hl_maximal(absf);
    for (double r : {1.5, 2.0}) {
        mz::SampledField m = mz::mq_maximal(f, r);
        for (size_t i = 0; i < m.v.size(); ++i) REQUIRE(m.v[i] >= base.v[i] - 1e-12);
    }
    mz::SampledField c(g);
    for (double& v : c.v) v = -1.3;
    mz::SampledField mc = mz::mq_maximal(c, 2.0);
    for (double v : mc.v) REQUIRE(v == Catch::Approx(1.3).margin(1e-12));
    REQUIRE_THROWS_AS(mz::mq_maximal(f, 1.0), mz::contract_error);
    REQUIRE_THROWS_AS(mz::mq_maximal(f, 0.5), mz::contract_error);
}

TEST_CASE("omega-weighted maximal: ball comparability for constant omega, homogeneity") {
    mz::GridSpec g = mz::make_grid(128, 8.0);
    mz::AngularKernel one = constant_omega(false);

    SECTION("comparable to a dense-ladder ball maximal within [1/4, 4]") {
        double h = g.h();
        for (const char* scene : {"disk", "two-bump", "gaussian"}) {
            mz::SampledField f = mz::make_scene(scene, g);
            mz::SampledField om = mz::omega_maximal(one, f);
            mz::SampledField absf(g);
            for (size_t i = 0; i < absf.v.size(); ++i) absf.v[i] = std::fabs(f.v[i]);
            mz::SampledField ref(g);
            for (int k = 0;; ++k) {
                double r = 4.0 * h * std::pow(2.0, 0.5 * k);
                if (r > g.L / 2.0) break;
                mz::SampledField ball = mz::sample_offset_kernel_avg(
                    g, [&](double x, double y) { return std::hypot(x, y) <= r; },
                    [](double, double) { return 1.0; }, 4, false);
                double mass = 0.0;
                for (double v : ball.v) mass += v;
                mass *= h * h;
                mz::SampledField avg = mz::spectral_convolve(absf, ball);
                for (size_t i = 0; i < ref.v.size(); ++i)
                    ref.v[i] = std::max(ref.v[i], avg.v[i] / mass);
            }
            double top = mz::lp_norm(ref, mz::kInfP);
            REQUIRE(top > 0.0);
            long used = 0;
            for (size_t i = 0; i < om.v.size(); ++i) {
                if (ref.v[i] <= 1e-9 * top) continue;
                ++used;
                double ratio = om.v[i] / ref.v[i];
                INFO(scene << " cell " << i);
                REQUIRE(ratio >= 0.25);
                REQUIRE(ratio <= 4.0);
            }
            REQUIRE(used > 1000);
        }
    }

    SECTION("homogeneity under scaling by -3") {
        mz::SampledField f = mz::make_scene("two-bump", g);
        mz::SampledField f3(g);
        for (size_t i = 0; i < f3.v.size(); ++i) f3.v[i] = -3.0 * f.v[i];
        mz::SampledField a = mz::omega_maximal(one, f);
        mz::SampledField b = mz::omega_maximal(one, f3);
        double scale = mz::lp_norm(a, mz::kInfP);
        REQUIRE(scale > 0.0);
        for (size_t i = 0; i < a.v.size(); ++i)
            REQUIRE(std::fabs(b.v[i] - 3.0 * a.v[i]) <= 1e-12 * scale);
    }
}

TEST_CASE("L2 gain of the dyadic square function is stable under grid refinement") {
    // Same physical scene and the same scale window on both grids.
    double ratio[2];
    int idx = 0;
    for (int N : {128, 256}) {
        mz::GridSpec g = mz::make_grid(N, 8.0);
        mz::QuadratureSpec quad = mz::quadrature_with_range(g, 1, 1, 4);
        mz::AngularKernel o = mz::make_bank_kernel("cos");
        mz::SampledField f = mz::make_scene("gaussian", g);
        ratio[idx++] = mz::lp_norm(mz::marcinkiewicz_dyadic(o, f, quad).field, 2.0) /
                       mz::lp_norm(f, 2.0);
    }
    REQUIRE(ratio[0] > 0.0);
    REQUIRE(std::fabs(ratio[1] / ratio[0] - 1.0) <= 0.10);
}
