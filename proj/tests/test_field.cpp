// Grid, sampling, norms, quadrature, and serialization.

#include "helpers.hpp"

using namespace mz;

TEST_CASE("grid geometry and validation") {
    GridSpec g = make_grid(256, 8.0);
    CHECK(g.h() == 0.0625);
    CHECK(g.cells() == 65536u);
    CHECK(g.coord(0) == Catch::Approx(-8.0 + 0.03125).margin(1e-15));
    CHECK(g.coord(255) == Catch::Approx(8.0 - 0.03125).margin(1e-15));
    // centers are symmetric about the origin
    CHECK(g.coord(127) == Catch::Approx(-g.coord(128)).margin(1e-15));

    CHECK_THROWS_AS(make_grid(100, 8.0), contract_error);  // not a power of two
    CHECK_THROWS_AS(make_grid(8, 8.0), contract_error);    // below the floor
    CHECK_THROWS_AS(make_grid(256, 0.0), contract_error);
    CHECK_THROWS_AS(make_grid(256, -1.0), contract_error);
    GridSpec bad = g;
    bad.n = 3;
    CHECK_THROWS_AS(bad.validate(), contract_error);
}

TEST_CASE("sample evaluates at cell centers and rejects non-finite values") {
    GridSpec g = make_grid(16, 8.0);
    SampledField f = sample(g, [](double x, double y) { return x + 10.0 * y; });
    CHECK(f.at(0, 0) == Catch::Approx(g.coord(0) * 11.0).margin(1e-14));
    CHECK(f.at(5, 9) == Catch::Approx(g.coord(5) + 10.0 * g.coord(9)).margin(1e-14));
    CHECK_THROWS_AS(sample(g, [](double, double) { return 1.0 / 0.0; }), contract_error);
    CHECK_THROWS_AS(sample(g, [](double, double) { return std::nan(""); }), contract_error);
}

TEST_CASE("lp_norm: indicator area converges to the disk area") {
    // midpoint Riemann sum of the unit-disk indicator vs the exact area pi
    double coarse = lp_norm(make_scene("disk", make_grid(256, 8.0)), 1.0);
    CHECK(std::fabs(coarse - M_PI) / M_PI < 0.02);
    double fine = lp_norm(make_scene("disk", make_grid(2048, 8.0)), 1.0);
    CHECK(std::fabs(fine - M_PI) / M_PI < 1e-3);
    // refinement moves the value toward the truth
    CHECK(std::fabs(fine - M_PI) < std::fabs(coarse - M_PI));
}

TEST_CASE("lp_norm: sup norm, p guard, Cauchy-Schwarz on the window") {
    GridSpec g = make_grid(256, 8.0);
    SampledField f = make_scene("gaussian", g);
    double mx = 0.0;
    for (double v : f.v) mx = std::max(mx, std::fabs(v));
    CHECK(lp_norm(f, kInfP) == mx);  // sup norm is the exact max over cells
    // the nearest cell center sits h/sqrt(2) off the peak
    CHECK(lp_norm(f, kInfP) == Catch::Approx(1.0).margin(1e-3));
    CHECK_THROWS_AS(lp_norm(f, 0.5), contract_error);
    // |supp f| <= (2L)^2 gives ||f||_1 <= 2L ||f||_2
    CHECK(lp_norm(f, 1.0) <= 2.0 * g.L * lp_norm(f, 2.0));
    SampledField d = make_scene("disk", g);
    CHECK(lp_norm(d, 1.0) <= 2.0 * g.L * lp_norm(d, 2.0));
}

TEST_CASE("weighted_lp_norm: closed-form oracle and guards") {
    GridSpec g = make_grid(256, 8.0);
    // f = exp(-|x|^2), w = |x|:  integral of |x| exp(-2|x|^2) = 2 pi / 8 * sqrt(pi/2)
    SampledField f = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
    Weight w = power_weight(1.0, g);
    double want = std::sqrt(2.0 * M_PI * 0.125 * std::sqrt(M_PI / 2.0));
    CHECK(weighted_lp_norm(f, w.field, 2.0) == Catch::Approx(want).epsilon(1e-4));

    // w == 1 reduces to the unweighted norm
    Weight one = constant_weight(1.0, g);
    CHECK(weighted_lp_norm(f, one.field, 2.0) == Catch::Approx(lp_norm(f, 2.0)).epsilon(1e-13));

    SampledField wrong_grid = make_scene("gaussian", make_grid(128, 8.0));
    CHECK_THROWS_AS(weighted_lp_norm(f, wrong_grid, 2.0), contract_error);
    CHECK_THROWS_AS(weighted_lp_norm(f, w.field, kInfP), contract_error);
    SampledField neg = f;
    neg.v[7] = -1.0;
    CHECK_THROWS_AS(weighted_lp_norm(f, neg, 2.0), contract_error);
}

TEST_CASE("Gauss-Legendre nodes on [1,2]") {
    for (int n : {1, 2, 3, 4, 8, 12}) {
        Quadrature1D q = gauss_legendre_12(n);
        REQUIRE(int(q.nodes.size()) == n);
        double ws = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(q.nodes[i] > 1.0);
            CHECK(q.nodes[i] < 2.0);
            if (i) CHECK(q.nodes[i] > q.nodes[i - 1]);
            ws += q.weights[i];
        }
        CHECK(ws == Catch::Approx(1.0).margin(1e-14));
    }
    // order-n rule integrates t^3 exactly once 2n-1 >= 3
    for (int n : {2, 3, 4, 8}) {
        Quadrature1D q = gauss_legendre_12(n);
        double s = 0.0;
        for (size_t i = 0; i < q.nodes.size(); ++i)
            s += q.weights[i] * std::pow(q.nodes[i], 3.0);
        CHECK(s == Catch::Approx(3.75).margin(1e-13));  // integral of t^3 over [1,2]
    }
    CHECK_THROWS_AS(gauss_legendre_12(0), contract_error);
    CHECK_THROWS_AS(gauss_legendre_12(33), contract_error);
}

TEST_CASE("quadrature windows and scale guards") {
    GridSpec g = make_grid(256, 8.0);  // h = 1/16
    QuadratureSpec q = default_quadrature(g);
    CHECK(q.j_min == 0);
    CHECK(q.j_max == 1);
    CHECK(q.n_scales() == 2);
    CHECK(q.t_nodes.size() == 4u);

    // explicit windows must stay within resolvable scales:
    // annuli below 4h or above L/4 are rejected naming the violation
    CHECK_NOTHROW(quadrature_with_range(g, -2, 1, 4));
    CHECK_THROWS_AS(quadrature_with_range(g, -3, 1, 4), contract_error);
    CHECK_THROWS_AS(quadrature_with_range(g, 0, 2, 4), contract_error);
    CHECK_THROWS_AS(quadrature_with_range(g, 1, 0, 4), contract_error);  // empty window

    // a tiny box has no resolvable octave at all
    CHECK_THROWS_AS(default_quadrature(make_grid(16, 0.5)), contract_error);
}

TEST_CASE("MZF1 round-trip is bit-exact") {
    GridSpec g = make_grid(16, 2.0);
    SampledField f(g);
    Rng rng(12345);
    for (auto& x : f.v) x = rng.uniform(-1.0, 1.0) * std::ldexp(1.0, int(rng.uniform(-40, 40)));
    f.v[0] = 0.0;
    f.v[1] = -0.0;
    f.v[2] = 5e-324;  // denormal survives
    tst::TempFile tmp("field-roundtrip");
    write_mzf1(f, tmp.path);
    SampledField r = read_mzf1(tmp.path);
    REQUIRE(r.grid == g);
    for (size_t i = 0; i < f.v.size(); ++i) {
        REQUIRE(std::memcmp(&r.v[i], &f.v[i], 8) == 0);  // bitwise, catches -0.0
    }
}

TEST_CASE("MZF1 rejects malformed input") {
    GridSpec g = make_grid(16, 2.0);
    SampledField f = make_scene("disk", g);
    tst::TempFile tmp("field-malformed");
    write_mzf1(f, tmp.path);
    std::string buf = tst::slurp(tmp.path);

    auto rewrite = [&](const std::string& s) {
        std::ofstream os(tmp.path, std::ios::binary | std::ios::trunc);
        os.write(s.data(), std::streamsize(s.size()));
    };

    rewrite(buf.substr(0, 16));  // truncated header
    CHECK_THROWS_AS(read_mzf1(tmp.path), contract_error);

    std::string bad_magic = buf;
    bad_magic[0] = 'X';
    rewrite(bad_magic);
    CHECK_THROWS_AS(read_mzf1(tmp.path), contract_error);

    std::string short_payload = buf.substr(0, buf.size() - 8);
    rewrite(short_payload);
    CHECK_THROWS_AS(read_mzf1(tmp.path), contract_error);

    std::string bad_grid = buf;
    bad_grid[8] = 7;  // N = 7: not a power of two
    rewrite(bad_grid);
    CHECK_THROWS_AS(read_mzf1(tmp.path), contract_error);

    CHECK_THROWS_AS(read_mzf1("/nonexistent/path/f.mzf"), contract_error);
}

TEST_CASE("field CSV export: RFC-4180 shape") {
    GridSpec g = make_grid(16, 2.0);
    SampledField f = make_scene("disk", g);
    tst::TempFile tmp("field-csv");
    write_field_csv(f, tmp.path);
    std::string s = tst::slurp(tmp.path);
    REQUIRE(s.rfind("index,x,y,value\r\n", 0) == 0);
    size_t lines = 0;
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] == '\r' && s[i + 1] == '\n') ++lines;
    CHECK(lines == 1 + g.cells());      // header + one line per cell
    CHECK(s.back() == '\n');            // final line terminated
    CHECK(s.find(",\r") == std::string::npos);  // no trailing separator
}
