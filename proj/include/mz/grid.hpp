#pragma once

// grid.hpp -- shifted dyadic grid systems over the box window, cube
// rasterization, summed-area tables, cube banks, and the grid-based
// Hardy-Littlewood maximal operator.
//
// The 3^n = 9 grid family uses per-axis shifts in {0, +1/3, -1/3} of the cube
// side, with the sign alternating by level parity.  That alternation makes
// level boundaries align across scales (3 * shift is an integer), so cubes of
// one spec nest: two cubes meet in the smaller one or not at all.  Cubes are
// rasterized by cell-center membership; since shifts are thirds of dyadic
// sides and centers sit at half-integer multiples of h, a center is never
// closer than h/6 to a cube edge, so the rasterization is fp-robust.

#include "field.hpp"

namespace mz {

struct DyadicGridSpec {
    int id = 0;          // 0..8; id 0 is the unshifted standard grid
    double a1 = 0.0;     // per-axis shift fraction in {0, +1/3, -1/3}
    double a2 = 0.0;
};

inline std::vector<DyadicGridSpec> build_grids() {
    static const double fr[3] = {0.0, 1.0 / 3.0, -1.0 / 3.0};
    std::vector<DyadicGridSpec> out;
    int id = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.push_back({id++, fr[i], fr[j]});
    return out;
}

/* ---------------- cubes ---------------- */

struct Cube {
    int grid_id = -1;  // -1 for cubes outside the dyadic family (random bank)
    int level = 0;     // nominal side 2^level
    long m1 = 0, m2 = 0;
    // rasterized inclusive cell ranges, clipped to the window; empty if kx1 < kx0
    int kx0 = 0, kx1 = -1, ky0 = 0, ky1 = -1;
    double x0 = 0.0, y0 = 0.0, side = 0.0;  // unclipped geometry

    bool empty() const { return kx1 < kx0 || ky1 < ky0; }
    long cells() const { return empty() ? 0 : long(kx1 - kx0 + 1) * (ky1 - ky0 + 1); }
    double measure(const GridSpec& g) const { return double(cells()) * g.h() * g.h(); }
    bool contains_cell(int kx, int ky) const {
        return kx >= kx0 && kx <= kx1 && ky >= ky0 && ky <= ky1;
    }
};

namespace detail {
// first cell index whose center is >= X (with an fp guard much smaller than
// the h/6 center-to-edge margin)
inline int cell_lo(const GridSpec& g, double X) {
    double u = (X + g.L) / g.h() - 0.5;
    int k = int(std::ceil(u - 1e-9));
    return std::max(k, 0);
}
// last cell index whose center is < X
inline int cell_hi(const GridSpec& g, double X) {
    double u = (X + g.L) / g.h() - 0.5;
    int k = int(std::ceil(u - 1e-9)) - 1;
    return std::min(k, g.N - 1);
}
}  // namespace detail

// Rasterize the half-open cube [x0, x0+side) x [y0, y0+side).
inline Cube make_cube(const GridSpec& g, double x0, double y0, double side,
                      int grid_id = -1, int level = 0, long m1 = 0, long m2 = 0) {
    Cube c;
    c.grid_id = grid_id;
    c.level = level;
    c.m1 = m1;
    c.m2 = m2;
    c.x0 = x0;
    c.y0 = y0;
    c.side = side;
    c.kx0 = detail::cell_lo(g, x0);
    c.kx1 = detail::cell_hi(g, x0 + side);
    c.ky0 = detail::cell_lo(g, y0);
    c.ky1 = detail::cell_hi(g, y0 + side);
    return c;
}

// Level-k cube of a shifted grid at lattice position (m1, m2): side s = 2^k,
// corner s*(m + (-1)^k * shift).
inline Cube dyadic_cube(const GridSpec& g, const DyadicGridSpec& d, int level,
                        long m1, long m2) {
    double s = std::ldexp(1.0, level);
    double sgn = (level % 2 == 0) ? 1.0 : -1.0;
    return make_cube(g, s * (double(m1) + sgn * d.a1), s * (double(m2) + sgn * d.a2), s,
                     d.id, level, m1, m2);
}

// All level-k cubes meeting the window (clipped at the boundary).
inline std::vector<Cube> level_cubes(const GridSpec& g, const DyadicGridSpec& d, int level) {
    double s = std::ldexp(1.0, level);
    double sgn = (level % 2 == 0) ? 1.0 : -1.0;
    std::vector<Cube> out;
    long mlo1 = long(std::floor((-g.L) / s - sgn * d.a1)) - 1;
    long mhi1 = long(std::ceil((g.L) / s - sgn * d.a1)) + 1;
    for (long m1 = mlo1; m1 <= mhi1; ++m1)
        for (long m2 = mlo1; m2 <= mhi1; ++m2) {
            Cube c = dyadic_cube(g, d, level, m1, m2);
            if (!c.empty()) out.push_back(c);
        }
    return out;
}

// level whose side is the smallest power of two >= x
inline int level_above(double x) { return int(std::ceil(std::log2(x) - 1e-12)); }
// level whose side is the largest power of two <= x
inline int level_below(double x) { return int(std::floor(std::log2(x) + 1e-12)); }

/* ---------------- summed-area table ---------------- */

struct Sat {
    int N = 0;
    std::vector<double> acc;  // (N+1) x (N+1) prefix sums

    double sum(int kx0, int kx1, int ky0, int ky1) const {
        if (kx1 < kx0 || ky1 < ky0) return 0.0;
        size_t W = size_t(N) + 1;
        return acc[size_t(ky1 + 1) * W + (kx1 + 1)] - acc[size_t(ky0) * W + (kx1 + 1)] -
               acc[size_t(ky1 + 1) * W + kx0] + acc[size_t(ky0) * W + kx0];
    }
    double sum(const Cube& c) const { return sum(c.kx0, c.kx1, c.ky0, c.ky1); }
};

// transform: 0 = raw, 1 = |v|, otherwise |v|^power
inline Sat build_sat(const SampledField& f, double power = 0.0) {
    const int N = f.grid.N;
    Sat s;
    s.N = N;
    size_t W = size_t(N) + 1;
    s.acc.assign(W * W, 0.0);
    for (int ky = 0; ky < N; ++ky) {
        double row = 0.0;
        for (int kx = 0; kx < N; ++kx) {
            double v = f.at(kx, ky);
            if (power == 1.0) v = std::fabs(v);
            else if (power != 0.0) v = std::pow(std::fabs(v), power);
            row += v;
            s.acc[size_t(ky + 1) * W + (kx + 1)] = s.acc[size_t(ky) * W + (kx + 1)] + row;
        }
    }
    return s;
}

/* ---------------- cube banks ---------------- */

struct CubeBank {
    std::vector<Cube> cubes;
};

// Dyadic family cubes with nominal sides in [min_side, max_side].
inline void append_dyadic_cubes(CubeBank& bank, const GridSpec& g, double min_side,
                                double max_side) {
    auto grids = build_grids();
    int klo = level_above(min_side), khi = level_below(max_side);
    for (const auto& d : grids)
        for (int k = klo; k <= khi; ++k)
            for (const Cube& c : level_cubes(g, d, k)) bank.cubes.push_back(c);
}

// Origin-centered squares [-r, r]^2 for r = min_side/2 doubling up to L; these
// straddle the power-weight singularity exactly.
inline void append_origin_cubes(CubeBank& bank, const GridSpec& g, double min_side) {
    for (double r = min_side / 2.0; r <= g.L + 1e-12; r *= 2.0)
        bank.cubes.push_back(make_cube(g, -r, -r, 2.0 * r));
}

// Random cell-aligned cubes, log-uniform sides in [min_side, max_side].
inline void append_random_cubes(CubeBank& bank, const GridSpec& g, int count,
                                double min_side, double max_side, uint64_t seed) {
    Rng rng(seed);
    const double h = g.h();
    int smin = std::max(1, int(std::lround(min_side / h)));
    int smax = std::max(smin, int(std::lround(max_side / h)));
    for (int i = 0; i < count; ++i) {
        double u = rng.uniform();
        int sc = int(std::floor(smin * std::pow(double(smax) / smin, u)));
        sc = std::min(std::max(sc, smin), smax);
        int kx = int(rng.uniform_int(uint64_t(g.N - sc + 1)));
        int ky = int(rng.uniform_int(uint64_t(g.N - sc + 1)));
        Cube c;
        c.kx0 = kx;
        c.kx1 = kx + sc - 1;
        c.ky0 = ky;
        c.ky1 = ky + sc - 1;
        c.x0 = -g.L + kx * h;
        c.y0 = -g.L + ky * h;
        c.side = sc * h;
        c.level = 0;
        bank.cubes.push_back(c);
    }
}

// The standard measurement bank: every dyadic cube with side >= 4h across the
// nine grids, the origin-centered series, and a random supplement.
inline CubeBank standard_cube_bank(const GridSpec& g, int n_random = 10000,
                                   uint64_t seed = 12345) {
    CubeBank bank;
    append_dyadic_cubes(bank, g, 4.0 * g.h(), 2.0 * g.L);
    append_origin_cubes(bank, g, 4.0 * g.h());
    if (n_random > 0) append_random_cubes(bank, g, n_random, 4.0 * g.h(), g.L, seed);
    return bank;
}

/* ---------------- Hardy-Littlewood maximal operator ---------------- */

// sup over dyadic-family cubes containing x (sides in [4h, L], all nine
// grids) of the cube average of |f|.  Painting by (grid, level) costs
// O(9 * levels * N^2).
inline SampledField hl_maximal(const SampledField& f) {
    const GridSpec& g = f.grid;
    g.validate();
    Sat sat = build_sat(f, 1.0);
    SampledField out;
    out.grid = g;
    out.v.assign(g.cells(), 0.0);
    auto grids = build_grids();
    int klo = level_above(4.0 * g.h()), khi = level_below(g.L);
    for (const auto& d : grids)
        for (int k = klo; k <= khi; ++k)
            for (const Cube& c : level_cubes(g, d, k)) {
                double avg = sat.sum(c) / double(c.cells());
                for (int ky = c.ky0; ky <= c.ky1; ++ky)
                    for (int kx = c.kx0; kx <= c.kx1; ++kx) {
                        double& o = out.v[size_t(ky) * g.N + kx];
                        if (avg > o) o = avg;
                    }
            }
    return out;
}

}  // namespace mz
