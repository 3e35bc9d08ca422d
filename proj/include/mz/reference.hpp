#pragma once

// reference.hpp -- slow, independent evaluation routes used only to certify
// the fast paths: direct-summation convolution, a from-the-definition square
// function evaluator, and a brute-force cube-search weight-constant estimator
// with its own prefix sums.  The square-function route shares only the
// discrete kernel fields with the fast path (kernel construction is certified
// separately by the mass and support laws); all assembly downstream of the
// kernels -- summation, squaring, weighting -- is independent.

#include "kernels.hpp"
#include "operators.hpp"

namespace mz {

// Direct zero-padded linear convolution: out[x] = h^2 sum_y f[y] k[x - y + o],
// kernel origin at cell o = N/2.  Quadratic cost; use on small grids or probes.
inline SampledField reference_convolve(const SampledField& f, const SampledField& k) {
    require(f.grid == k.grid, "reference_convolve: grid mismatch");
    const int N = f.grid.N, o = N / 2;
    const double h2 = f.grid.h() * f.grid.h();
    SampledField out;
    out.grid = f.grid;
    out.v.assign(f.v.size(), 0.0);
    for (int xy = 0; xy < N; ++xy)
        for (int xx = 0; xx < N; ++xx) {
            double acc = 0.0;
            for (int yy = 0; yy < N; ++yy) {
                int ky = xy - yy + o;
                if (ky < 0 || ky >= N) continue;
                for (int yx = 0; yx < N; ++yx) {
                    int kx = xx - yx + o;
                    if (kx < 0 || kx >= N) continue;
                    double kv = k.v[size_t(ky) * N + kx];
                    if (kv != 0.0) acc += f.v[size_t(yy) * N + yx] * kv;
                }
            }
            out.v[size_t(xy) * N + xx] = acc * h2;
        }
    return out;
}

// Square function from the definition: for each cell x, for each (j, t-node)
// accumulate coeff * |h^2 sum_u B(u) f(x-u)|^2 over the ball kernel's nonzero
// offsets and take the square root.  The discrete kernels are the same fields
// the fast path convolves (kernel construction is certified separately by the
// mass and support laws); everything downstream of them -- direct summation
// here versus padded FFT convolution there -- is independent.
inline SampledField reference_marcinkiewicz(const AngularKernel& omega, const SampledField& f,
                                            const QuadratureSpec& quad) {
    const GridSpec& g = f.grid;
    g.validate();
    quad.validate(g);
    const int N = g.N;
    const double h = g.h();

    struct Offset {
        int du, dv;
        double w;
    };
    struct Term {
        double coeff;
        std::vector<Offset> offs;
    };
    std::vector<Term> terms;
    const int o = N / 2;
    for (int j = quad.j_min; j <= quad.j_max; ++j)
        for (size_t m = 0; m < quad.t_nodes.size(); ++m) {
            double t = quad.t_nodes[m];
            SampledField k = build_ball_kernel(omega, std::ldexp(t, j), g);
            Term term;
            term.coeff = std::ldexp(quad.t_weights[m] / (t * t * t), -2 * j);
            for (int dv = -o; dv < N - o; ++dv)
                for (int du = -o; du < N - o; ++du) {
                    double kv = k.v[size_t(dv + o) * N + (du + o)];
                    if (kv != 0.0) term.offs.push_back({du, dv, kv});
                }
            terms.push_back(std::move(term));
        }

    SampledField out;
    out.grid = g;
    out.v.assign(g.cells(), 0.0);
    const double h2 = h * h;
    for (int xy = 0; xy < N; ++xy)
        for (int xx = 0; xx < N; ++xx) {
            double sq = 0.0;
            for (const Term& term : terms) {
                double acc = 0.0;
                for (const Offset& off : term.offs) {
                    int yx = xx - off.du, yy = xy - off.dv;
                    if (yx < 0 || yx >= N || yy < 0 || yy >= N) continue;
                    acc += off.w * f.v[size_t(yy) * N + yx];
                }
                acc *= h2;
                sq += term.coeff * acc * acc;
            }
            out.v[size_t(xy) * N + xx] = std::sqrt(sq);
        }
    return out;
}

/* ---------------- brute-force weight constants ---------------- */

struct RefBox {
    int kx0, kx1, ky0, ky1;  // inclusive cell ranges
};

// Candidate boxes: a geometric ladder of side lengths; for each side, corners
// on a coarse lattice covering the window plus one box straddling the origin.
inline std::vector<RefBox> reference_boxes(int N, int positions_per_side = 60) {
    std::vector<RefBox> out;
    for (int side = 2; side <= N; side = side + std::max(1, side / 2)) {
        int span = N - side;
        int steps = std::min(span, positions_per_side);
        for (int iy = 0; iy <= steps; ++iy)
            for (int ix = 0; ix <= steps; ++ix) {
                int x0 = span == 0 ? 0 : int(std::lround(double(ix) * span / steps));
                int y0 = span == 0 ? 0 : int(std::lround(double(iy) * span / steps));
                out.push_back({x0, x0 + side - 1, y0, y0 + side - 1});
            }
        int c0 = N / 2 - side / 2;  // straddles the origin (centre of the window)
        c0 = std::max(0, std::min(N - side, c0));
        out.push_back({c0, c0 + side - 1, c0, c0 + side - 1});
    }
    return out;
}

// [w]_{A_p} by exhaustive search over the given boxes, using locally built
// prefix sums (no shared accumulation code with the estimator under test).
inline double reference_ap_constant(const SampledField& w, double p,
                                    const std::vector<RefBox>& boxes) {
    require(p > 1.0, "reference_ap_constant: p must be > 1");
    require(!boxes.empty(), "reference_ap_constant: empty box list");
    const int N = w.grid.N;
    std::vector<double> pw(size_t(N + 1) * (N + 1), 0.0), ps(pw.size(), 0.0);
    const double expo = -1.0 / (p - 1.0);
    for (int ky = 0; ky < N; ++ky)
        for (int kx = 0; kx < N; ++kx) {
            double v = w.v[size_t(ky) * N + kx];
            require(v > 0.0, "reference_ap_constant: weight must be positive");
            size_t a = size_t(ky + 1) * (N + 1) + (kx + 1), b = a - 1,
                   c = a - (N + 1), d = c - 1;
            pw[a] = v + pw[b] + pw[c] - pw[d];
            ps[a] = std::pow(v, expo) + ps[b] + ps[c] - ps[d];
        }
    auto box_sum = [&](const std::vector<double>& ac, const RefBox& bx) {
        size_t a = size_t(bx.ky1 + 1) * (N + 1) + (bx.kx1 + 1);
        size_t b = size_t(bx.ky1 + 1) * (N + 1) + bx.kx0;
        size_t c = size_t(bx.ky0) * (N + 1) + (bx.kx1 + 1);
        size_t d = size_t(bx.ky0) * (N + 1) + bx.kx0;
        return ac[a] - ac[b] - ac[c] + ac[d];
    };
    double best = 0.0;
    for (const RefBox& bx : boxes) {
        double cells = double(bx.kx1 - bx.kx0 + 1) * double(bx.ky1 - bx.ky0 + 1);
        double aw = box_sum(pw, bx) / cells;
        double as = box_sum(ps, bx) / cells;
        best = std::max(best, aw * std::pow(as, p - 1.0));
    }
    return best;
}

}  // namespace mz
