#pragma once

// kernels.hpp -- truncated annular kernels, mollifiers, smoothed kernels, and
// the shell regularity sums for the smoothed family.
//
// All kernel fields live on the offset lattice u = d*h (see spectral.hpp):
// index (N/2, N/2) is u = 0, so convolving a cell-center scene with one of
// these kernels produces an exactly centered output.

#include "sphere.hpp"
#include "spectral.hpp"

namespace mz {

/* ---------------- truncated annular kernel ---------------- */

// K_t^j(u) = 2^{-j} * Omega(u/|u|) / |u|^{n-1} on the annulus
// 2^{j-1} t < |u| <= 2^j t, zero elsewhere (n = 2 here).
struct TruncatedKernel {
    int j = 0;
    double t = 1.0;
    SampledField field;

    double inner_radius() const { return std::ldexp(t, j - 1); }
    double outer_radius() const { return std::ldexp(t, j); }
};

inline TruncatedKernel build_k_jt(const AngularKernel& omega, int j, double t,
                                  const GridSpec& g) {
    g.validate();
    omega.validate();
    require(t >= 1.0 && t <= 2.0, strf("build_k_jt: t must lie in [1,2], got %g", t));
    const double h = g.h();
    const double r_in = std::ldexp(t, j - 1), r_out = std::ldexp(t, j);
    require(r_in >= 2.0 * h - 1e-12,
            strf("build_k_jt: annulus unresolvable, inner radius 2^{j-1}t = %g < 2h = %g "
                 "(j = %d, t = %g, h = %g)", r_in, 2.0 * h, j, t, h));
    require(r_out <= g.L + 1e-12,
            strf("build_k_jt: outer radius 2^j t = %g exceeds box half-width L = %g "
                 "(j = %d, t = %g)", r_out, g.L, j, t));

    const double scale = std::ldexp(1.0, -j);
    TruncatedKernel K;
    K.j = j;
    K.t = t;
    // membership at the cell center keeps the support exactly the rasterized
    // annulus; the cell value is a 4x4 midpoint average, which converges the
    // discrete mass to the (t/2)||Omega||_1 law even for singular Omega.
    K.field = sample_offset_kernel_avg(
        g,
        [&](double u1, double u2) {
            double r = std::hypot(u1, u2);
            return r > r_in && r <= r_out;
        },
        [&](double u1, double u2) {
            return scale * evaluate_homogeneous(omega, u1, u2) / std::hypot(u1, u2);
        });
    return K;
}

// Discrete mass h^2 * sum |K| (for the L1 normalization law
// ||K_t^j||_1 = (t/2)||Omega||_{L1(S^1)}).
inline double kernel_l1_mass(const SampledField& f) {
    std::vector<double> terms(f.v.size());
    for (size_t i = 0; i < terms.size(); ++i) terms[i] = std::fabs(f.v[i]);
    double h = f.grid.h();
    return pairwise_sum(terms) * h * h;
}
inline double kernel_l1_mass(const TruncatedKernel& K) { return kernel_l1_mass(K.field); }

inline double kernel_integral(const SampledField& f) {
    double h = f.grid.h();
    return pairwise_sum(f.v) * h * h;
}
inline double kernel_integral(const TruncatedKernel& K) { return kernel_integral(K.field); }

/* ---------------- mollifier ---------------- */

struct Mollifier {
    int l = 0;
    SampledField field;
};

namespace detail {

// phi_l sampled on the cells with |u| < rho = 2^{l-2} and renormalized to
// discrete mass exactly 1.  Returns an empty field when no cell besides the
// origin fits under rho (the sub-cell regime); callers decide whether that is
// an error (build_mollifier) or a delta-convolution (operator pipelines).
inline SampledField sample_bump(const GridSpec& g, double rho) {
    const double h = g.h();
    const int o = g.N / 2;
    SampledField phi;
    phi.grid = g;
    phi.v.assign(g.cells(), 0.0);
    int reach = int(std::floor(rho / h)) + 1;
    int lo = std::max(0, o - reach), hi = std::min(g.N - 1, o + reach);
    int filled = 0;
    for (int ky = lo; ky <= hi; ++ky)
        for (int kx = lo; kx <= hi; ++kx) {
            double u1 = (kx - o) * h, u2 = (ky - o) * h;
            double s = std::hypot(u1, u2) / rho;
            if (s >= 1.0) continue;
            phi.v[size_t(ky) * g.N + kx] = std::exp(-1.0 / (1.0 - s * s));
            ++filled;
        }
    if (filled <= 1) {
        phi.v.clear();
        return phi;  // sub-cell: only the origin (or nothing) fits
    }
    double mass = pairwise_sum(phi.v) * h * h;
    for (double& v : phi.v) v /= mass;
    return phi;
}

}  // namespace detail

inline Mollifier build_mollifier(int l, const GridSpec& g) {
    g.validate();
    const double h = g.h(), rho = std::ldexp(1.0, l - 2);
    require(rho >= 2.0 * h - 1e-12,
            strf("build_mollifier: support radius 2^{l-2} = %g < 2h = %g (l = %d)",
                 rho, 2.0 * h, l));
    require(rho <= g.L + 1e-12,
            strf("build_mollifier: support radius 2^{l-2} = %g exceeds L = %g", rho, g.L));
    Mollifier m;
    m.l = l;
    m.field = detail::sample_bump(g, rho);
    require(!m.field.v.empty(), strf("build_mollifier: no interior cells at l = %d", l));
    return m;
}

inline double mollifier_first_moment(const Mollifier& m) {
    const auto& g = m.field.grid;
    const double h = g.h();
    const int o = g.N / 2;
    std::vector<double> terms;
    terms.reserve(1024);
    for (int ky = 0; ky < g.N; ++ky)
        for (int kx = 0; kx < g.N; ++kx) {
            double v = m.field.at(kx, ky);
            if (v == 0.0) continue;
            terms.push_back(std::hypot((kx - o) * h, (ky - o) * h) * v);
        }
    return pairwise_sum(terms) * h * h;
}

/* ---------------- smoothed kernel ---------------- */

// K_t^j * phi_{j-l}.  Strict contract: j - l must be admissible for
// build_mollifier.
inline SampledField smooth_kernel(const TruncatedKernel& K, int l) {
    require(l >= 1, strf("smooth_kernel: l must be >= 1, got %d", l));
    Mollifier phi = build_mollifier(K.j - l, K.field.grid);
    return spectral_convolve(K.field, phi.field);
}

// Relaxed variant for operator pipelines: when the mollifier support falls
// below the lattice (no cell besides the origin inside 2^{j-l-2}) the
// convolution degenerates to the identity and K itself is returned.  Above
// that floor it matches smooth_kernel bit for bit.
inline SampledField smooth_kernel_relaxed(const TruncatedKernel& K, int l, bool* degraded = nullptr) {
    require(l >= 1, strf("smooth_kernel_relaxed: l must be >= 1, got %d", l));
    const GridSpec& g = K.field.grid;
    double rho = std::ldexp(1.0, K.j - l - 2);
    if (rho <= g.L) {
        SampledField phi = detail::sample_bump(g, rho);
        if (!phi.v.empty()) {
            if (degraded) *degraded = false;
            return spectral_convolve(K.field, phi);
        }
    }
    if (degraded) *degraded = true;
    return K.field;
}

/* ---------------- regularity shell sums ---------------- */

// Shell sum behind the smoothed-kernel regularity estimate: for displacement
// y and shell 2^k R < |u| <= 2^{k+1} R,
//
//   S = sum_j ( integral_shell sup_{t in T} |S_jt(u+y) - S_jt(u)|^q du )^{1/q}
//
// with S_jt = K_t^j * phi_{j-l} and T the quadrature t-nodes; the returned
// value is S / ( (2^k R)^{-n/q'} * min(1, 2^l |y| / (2^k R)) ).  j runs over
// every scale the grid can build (annulus resolvable, smoothed support inside
// the box); off-shell scales contribute zero.
struct RegularityResult {
    double sum = 0.0;    // numerator S
    double bound = 0.0;  // denominator (2^k R)^{-n/q'} * min(1, 2^l |y| / 2^k R)
    double ratio = 0.0;
};

inline RegularityResult regularity_sum_check(const AngularKernel& omega, int l, double R,
                                             double y1, double y2, int k,
                                             const GridSpec& g, const Quadrature1D& tq,
                                             double q = 4.0) {
    g.validate();
    require(l >= 1, "regularity_sum_check: l must be >= 1");
    require(q > 1.0 && std::isfinite(q), "regularity_sum_check: q must be finite and > 1");
    const double h = g.h();
    const double r_lo = std::ldexp(R, k), r_hi = std::ldexp(R, k + 1);
    double ymag = std::hypot(y1, y2);
    require(ymag < R / 4.0 + 1e-12,
            strf("regularity_sum_check: |y| = %g must be < R/4 = %g", ymag, R / 4.0));
    require(r_lo >= 4.0 * h - 1e-12,
            strf("regularity_sum_check: shell inner radius 2^k R = %g < 4h", r_lo));
    require(r_hi <= g.L + 1e-12,
            strf("regularity_sum_check: shell outer radius 2^{k+1} R = %g > L = %g", r_hi, g.L));

    RegularityResult res;
    if (ymag == 0.0) return res;  // no displacement: sum 0, ratio 0

    // displacement must sit on the lattice so S(u + y) is an exact shift
    int d1 = int(std::lround(y1 / h)), d2 = int(std::lround(y2 / h));
    require(std::fabs(d1 * h - y1) <= 1e-9 * std::max(h, ymag) &&
                std::fabs(d2 * h - y2) <= 1e-9 * std::max(h, ymag),
            strf("regularity_sum_check: displacement (%g, %g) is not lattice-aligned (h = %g)",
                 y1, y2, h));

    // admissible j: annulus resolvable at every t-node and smoothed support
    // (outer radius + mollifier) inside the box
    const int o = g.N / 2, N = g.N;
    std::vector<double> shell_terms;
    for (int j = -40; j <= 40; ++j) {
        double r_in_min = std::ldexp(1.0, j - 1);       // t = 1
        double r_out_max = std::ldexp(2.0, j);          // t = 2
        double moll = std::ldexp(1.0, j - l - 2);
        if (r_in_min < 2.0 * h - 1e-12) continue;
        if (r_out_max + moll + h > g.L) continue;
        if (r_out_max + moll < r_lo - ymag - h || r_in_min - moll > r_hi + ymag + h)
            continue;  // supports miss the shell entirely

        // sup over t-nodes of |S(u+y) - S(u)|, accumulated cellwise
        std::vector<double> sup(size_t(N) * N, 0.0);
        for (double t : tq.nodes) {
            TruncatedKernel K = build_k_jt(omega, j, t, g);
            SampledField S = smooth_kernel_relaxed(K, l);
            for (int ky = 0; ky < N; ++ky) {
                int sy = ky + d2;
                if (sy < 0 || sy >= N) continue;
                for (int kx = 0; kx < N; ++kx) {
                    int sx = kx + d1;
                    if (sx < 0 || sx >= N) continue;
                    double d = std::fabs(S.at(sx, sy) - S.at(kx, ky));
                    double& c = sup[size_t(ky) * N + kx];
                    if (d > c) c = d;
                }
            }
        }
        // shell integral of sup^q
        std::vector<double> terms;
        terms.reserve(4096);
        for (int ky = 0; ky < N; ++ky)
            for (int kx = 0; kx < N; ++kx) {
                double r = std::hypot((kx - o) * h, (ky - o) * h);
                if (r <= r_lo || r > r_hi) continue;
                double s = sup[size_t(ky) * N + kx];
                if (s > 0.0) terms.push_back(std::pow(s, q));
            }
        if (!terms.empty())
            shell_terms.push_back(std::pow(pairwise_sum(terms) * h * h, 1.0 / q));
    }
    res.sum = shell_terms.empty() ? 0.0 : pairwise_sum(shell_terms);
    double qp = q / (q - 1.0);
    res.bound = std::pow(r_lo, -2.0 / qp) *
                std::min(1.0, std::ldexp(ymag, l) / r_lo);
    res.ratio = res.sum / res.bound;
    return res;
}

}  // namespace mz
