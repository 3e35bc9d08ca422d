#pragma once

// spectral.hpp -- the FFT engine behind every convolution in the library.
//
// Conventions (load-bearing, do not change casually):
//   * spectral_convolve is an index-space LINEAR convolution: both inputs are
//     zero-padded to P = 2N per axis, so circular wraparound can never alias
//     the result.  Output cell x reads h^2 * sum_y f[y] * k[x - y + o] with
//     kernel origin at cell o = N/2 per axis.  A kernel that is 1/h^2 at its
//     origin cell and 0 elsewhere is therefore an exact identity.
//   * Kernels meant to act as functions of the offset x - y are sampled on
//     the OFFSET lattice u = d*h (sample_offset_kernel), so cell-center
//     scenes convolved with them land exactly centered, with no half-cell
//     drift.
//   * Support guard: the linear result of supports with L-inf radii r_f, r_k
//     has radius r_f + r_k; if that exceeds the box half-width L the window
//     [-L, L)^2 truncates real mass, so the convolution is rejected rather
//     than silently clipped.
//   * Plans are created with FFTW_ESTIMATE only (FFTW_MEASURE makes plan
//     choice -- and hence exact rounding -- depend on machine load, which
//     breaks bit-identical reports).  Planner calls are serialized; execution
//     uses the new-array interface on fftw_malloc-aligned buffers.

#include <fftw3.h>

#include <complex>
#include <map>
#include <utility>

#include "field.hpp"

namespace mz {
namespace detail {

struct FftwBuffer {
    fftw_complex* p = nullptr;
    explicit FftwBuffer(size_t n) {
        p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        require(p != nullptr, "fftw_malloc failed");
        for (size_t i = 0; i < n; ++i) p[i][0] = p[i][1] = 0.0;
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    ~FftwBuffer() { fftw_free(p); }
};

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// One forward and one backward 2D plan per transform size, reused for the
// lifetime of the process.  fftw_execute_dft on fresh fftw_malloc'd buffers
// is safe concurrently; only plan creation needs the lock.
inline std::pair<fftw_plan, fftw_plan> plans_for(int P) {
    static std::map<int, std::pair<fftw_plan, fftw_plan>> cache;
    std::lock_guard<std::mutex> lk(planner_mutex());
    auto it = cache.find(P);
    if (it != cache.end()) return it->second;
    FftwBuffer a(size_t(P) * P), b(size_t(P) * P);
    fftw_plan fwd = fftw_plan_dft_2d(P, P, a.p, b.p, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_2d(P, P, a.p, b.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    require(fwd && bwd, strf("fftw_plan_dft_2d failed for P=%d", P));
    cache.emplace(P, std::make_pair(fwd, bwd));
    return {fwd, bwd};
}

inline void dft2_exec(int P, fftw_complex* in, fftw_complex* out, int sign) {
    auto pl = plans_for(P);
    fftw_execute_dft(sign == FFTW_FORWARD ? pl.first : pl.second, in, out);
}

}  // namespace detail

// Unnormalized 2D DFT of an N x N complex array (row-major), sign = -1
// forward / +1 backward.  The caller owns normalization and phase
// conventions.
inline std::vector<std::complex<double>> dft2(const std::vector<std::complex<double>>& v,
                                              int N, int sign) {
    require(int64_t(v.size()) == int64_t(N) * N, "dft2: size mismatch");
    detail::FftwBuffer in(v.size()), out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        in.p[i][0] = v[i].real();
        in.p[i][1] = v[i].imag();
    }
    detail::dft2_exec(N, in.p, out.p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    std::vector<std::complex<double>> res(v.size());
    for (size_t i = 0; i < v.size(); ++i) res[i] = {out.p[i][0], out.p[i][1]};
    return res;
}

/* ---------------- support measurement ---------------- */

// L-inf radius of the occupied cells (|v| > rel_tol * max|v|), in the given
// coordinate frame: cell centers for scenes, offsets (i - N/2)*h for kernels.
// Half a cell is added so the reported radius covers the full cells.
namespace detail {
inline double support_radius(const SampledField& f, bool offset_frame, double rel_tol) {
    const auto& g = f.grid;
    double mx = 0.0;
    for (double v : f.v) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) return 0.0;
    double thr = mx * rel_tol, h = g.h(), rad = 0.0;
    int o = g.N / 2;
    for (int ky = 0; ky < g.N; ++ky)
        for (int kx = 0; kx < g.N; ++kx) {
            if (std::fabs(f.at(kx, ky)) <= thr) continue;
            double x, y;
            if (offset_frame) {
                x = (kx - o) * h;
                y = (ky - o) * h;
            } else {
                x = g.coord(kx);
                y = g.coord(ky);
            }
            rad = std::max(rad, std::max(std::fabs(x), std::fabs(y)));
        }
    return rad + 0.5 * h;
}
}  // namespace detail

inline double scene_support_radius(const SampledField& f, double rel_tol = 1e-13) {
    return detail::support_radius(f, false, rel_tol);
}
inline double kernel_support_radius(const SampledField& k, double rel_tol = 1e-13) {
    return detail::support_radius(k, true, rel_tol);
}

/* ---------------- offset-lattice kernel sampling ---------------- */

// Sample a kernel as a function of the offset u = (d1*h, d2*h); index
// (o, o) carries u = 0.  Singular kernels set zero_origin to skip it.
inline SampledField sample_offset_kernel(const GridSpec& g,
                                         const std::function<double(double, double)>& fn,
                                         bool zero_origin = true) {
    g.validate();
    SampledField k;
    k.grid = g;
    k.v.assign(g.cells(), 0.0);
    double h = g.h();
    int o = g.N / 2;
    for (int ky = 0; ky < g.N; ++ky)
        for (int kx = 0; kx < g.N; ++kx) {
            if (zero_origin && kx == o && ky == o) continue;
            double u1 = (kx - o) * h, u2 = (ky - o) * h;
            double val = fn(u1, u2);
            require(std::isfinite(val),
                    strf("sample_offset_kernel: non-finite value at u=(%g, %g)", u1, u2));
            k.v[size_t(ky) * g.N + kx] = val;
        }
    return k;
}

// Variant for integrands too rough for a single midpoint sample: cell
// membership is still decided at the cell center (so supports equal the
// center-membership cell set exactly), but the stored value is the average of
// fn over a sub x sub midpoint grid inside the cell -- the cell-mean
// discretization that mass laws converge to.
inline SampledField sample_offset_kernel_avg(
    const GridSpec& g, const std::function<bool(double, double)>& member,
    const std::function<double(double, double)>& fn, int sub = 4, bool zero_origin = true) {
    g.validate();
    require(sub >= 1, strf("sample_offset_kernel_avg: sub must be >= 1, got %d", sub));
    SampledField k;
    k.grid = g;
    k.v.assign(g.cells(), 0.0);
    double h = g.h();
    int o = g.N / 2;
    std::vector<double> off(sub);
    for (int s = 0; s < sub; ++s) off[s] = ((s + 0.5) / sub - 0.5) * h;
    for (int ky = 0; ky < g.N; ++ky)
        for (int kx = 0; kx < g.N; ++kx) {
            if (zero_origin && kx == o && ky == o) continue;
            double u1 = (kx - o) * h, u2 = (ky - o) * h;
            if (!member(u1, u2)) continue;
            double acc = 0.0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) acc += fn(u1 + off[sx], u2 + off[sy]);
            double val = acc / double(sub * sub);
            require(std::isfinite(val),
                    strf("sample_offset_kernel_avg: non-finite value at u=(%g, %g)", u1, u2));
            k.v[size_t(ky) * g.N + kx] = val;
        }
    return k;
}

/* ---------------- padded linear convolution ---------------- */

struct ConvolveOptions {
    bool check_support = true;
    double support_rel_tol = 1e-13;
};

// out[x] = h^2 * sum_y f[y] * k[x - y + o], windowed back to the original
// N x N frame.  Exact linear convolution via zero-padding to 2N.
inline SampledField spectral_convolve(const SampledField& f, const SampledField& k,
                                      const ConvolveOptions& opt = {}) {
    require(f.grid == k.grid, "spectral_convolve: grid mismatch");
    f.grid.validate();
    const int N = f.grid.N, P = 2 * N, o = N / 2;
    const double h = f.grid.h();

    if (opt.check_support) {
        double rf = scene_support_radius(f, opt.support_rel_tol);
        double rk = kernel_support_radius(k, opt.support_rel_tol);
        require(rf + rk <= f.grid.L * (1.0 + 1e-12) + 1e-12,
                strf("spectral_convolve: support overflow, scene radius %.6g + "
                     "kernel radius %.6g > box half-width %.6g "
                     "(result would be truncated by the window)",
                     rf, rk, f.grid.L));
    }

    detail::FftwBuffer fa(size_t(P) * P), fb(size_t(P) * P), ka(size_t(P) * P);
    for (int ky = 0; ky < N; ++ky)
        for (int kx = 0; kx < N; ++kx) {
            fa.p[size_t(ky) * P + kx][0] = f.at(kx, ky);
            ka.p[size_t(ky) * P + kx][0] = k.at(kx, ky);
        }
    detail::dft2_exec(P, fa.p, fb.p, FFTW_FORWARD);   // fb = F f
    detail::dft2_exec(P, ka.p, fa.p, FFTW_FORWARD);   // fa = F k (reuse)
    const double scale = h * h / (double(P) * P);
    for (size_t i = 0; i < size_t(P) * P; ++i) {
        double re = fb.p[i][0] * fa.p[i][0] - fb.p[i][1] * fa.p[i][1];
        double im = fb.p[i][0] * fa.p[i][1] + fb.p[i][1] * fa.p[i][0];
        ka.p[i][0] = re * scale;
        ka.p[i][1] = im * scale;
    }
    detail::dft2_exec(P, ka.p, fb.p, FFTW_BACKWARD);

    SampledField out;
    out.grid = f.grid;
    out.v.assign(f.grid.cells(), 0.0);
    for (int ky = 0; ky < N; ++ky)
        for (int kx = 0; kx < N; ++kx)
            out.v[size_t(ky) * N + kx] = fb.p[size_t(ky + o) * P + (kx + o)][0];
    return out;
}

}  // namespace mz
