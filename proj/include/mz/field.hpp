#pragma once

// field.hpp -- cell-centered sampled fields on the square window [-L,L)^2,
// Lp norms (plain and weighted), the scale/quadrature descriptor for the
// dyadic t-integral, and field serialization (MZF1 binary, CSV).
//
// Sampling convention: index k=(kx,ky), 0 <= k < N, sample point
//   x_k = -L + (k + 1/2) h,   h = 2L/N.
// No sample sits at the origin, so |x|^{-(n-1)} kernels are finite at every
// sample point.  Storage is a flat vector, index = ky*N + kx (y is the row).

#include <cstring>
#include <fstream>
#include <functional>
#include <limits>

#include "util.hpp"

namespace mz {

/* ---------------- GridSpec ---------------- */

struct GridSpec {
    int n = 2;       // dimension (desk scale: 2; all operators require 2)
    int N = 256;     // samples per axis, power of two >= 16
    double L = 8.0;  // half-width of the window [-L,L)^n

    double h() const { return 2.0 * L / N; }
    size_t cells() const {
        size_t c = 1;
        for (int i = 0; i < n; ++i) c *= size_t(N);
        return c;
    }
    // coordinate of cell index k along one axis
    double coord(int k) const { return -L + (k + 0.5) * h(); }

    bool operator==(const GridSpec& o) const { return n == o.n && N == o.N && L == o.L; }

    void validate() const {
        require(n == 2, strf("GridSpec: dimension must be 2, got %d", n));
        require(N >= 16 && is_pow2(uint64_t(N)),
                strf("GridSpec: N must be a power of two >= 16, got %d", N));
        require(L > 0 && std::isfinite(L), strf("GridSpec: L must be positive, got %g", L));
    }
};

inline GridSpec make_grid(int N, double L) {
    GridSpec g{2, N, L};
    g.validate();
    return g;
}

/* ---------------- SampledField ---------------- */

struct SampledField {
    GridSpec grid;
    std::vector<double> v;  // flat, v[ky*N + kx]

    SampledField() = default;
    explicit SampledField(const GridSpec& g) : grid(g), v(g.cells(), 0.0) {}

    double& at(int kx, int ky) { return v[size_t(ky) * grid.N + kx]; }
    double at(int kx, int ky) const { return v[size_t(ky) * grid.N + kx]; }
    size_t size() const { return v.size(); }
};

// Sample a function descriptor on the grid.  Non-finite values are rejected
// naming the offending sample point.
inline SampledField sample(const GridSpec& g, const std::function<double(double, double)>& f) {
    g.validate();
    SampledField out(g);
    for (int ky = 0; ky < g.N; ++ky) {
        double y = g.coord(ky);
        for (int kx = 0; kx < g.N; ++kx) {
            double x = g.coord(kx);
            double val = f(x, y);
            if (!std::isfinite(val))
                reject(strf("sample: non-finite value %g at point (%.17g, %.17g)", val, x, y));
            out.at(kx, ky) = val;
        }
    }
    return out;
}

/* ---------------- norms ---------------- */

constexpr double kInfP = std::numeric_limits<double>::infinity();

// ||f||_{L^p} on the window; p may be infinity (sup of |f|).
// Riemann midpoint quadrature: (sum |f|^p h^n)^{1/p}, pairwise-summed.
inline double lp_norm(const SampledField& f, double p) {
    require(p >= 1.0, strf("lp_norm: p must be >= 1, got %g", p));
    if (p == kInfP) {
        double m = 0.0;
        for (double x : f.v) {
            if (std::isnan(x)) reject("lp_norm: NaN in field");
            m = std::max(m, std::fabs(x));
        }
        return m;
    }
    const double hn = std::pow(f.grid.h(), f.grid.n);
    std::vector<double> terms(f.v.size());
    if (p == 1.0) {
        for (size_t i = 0; i < f.v.size(); ++i) terms[i] = std::fabs(f.v[i]);
    } else if (p == 2.0) {
        for (size_t i = 0; i < f.v.size(); ++i) terms[i] = f.v[i] * f.v[i];
    } else {
        for (size_t i = 0; i < f.v.size(); ++i) terms[i] = std::pow(std::fabs(f.v[i]), p);
    }
    double s = pairwise_sum(terms);
    if (std::isnan(s)) reject("lp_norm: NaN in reduction");
    return std::pow(s * hn, 1.0 / p);
}

// ||f||_{L^p(w)} = (sum |f|^p w h^n)^{1/p}; w must be nonnegative, same grid.
inline double weighted_lp_norm(const SampledField& f, const SampledField& w, double p) {
    require(f.grid == w.grid, "weighted_lp_norm: field and weight grids differ");
    require(p >= 1.0 && p != kInfP, strf("weighted_lp_norm: p must be finite >= 1, got %g", p));
    const double hn = std::pow(f.grid.h(), f.grid.n);
    std::vector<double> terms(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i) {
        if (w.v[i] < 0) reject(strf("weighted_lp_norm: negative weight at flat index %zu", i));
        double a = std::fabs(f.v[i]);
        terms[i] = (p == 2.0 ? a * a : (p == 1.0 ? a : std::pow(a, p))) * w.v[i];
    }
    double s = pairwise_sum(terms);
    if (std::isnan(s)) reject("weighted_lp_norm: NaN in reduction");
    return std::pow(s * hn, 1.0 / p);
}

/* ---------------- Gauss-Legendre on [1,2] ---------------- */

struct Quadrature1D {
    std::vector<double> nodes, weights;  // on [1,2]; weights sum to 1
};

// Nodes/weights by Newton iteration on P_n; deterministic, no tables.
inline Quadrature1D gauss_legendre_12(int n) {
    require(n >= 1 && n <= 32, strf("gauss_legendre_12: order must be in [1,32], got %d", n));
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // initial guess on [-1,1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P'_n(x) by recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        // map [-1,1] -> [1,2]; jacobian 1/2, interval length 1 => weights sum to 1
        q.nodes[n - 1 - i] = 1.5 + 0.5 * x;
        q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);  // = (2/((1-x^2)P'^2)) * 1/2
    }
    return q;
}

/* ---------------- QuadratureSpec ---------------- */

// Discretization of the square-function integral: octaves j in [j_min,j_max]
// (annuli at radius ~ 2^j) and Gauss-Legendre nodes for t in [1,2].
struct QuadratureSpec {
    int j_min = 0, j_max = 1;
    std::vector<double> t_nodes, t_weights;

    int n_scales() const { return j_max - j_min + 1; }

    void validate(const GridSpec& g) const {
        require(j_min <= j_max, strf("QuadratureSpec: empty scale range [%d,%d]", j_min, j_max));
        double h = g.h();
        require(std::ldexp(1.0, j_min) >= 4.0 * h - 1e-12,
                strf("QuadratureSpec: 2^j_min=%g under the resolvability floor 4h=%g",
                     std::ldexp(1.0, j_min), 4.0 * h));
        require(std::ldexp(1.0, j_max) <= g.L / 4.0 + 1e-12,
                strf("QuadratureSpec: 2^j_max=%g exceeds L/4=%g (annulus would leave the box)",
                     std::ldexp(1.0, j_max), g.L / 4.0));
        require(!t_nodes.empty() && t_nodes.size() == t_weights.size(),
                "QuadratureSpec: node/weight size mismatch");
        double wsum = 0.0;
        for (size_t i = 0; i < t_nodes.size(); ++i) {
            require(t_nodes[i] >= 1.0 && t_nodes[i] <= 2.0,
                    strf("QuadratureSpec: node %g outside [1,2]", t_nodes[i]));
            require(t_weights[i] > 0.0, "QuadratureSpec: nonpositive weight");
            wsum += t_weights[i];
        }
        require(std::fabs(wsum - 1.0) < 1e-12,
                strf("QuadratureSpec: weights sum to %.17g, expected 1", wsum));
    }
};

// Default window.  The lower end uses a measured resolvability floor
// 2^j >= 16h (annulus inner radius >= 8 cells): thinner annuli carry several
// percent of rasterization noise in their L1 mass.  The upper end keeps the
// outer radius 2^j t <= L/2 so kernels of window-confined scenes never leave
// the representable domain.
inline QuadratureSpec default_quadrature(const GridSpec& g, int t_nodes = 4) {
    double h = g.h();
    int jmin = int(std::ceil(std::log2(16.0 * h) - 1e-9));
    int jmax = int(std::floor(std::log2(g.L / 4.0) + 1e-9));
    require(jmin <= jmax,
            strf("default_quadrature: no resolvable octaves at N=%d, L=%g (needs 16h <= L/4)",
                 g.N, g.L));
    QuadratureSpec q;
    q.j_min = jmin;
    q.j_max = jmax;
    Quadrature1D gl = gauss_legendre_12(t_nodes);
    q.t_nodes = gl.nodes;
    q.t_weights = gl.weights;
    q.validate(g);
    return q;
}

// Same node set with an explicit physical scale range (for cross-resolution
// comparisons, where truncation must match on both grids).
inline QuadratureSpec quadrature_with_range(const GridSpec& g, int j_min, int j_max,
                                            int t_nodes = 4) {
    QuadratureSpec q;
    q.j_min = j_min;
    q.j_max = j_max;
    Quadrature1D gl = gauss_legendre_12(t_nodes);
    q.t_nodes = gl.nodes;
    q.t_weights = gl.weights;
    q.validate(g);
    return q;
}

/* ---------------- MZF1 serialization ---------------- */

// Layout (little-endian):
//   bytes  0- 3  magic "MZF1"
//   bytes  4- 7  u32 dim
//   bytes  8-11  u32 N
//   bytes 12-19  f64 L
//   bytes 20-31  reserved, zero
//   then dim^N... N^dim f64 values in flat row-major order (ky*N + kx).
namespace detail {
inline void put_u32(std::string& s, uint32_t x) {
    for (int i = 0; i < 4; ++i) s.push_back(char((x >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& s, double d) {
    uint64_t x;
    std::memcpy(&x, &d, 8);
    for (int i = 0; i < 8; ++i) s.push_back(char((x >> (8 * i)) & 0xff));
}
inline uint32_t get_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline double get_f64(const unsigned char* p) {
    uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | p[i];
    double d;
    std::memcpy(&d, &x, 8);
    return d;
}
}  // namespace detail

inline void write_mzf1(const SampledField& f, const std::string& path) {
    std::string buf;
    buf.reserve(32 + 8 * f.v.size());
    buf += "MZF1";
    detail::put_u32(buf, uint32_t(f.grid.n));
    detail::put_u32(buf, uint32_t(f.grid.N));
    detail::put_f64(buf, f.grid.L);
    buf.append(12, '\0');
    for (double d : f.v) detail::put_f64(buf, d);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(bool(os), strf("write_mzf1: cannot open '%s'", path.c_str()));
    os.write(buf.data(), std::streamsize(buf.size()));
    require(bool(os), strf("write_mzf1: short write to '%s'", path.c_str()));
}

inline SampledField read_mzf1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), strf("read_mzf1: cannot open '%s'", path.c_str()));
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    require(buf.size() >= 32, strf("read_mzf1: '%s' truncated header (%zu bytes)", path.c_str(),
                                   buf.size()));
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    require(std::memcmp(p, "MZF1", 4) == 0, strf("read_mzf1: bad magic in '%s'", path.c_str()));
    GridSpec g;
    g.n = int(detail::get_u32(p + 4));
    g.N = int(detail::get_u32(p + 8));
    g.L = detail::get_f64(p + 12);
    g.validate();
    size_t want = 32 + 8 * g.cells();
    require(buf.size() == want, strf("read_mzf1: '%s' payload size %zu, expected %zu",
                                     path.c_str(), buf.size(), want));
    SampledField f(g);
    for (size_t i = 0; i < f.v.size(); ++i) f.v[i] = detail::get_f64(p + 32 + 8 * i);
    return f;
}

// CSV export (RFC-4180: CRLF, no trailing separator): index,x,y,value
inline void write_field_csv(const SampledField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(bool(os), strf("write_field_csv: cannot open '%s'", path.c_str()));
    os << "index,x,y,value\r\n";
    for (int ky = 0; ky < f.grid.N; ++ky)
        for (int kx = 0; kx < f.grid.N; ++kx) {
            size_t i = size_t(ky) * f.grid.N + kx;
            os << i << ',' << fmt_g17(f.grid.coord(kx)) << ',' << fmt_g17(f.grid.coord(ky))
               << ',' << fmt_g17(f.v[i]) << "\r\n";
        }
}

}  // namespace mz
