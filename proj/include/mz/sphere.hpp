#pragma once

// sphere.hpp -- the angular kernel Omega on the unit circle: uniform samples
// with trapezoid quadrature, mean-zero projection, L^q sphere norms, the
// degree-zero homogeneous extension, and the standard kernel bank.

#include <fstream>
#include <limits>

#include "util.hpp"

namespace mz {

/* ---------------- AngularKernel ---------------- */

struct AngularKernel {
    std::vector<double> samples;  // Omega(theta_m), theta_m = 2*pi*m/M
    double q_class = kInf;        // declared integrability class, q in (1, inf]
    bool projected = false;       // mean-zero projection applied
    std::string id = "custom";

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    int M() const { return int(samples.size()); }
    double quad_weight() const { return 2.0 * M_PI / M(); }
    double theta(int m) const { return 2.0 * M_PI * m / M(); }

    void validate() const {
        require(M() >= 64 && M() % 2 == 0,
                strf("AngularKernel: M must be even and >= 64, got %d", M()));
        for (double s : samples)
            require(std::isfinite(s), "AngularKernel: non-finite sample");
    }

    double mean() const {
        return pairwise_sum(samples) * quad_weight();
    }
};

/* ---------------- operations ---------------- */

// Subtract the quadrature mean.  Idempotent by construction: a projected
// kernel is returned unchanged (its invariant |mean| <= 1e-10 already holds,
// and a second subtraction of the ~1e-16 residual would break bit-equality).
inline AngularKernel mean_zero_project(const AngularKernel& raw) {
    raw.validate();
    if (raw.projected) return raw;
    AngularKernel out = raw;
    // two passes: the second removes the rounding residue of the first
    for (int pass = 0; pass < 2; ++pass) {
        double m = pairwise_sum(out.samples) / out.M();
        for (double& s : out.samples) s -= m;
    }
    out.projected = true;
    double resid = std::fabs(out.mean());
    require(resid <= 1e-10, strf("mean_zero_project: residual mean %g", resid));
    return out;
}

// ||Omega||_{L^q(S^1)} = (sum |Omega|^q * 2pi/M)^{1/q}; max for q = inf.
inline double lq_sphere_norm(const AngularKernel& k, double q) {
    require(q > 1.0, strf("lq_sphere_norm: q must be > 1, got %g", q));
    if (q == AngularKernel::kInf) {
        double m = 0.0;
        for (double s : k.samples) m = std::max(m, std::fabs(s));
        return m;
    }
    std::vector<double> terms(k.samples.size());
    for (size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::fabs(k.samples[i]), q);
    return std::pow(pairwise_sum(terms) * k.quad_weight(), 1.0 / q);
}

// Circle L1 mass (utility for kernel mass laws; not subject to the q>1 gate).
inline double l1_sphere_mass(const AngularKernel& k) {
    std::vector<double> terms(k.samples.size());
    for (size_t i = 0; i < terms.size(); ++i) terms[i] = std::fabs(k.samples[i]);
    return pairwise_sum(terms) * k.quad_weight();
}

namespace detail {
// Angle in [0, 2pi) from the correctly-rounded component quotient (octant
// reduction).  Exactly-scaled inputs (lambda*x representable) produce the
// identical quotient, hence bit-identical angles -- the degree-zero
// homogeneity property holds exactly, not just to rounding.
inline double angle_of(double x, double y) {
    double ax = std::fabs(x), ay = std::fabs(y);
    double a = (ay <= ax) ? std::atan(ay / ax) : M_PI / 2 - std::atan(ax / ay);
    if (x >= 0.0) return (y >= 0.0) ? a : 2.0 * M_PI - a;
    return (y >= 0.0) ? M_PI - a : M_PI + a;
}
}  // namespace detail

// Omega(x/|x|) by linear interpolation between adjacent angular samples.
inline double evaluate_homogeneous(const AngularKernel& k, double x, double y) {
    require(x != 0.0 || y != 0.0, "evaluate_homogeneous: x = 0");
    double u = detail::angle_of(x, y) * k.M() / (2.0 * M_PI);
    int i0 = int(std::floor(u));
    double frac = u - i0;
    i0 %= k.M();
    if (i0 < 0) i0 += k.M();
    int i1 = (i0 + 1) % k.M();
    return (1.0 - frac) * k.samples[i0] + frac * k.samples[i1];
}

// Scale all samples (normalization helper; preserves the projected flag since
// scaling keeps the mean at ~0).
inline AngularKernel scale_kernel(const AngularKernel& k, double c) {
    AngularKernel out = k;
    for (double& s : out.samples) s *= c;
    return out;
}

/* ---------------- kernel bank ---------------- */

// cos theta, sin 3theta (smooth, q=inf); sign(cos theta) (rough, q=inf);
// |theta-pi|^{-1/(2q)} clipped at the sample scale for q in {2,4}
// (in L^q but not L^{2q}).  All mean-zero projected.
inline AngularKernel make_bank_kernel(const std::string& name, int M = 2048) {
    require(M >= 64 && M % 2 == 0, strf("make_bank_kernel: bad M=%d", M));
    AngularKernel k;
    k.samples.resize(M);
    k.id = name;
    auto th = [&](int m) { return 2.0 * M_PI * m / M; };
    if (name == "cos") {
        for (int m = 0; m < M; ++m) k.samples[m] = std::cos(th(m));
        k.q_class = AngularKernel::kInf;
    } else if (name == "sin3") {
        for (int m = 0; m < M; ++m) k.samples[m] = std::sin(3.0 * th(m));
        k.q_class = AngularKernel::kInf;
    } else if (name == "step") {
        for (int m = 0; m < M; ++m) {
            double c = std::cos(th(m));
            k.samples[m] = (c > 0.0) - (c < 0.0);
        }
        k.q_class = AngularKernel::kInf;
    } else if (name == "sing-q2" || name == "sing-q4") {
        double q = (name == "sing-q2") ? 2.0 : 4.0;
        double expo = -1.0 / (2.0 * q);
        double clip = 2.0 * M_PI / M;  // clip the singularity at the sample scale
        for (int m = 0; m < M; ++m) {
            double d = std::fabs(th(m) - M_PI);
            k.samples[m] = std::pow(std::max(d, clip), expo);
        }
        k.q_class = q;
    } else {
        reject(strf("make_bank_kernel: unknown kernel '%s' "
                    "(known: cos, sin3, step, sing-q2, sing-q4)", name.c_str()));
    }
    return mean_zero_project(k);
}

inline const std::vector<std::string>& bank_names() {
    static const std::vector<std::string> names = {"cos", "sin3", "step", "sing-q2", "sing-q4"};
    return names;
}

inline std::vector<AngularKernel> kernel_bank(int M = 2048) {
    std::vector<AngularKernel> bank;
    for (const auto& n : bank_names()) bank.push_back(make_bank_kernel(n, M));
    return bank;
}

// Kernel scaled so ||Omega||_{L^q(S^1)} = 1 in its declared class.
inline AngularKernel normalized_kernel(const AngularKernel& k) {
    double nrm = lq_sphere_norm(k, k.q_class);
    require(nrm > 0.0, strf("normalized_kernel: '%s' has zero L^q norm", k.id.c_str()));
    return scale_kernel(k, 1.0 / nrm);
}

/* ---------------- CSV ---------------- */

inline void write_angular_csv(const AngularKernel& k, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(bool(os), strf("write_angular_csv: cannot open '%s'", path.c_str()));
    os << "theta,value\r\n";
    for (int m = 0; m < k.M(); ++m)
        os << fmt_g17(k.theta(m)) << ',' << fmt_g17(k.samples[m]) << "\r\n";
}

}  // namespace mz
