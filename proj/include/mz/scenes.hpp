#pragma once

// scenes.hpp -- the built-in test-function bank.  Every scene is supported in
// |x|_inf <= 7L/16, which leaves room for kernels of radius up to L/2 plus
// mollifier margins before the convolution window would truncate anything.

#include "field.hpp"

namespace mz {

inline double scene_support_cap(const GridSpec& g) { return 7.0 * g.L / 16.0; }

namespace detail {
// C^2 radial bump (1 - s^2)^3 on s < 1
inline double poly_bump(double r, double rho) {
    double s = r / rho;
    if (s >= 1.0) return 0.0;
    double t = 1.0 - s * s;
    return t * t * t;
}
}  // namespace detail

// nm in {disk, gaussian, two-bump, annulus-bump, wbump, wbump2..wbump5, spike}.
inline SampledField make_scene(const std::string& nm, const GridSpec& g) {
    g.validate();
    const double L = g.L, cap = scene_support_cap(g);
    if (nm == "disk") {
        double r0 = L / 8.0;
        return sample(g, [=](double x, double y) {
            return std::hypot(x, y) <= r0 ? 1.0 : 0.0;
        });
    }
    if (nm == "gaussian") {
        double w = L / 4.0;
        return sample(g, [=](double x, double y) {
            if (std::max(std::fabs(x), std::fabs(y)) > cap) return 0.0;
            double r = std::hypot(x, y) / w;
            return std::exp(-r * r);
        });
    }
    if (nm == "two-bump") {
        double c = L / 4.0, rho = L / 8.0;
        return sample(g, [=](double x, double y) {
            return detail::poly_bump(std::hypot(x - c, y), rho) +
                   detail::poly_bump(std::hypot(x + c, y), rho);
        });
    }
    if (nm == "annulus-bump") {
        double r0 = 3.0 * L / 16.0, w = L / 16.0;
        return sample(g, [=](double x, double y) {
            double d = (std::hypot(x, y) - r0) / w;
            return (d * d >= 1.0) ? 0.0 : std::exp(-1.0 / (1.0 - d * d));
        });
    }
    if (nm.rfind("wbump", 0) == 0) {
        // weight-focused bumps: mass piled near the origin, where power
        // weights |x|^a concentrate their constant
        std::string suffix = nm.substr(5);
        int m = suffix.empty() ? 3 : -1;
        if (!suffix.empty() && suffix.size() == 1 && suffix[0] >= '2' && suffix[0] <= '5')
            m = suffix[0] - '0';
        require(m >= 2, strf("make_scene: unknown scene '%s' (wbump takes suffix 2..5)",
                             nm.c_str()));
        double rho = L / std::ldexp(1.0, m);
        return sample(g, [=](double x, double y) {
            return detail::poly_bump(std::hypot(x, y), rho);
        });
    }
    if (nm == "spike") {
        // unit point mass: 1/h^2 at the cell nearest the origin
        SampledField f;
        f.grid = g;
        f.v.assign(g.cells(), 0.0);
        int k = g.N / 2;  // coord(N/2) = h/2, the closest center to 0
        f.v[size_t(k) * g.N + k] = 1.0 / (g.h() * g.h());
        return f;
    }
    reject(strf("make_scene: unknown scene '%s' (known: disk, gaussian, two-bump, "
                "annulus-bump, wbump, wbump2..wbump5, spike)", nm.c_str()));
}

inline const std::vector<std::string>& scene_names() {
    static const std::vector<std::string> names = {
        "disk", "gaussian", "two-bump", "annulus-bump", "wbump2", "wbump3", "wbump4", "wbump5",
        "spike"};
    return names;
}

// Seeded random smooth bump cluster: 3 bumps, centers in |x|_inf <= 5L/16,
// radii in [L/16, L/8], signed amplitudes in [-2, -1/2] u [1/2, 2].
inline SampledField make_random_scene(const GridSpec& g, uint64_t seed) {
    g.validate();
    Rng rng(seed);
    const double L = g.L;
    struct Bump {
        double cx, cy, rho, amp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 3; ++i) {
        Bump b;
        b.cx = rng.uniform(-5.0 * L / 16.0, 5.0 * L / 16.0);
        b.cy = rng.uniform(-5.0 * L / 16.0, 5.0 * L / 16.0);
        b.rho = rng.uniform(L / 16.0, L / 8.0);
        double a = rng.uniform(0.5, 2.0);
        b.amp = (rng.uniform() < 0.5) ? -a : a;
        bumps.push_back(b);
    }
    return sample(g, [bumps](double x, double y) {
        double v = 0.0;
        for (const auto& b : bumps)
            v += b.amp * detail::poly_bump(std::hypot(x - b.cx, y - b.cy), b.rho);
        return v;
    });
}

// The standard 10-scene bank for operator equivalence and norm measurements.
inline std::vector<std::pair<std::string, SampledField>> standard_bank(const GridSpec& g) {
    std::vector<std::pair<std::string, SampledField>> bank;
    for (const char* nm : {"disk", "gaussian", "two-bump", "annulus-bump", "wbump2", "wbump4"})
        bank.emplace_back(nm, make_scene(nm, g));
    for (uint64_t s = 1; s <= 4; ++s)
        bank.emplace_back(strf("rand%llu", (unsigned long long)s), make_random_scene(g, s));
    return bank;
}

}  // namespace mz
