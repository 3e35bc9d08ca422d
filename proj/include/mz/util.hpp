#pragma once

// util.hpp -- shared plumbing: error reporting, deterministic reductions,
// reproducible RNG, and a slot-based parallel loop.  Everything here is
// bit-reproducible for a fixed input regardless of worker count.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mz {

inline constexpr const char* kVersion = "mzlab 0.1.0";

/* ---------------- errors ---------------- */

// Contract violations (bad arguments, unsatisfied preconditions).
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// printf-style message helper.
inline std::string strf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    char buf[1024];
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return std::string(buf);
}

[[noreturn]] inline void reject(const std::string& msg) { throw contract_error(msg); }

inline void require(bool ok, const std::string& msg) {
    if (!ok) reject(msg);
}

/* ---------------- deterministic reductions ---------------- */

// Fixed-shape pairwise (tree) summation: the reduction order depends only on
// the array layout, never on worker count, so results are bit-reproducible.
inline double pairwise_sum(const double* a, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& a) {
    return pairwise_sum(a.data(), a.size());
}

// max with deterministic NaN rejection (NaN anywhere is a bug upstream).
inline double checked_max(const std::vector<double>& a, const char* what) {
    double m = -HUGE_VAL;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::isnan(a[i])) reject(strf("%s: NaN at flat index %zu", what, i));
        if (a[i] > m) m = a[i];
    }
    return m;
}

/* ---------------- RNG ---------------- */

// mt19937_64 with hand-rolled mappings.  std:: distributions are
// implementation-defined; these are not.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}

    // uniform in [0,1) with 53-bit resolution
    double uniform() { return double(eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) {
        // rejection sampling to avoid modulo bias
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = eng(); } while (x >= lim);
        return x % n;
    }
};

/* ---------------- parallel loop ---------------- */

// Runs fn(i) for i in [0, n).  Each iteration writes only its own slot(s), so
// any thread count produces identical results; reductions happen afterwards,
// sequentially, in index order.
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t t = std::min<size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::exception_ptr err;
    std::mutex err_mx;
    for (size_t k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
            try {
                // static contiguous partition: worker k owns [lo, hi)
                size_t lo = n * k / t, hi = n * (k + 1) / t;
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

/* ---------------- misc numeric ---------------- */

inline bool is_pow2(uint64_t x) { return x && (x & (x - 1)) == 0; }

// round-trip float formatting for reports
inline std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

}  // namespace mz
