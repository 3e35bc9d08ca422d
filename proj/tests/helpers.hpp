#pragma once

// Shared helpers for the test suite: relative-difference metrics, temp-file
// management, and the umbrella include set.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "mz/experiments.hpp"
#include "mz/reference.hpp"
#include "mz/regress.hpp"

namespace tst {

inline double rel_l2(const mz::SampledField& a, const mz::SampledField& b) {
    REQUIRE(a.v.size() == b.v.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        double d = a.v[i] - b.v[i];
        num += d * d;
        den += b.v[i] * b.v[i];
    }
    REQUIRE(den > 0.0);
    return std::sqrt(num / den);
}

inline double max_abs(const mz::SampledField& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::fabs(x));
    return m;
}

inline double max_abs_diff(const mz::SampledField& a, const mz::SampledField& b) {
    REQUIRE(a.v.size() == b.v.size());
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
    return m;
}

// Unique temp path that cleans up on destruction.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& stem) {
        path = (std::filesystem::temp_directory_path() /
                (stem + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter()++)))
                   .string();
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

inline std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(bool(is));
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace tst
