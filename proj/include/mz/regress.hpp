#pragma once

// regress.hpp -- named scalar regression checks at pinned configurations, with
// a JSON golden store, JUnit XML / JSON summaries (no timings, so repeated
// runs are byte-identical), and exit-code semantics: 0 all pass, 1 mismatch,
// 3 goldens missing.

#include <map>

#include "experiments.hpp"
#include "regress_checks.hpp"

namespace mz {

struct RegressOutcome {
    std::string name;
    double expected = 0.0, actual = 0.0, rel_err = 0.0;
    std::string status;  // "pass" | "fail" | "missing"
};

struct RegressReport {
    std::vector<RegressOutcome> outcomes;
    int n_pass = 0, n_fail = 0, n_missing = 0;
    int exit_code() const { return n_fail > 0 ? 1 : (n_missing > 0 ? 3 : 0); }
};

inline std::map<std::string, double> load_goldens(const std::string& path) {
    std::map<std::string, double> out;
    std::ifstream in(path);
    if (!in) return out;
    nlohmann::json j = nlohmann::json::parse(in);
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
    return out;
}

inline void write_goldens(const std::map<std::string, double>& goldens,
                          const std::string& path) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : goldens) j[k] = v;
    std::ofstream out(path, std::ios::binary);
    require(bool(out), strf("write_goldens: cannot open %s", path.c_str()));
    out << j.dump(2) << "\n";
}

// Compute all checks matching the filter and merge them into the golden store.
inline void regress_write_goldens(const std::string& goldens_path,
                                  const std::string& filter = "") {
    std::map<std::string, double> goldens = load_goldens(goldens_path);
    for (const RegressCheck& c : regress_checks()) {
        if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
        std::fprintf(stderr, "golden %s ...\n", c.name.c_str());
        goldens[c.name] = c.eval();
    }
    write_goldens(goldens, goldens_path);
}

inline RegressReport run_regress(const std::string& goldens_path,
                                 const std::string& filter = "") {
    std::map<std::string, double> goldens = load_goldens(goldens_path);
    RegressReport rep;
    for (const RegressCheck& c : regress_checks()) {
        if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
        RegressOutcome o;
        o.name = c.name;
        auto it = goldens.find(c.name);
        if (it == goldens.end()) {
            o.status = "missing";
            rep.n_missing++;
        } else {
            o.expected = it->second;
            o.actual = c.eval();
            double scale = std::max(std::fabs(o.expected), 1e-300);
            o.rel_err = std::fabs(o.actual - o.expected) / scale;
            if (o.rel_err <= c.rel_tol) {
                o.status = "pass";
                rep.n_pass++;
            } else {
                o.status = "fail";
                rep.n_fail++;
            }
        }
        rep.outcomes.push_back(o);
    }
    require(!rep.outcomes.empty(),
            filter.empty() ? "regress: no checks registered"
                           : strf("regress: no checks match filter '%s'", filter.c_str()));
    if (rep.n_missing > 0)
        std::fprintf(stderr,
                     "regress: %d golden value(s) missing from %s; regenerate with "
                     "`mzlab regress --write-goldens`\n",
                     rep.n_missing, goldens_path.c_str());
    return rep;
}

/* ---------------- report serialization (timing-free) ---------------- */

namespace detail {
inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace detail

inline void write_regress_junit(const RegressReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(bool(out), strf("write_regress_junit: cannot open %s", path.c_str()));
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<testsuite name=\"regress\" tests=\"" << rep.outcomes.size() << "\" failures=\""
        << rep.n_fail << "\" skipped=\"" << rep.n_missing << "\">\n";
    for (const RegressOutcome& o : rep.outcomes) {
        out << "  <testcase classname=\"regress\" name=\"" << detail::xml_escape(o.name)
            << "\"";
        if (o.status == "pass") {
            out << "/>\n";
        } else if (o.status == "missing") {
            out << "><skipped message=\"golden value missing\"/></testcase>\n";
        } else {
            out << "><failure message=\""
                << detail::xml_escape(strf("expected %s, got %s (rel err %.3g)",
                                           fmt_g17(o.expected).c_str(),
                                           fmt_g17(o.actual).c_str(), o.rel_err))
                << "\"/></testcase>\n";
        }
    }
    out << "</testsuite>\n";
}

inline nlohmann::ordered_json regress_json(const RegressReport& rep) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const RegressOutcome& o : rep.outcomes)
        checks.push_back({{"name", o.name},
                          {"status", o.status},
                          {"expected", o.expected},
                          {"actual", o.actual},
                          {"rel_err", o.rel_err}});
    j["checks"] = checks;
    j["counts"] = {{"pass", rep.n_pass}, {"fail", rep.n_fail}, {"missing", rep.n_missing}};
    j["exit_code"] = rep.exit_code();
    return j;
}

}  // namespace mz
