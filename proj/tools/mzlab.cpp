// mzlab -- command-line driver for the square-function / weighted-norm toolkit.
//
// Exit codes: 0 success, 1 failed numerical check, 2 usage or validation
// error, 3 missing golden values.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mz/experiments.hpp"
#include "mz/reference.hpp"
#include "mz/regress.hpp"

namespace {

using namespace mz;

// "a..b" (inclusive int range) or a single integer
std::vector<int> parse_int_range(const std::string& s) {
    size_t pos = s.find("..");
    if (pos == std::string::npos) return {std::stoi(s)};
    int a = std::stoi(s.substr(0, pos));
    int b = std::stoi(s.substr(pos + 2));
    require(a <= b, strf("bad range '%s': start exceeds stop", s.c_str()));
    std::vector<int> out;
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
}

// "start:stop:step" (inclusive, fp-tolerant) or a single value
std::vector<double> parse_double_range(const std::string& s) {
    size_t p1 = s.find(':');
    if (p1 == std::string::npos) return {std::stod(s)};
    size_t p2 = s.find(':', p1 + 1);
    require(p2 != std::string::npos, strf("bad range '%s': expected start:stop:step", s.c_str()));
    double start = std::stod(s.substr(0, p1));
    double stop = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
    double step = std::stod(s.substr(p2 + 1));
    require(step > 0.0 && stop >= start, strf("bad range '%s': need step > 0, stop >= start", s.c_str()));
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-9 * std::max(1.0, std::fabs(stop)); v += step)
        out.push_back(v);
    return out;
}

struct GlobalOpts {
    int n_grid = 256;
    double box = 8.0;
    int t_nodes = 4;
    uint64_t seed = 20240801;
    int threads = 1;
    std::string out;
};

SampledField load_input(const GlobalOpts& G, const std::string& scene, const std::string& file,
                        const GridSpec& g) {
    require(scene.empty() != file.empty(), "provide exactly one of --scene or --f");
    if (!file.empty()) {
        SampledField f = read_mzf1(file);
        require(f.grid == g, strf("%s: grid %dx%d box %g does not match requested %dx%d box %g",
                                  file.c_str(), f.grid.N, f.grid.N, f.grid.L, g.N, g.N, g.L));
        return f;
    }
    if (scene.rfind("seed:", 0) == 0)
        return make_random_scene(g, std::stoull(scene.substr(5)));
    return make_scene(scene, g);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mz;
    CLI::App app{"square-function and weighted-norm laboratory"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config");
    app.require_subcommand(1);

    GlobalOpts G;
    app.add_option("--n-grid", G.n_grid, "grid resolution per axis (power of two)");
    app.add_option("--box", G.box, "half-width L of the sampling window");
    app.add_option("--t-nodes", G.t_nodes, "quadrature nodes on [1,2]");
    app.add_option("--seed", G.seed, "seed for random scenes");
    app.add_option("--threads", G.threads, "worker threads");
    app.add_option("--out", G.out, "output path");

    // ---- apply ----
    auto* c_apply = app.add_subcommand("apply", "apply an operator to a scene or field");
    std::string ap_op = "marc", ap_omega = "cos", ap_scene, ap_file;
    int ap_l = 1;
    c_apply->add_option("--op", ap_op, "marc | marc-dyadic | marc-l | tsing | hlmax")
        ->check(CLI::IsMember({"marc", "marc-dyadic", "marc-l", "tsing", "hlmax"}));
    c_apply->add_option("--omega", ap_omega, "angular kernel name");
    c_apply->add_option("--scene", ap_scene, "named scene (or seed:<n>)");
    c_apply->add_option("--f", ap_file, "input field (.mzf)");
    c_apply->add_option("--l", ap_l, "mollification parameter");

    // ---- kernels ----
    auto* c_kern = app.add_subcommand("kernels", "dump truncated kernels and a manifest");
    std::string kn_omega = "cos", kn_j = "0..1", kn_dump;
    int kn_l = 0;
    c_kern->add_option("--omega", kn_omega, "angular kernel name");
    c_kern->add_option("--j", kn_j, "octave range a..b");
    c_kern->add_option("--l", kn_l, "mollification parameter (0 = none)");
    c_kern->add_option("--dump", kn_dump, "directory for .mzf kernel dumps");

    // ---- decay ----
    auto* c_decay = app.add_subcommand("decay", "frequency-side decay profiles");
    std::string dc_omega = "cos", dc_j = "0..1", dc_csv;
    c_decay->add_option("--omega", dc_omega, "angular kernel name");
    c_decay->add_option("--j", dc_j, "octave range a..b");
    c_decay->add_option("--csv", dc_csv, "output CSV path");

    // ---- approx ----
    auto* c_approx = app.add_subcommand("approx", "mollification error decay");
    std::string axo = "cos", ax_l = "1..3", ax_scene = "disk", ax_csv, ax_j;
    c_approx->add_option("--omega", axo, "angular kernel name");
    c_approx->add_option("--l", ax_l, "mollification range a..b");
    c_approx->add_option("--scene", ax_scene, "scene name");
    c_approx->add_option("--j", ax_j, "explicit octave range a..b (default window otherwise)");
    c_approx->add_option("--csv", ax_csv, "output CSV path");

    // ---- weights ----
    auto* c_wt = app.add_subcommand("weights", "weight-constant table for a power family");
    std::string wt_family = "power", wt_a = "0:1.5:0.125", wt_report;
    double wt_p = 2.0, wt_r = -1.0, wt_epsc = 0.25, wt_slack = 4.0;
    c_wt->add_option("--family", wt_family, "weight family")->check(CLI::IsMember({"power"}));
    c_wt->add_option("--a", wt_a, "exponent grid start:stop:step");
    c_wt->add_option("--p", wt_p, "integrability exponent");
    c_wt->add_option("--r", wt_r, "composite-constant parameter (default p)");
    c_wt->add_option("--eps-const", wt_epsc, "self-improvement epsilon constant");
    c_wt->add_option("--slack", wt_slack, "self-improvement slack");
    c_wt->add_option("--report", wt_report, "output CSV path (default --out)");

    // ---- sparse-check ----
    auto* c_sp = app.add_subcommand("sparse-check", "pointwise sparse domination constant");
    std::string sp_omega = "cos", sp_scene = "disk", sp_report, sp_family;
    int sp_l = 2;
    double sp_eta = 0.5;
    c_sp->add_option("--omega", sp_omega, "angular kernel name");
    c_sp->add_option("--scene", sp_scene, "scene name");
    c_sp->add_option("--l", sp_l, "mollification parameter");
    c_sp->add_option("--eta", sp_eta, "sparseness parameter in (0,1)");
    c_sp->add_option("--report", sp_report, "output JSON path (default --out)");
    c_sp->add_option("--dump-family", sp_family, "also dump the unshifted-grid family as JSON");

    // ---- weak11 ----
    auto* c_w11 = app.add_subcommand("weak11", "weak (1,1) level-set bound");
    std::string w11_omega = "cos", w11_scene = "spike", w11_lambda = "0.25:8:0.25", w11_report;
    int w11_l = 2;
    c_w11->add_option("--omega", w11_omega, "angular kernel name");
    c_w11->add_option("--scene", w11_scene, "scene name");
    c_w11->add_option("--l", w11_l, "mollification parameter");
    c_w11->add_option("--lambda", w11_lambda, "level grid start:stop:step");
    c_w11->add_option("--report", w11_report, "output JSON path (default --out)");

    // ---- sweep ----
    auto* c_sw = app.add_subcommand("sweep", "weighted-norm scaling experiment");
    std::string sw_kind = "square-function", sw_omega = "cos", sw_csv, sw_json;
    SweepConfig sw_cfg;
    c_sw->add_option("--kind", sw_kind, "square-function | singular-integral | maximal")
        ->check(CLI::IsMember({"square-function", "singular-integral", "maximal"}));
    c_sw->add_option("--omega", sw_omega, "angular kernel name");
    c_sw->add_option("--p", sw_cfg.p, "norm exponent");
    c_sw->add_option("--l", sw_cfg.l, "mollification parameter");
    c_sw->add_option("--a-max", sw_cfg.a_max, "power-weight ceiling (default 0.9 n (pc-1))");
    c_sw->add_option("--a-steps", sw_cfg.a_steps, "number of steps (rows = steps+1)");
    c_sw->add_option("--slack", sw_cfg.slack, "budget slack");
    c_sw->add_option("--scenes", sw_cfg.n_random_scenes, "random scenes added to the bank");
    c_sw->add_option("--csv", sw_csv, "row table CSV path");
    c_sw->add_option("--json", sw_json, "full report JSON path");

    // ---- regress ----
    auto* c_rg = app.add_subcommand("regress", "golden-value regression checks");
    std::string rg_goldens = "data/goldens.json", rg_filter, rg_junit, rg_json;
    bool rg_write = false;
    c_rg->add_option("--goldens", rg_goldens, "golden store path");
    c_rg->add_option("--filter", rg_filter, "substring filter on check names");
    c_rg->add_flag("--write-goldens", rg_write, "recompute and store golden values");
    c_rg->add_option("--junit", rg_junit, "JUnit XML output path");
    c_rg->add_option("--json", rg_json, "JSON summary output path");

    // global flags remain valid after a subcommand name
    for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        GridSpec g = make_grid(G.n_grid, G.box);

        if (*c_apply) {
            SampledField f = load_input(G, ap_scene, ap_file, g);
            SampledField out;
            if (ap_op == "hlmax") {
                out = hl_maximal(f);
            } else {
                AngularKernel omega = make_bank_kernel(ap_omega);
                if (ap_op == "tsing") {
                    out = rough_singular_integral(omega, f, 4.0 * g.h(), g.L / 2.0);
                } else {
                    QuadratureSpec quad = default_quadrature(g, G.t_nodes);
                    if (ap_op == "marc")
                        out = marcinkiewicz(omega, f, quad, G.threads).field;
                    else if (ap_op == "marc-dyadic")
                        out = marcinkiewicz_dyadic(omega, f, quad, G.threads).field;
                    else
                        out = marcinkiewicz_mollified(omega, f, ap_l, quad, G.threads).field;
                }
            }
            require(!G.out.empty(), "apply: --out is required");
            write_mzf1(out, G.out);
            std::cout << "wrote " << G.out << " (l2 = " << fmt_g17(lp_norm(out, 2.0)) << ")\n";
            return 0;
        }

        if (*c_kern) {
            AngularKernel omega = make_bank_kernel(kn_omega);
            QuadratureSpec quad = default_quadrature(g, G.t_nodes);
            if (!kn_dump.empty()) std::filesystem::create_directories(kn_dump);
            nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
            for (int j : parse_int_range(kn_j))
                for (size_t m = 0; m < quad.t_nodes.size(); ++m) {
                    double t = quad.t_nodes[m];
                    TruncatedKernel K = build_k_jt(omega, j, t, g);
                    SampledField field = K.field;
                    bool degraded = false;
                    if (kn_l > 0) field = smooth_kernel_relaxed(K, kn_l, &degraded);
                    nlohmann::ordered_json entry = {
                        {"omega", omega.id},
                        {"j", j},
                        {"t", t},
                        {"l", kn_l},
                        {"mollifier_degraded", degraded},
                        {"l1_mass", kernel_l1_mass(field)},
                        {"support_radius", kernel_support_radius(field)},
                        {"inner_radius", K.inner_radius()},
                        {"outer_radius", K.outer_radius()}};
                    if (!kn_dump.empty()) {
                        std::string file = strf("k_j%d_m%zu.mzf", j, m);
                        write_mzf1(field, kn_dump + "/" + file);
                        entry["file"] = file;
                    }
                    manifest.push_back(entry);
                }
            std::string mpath = !G.out.empty() ? G.out
                                : !kn_dump.empty() ? kn_dump + "/manifest.json"
                                                   : "";
            nlohmann::ordered_json doc;
            doc["version"] = kVersion;
            doc["kernels"] = manifest;
            if (mpath.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::ofstream outf(mpath, std::ios::binary);
                require(bool(outf), strf("cannot open %s", mpath.c_str()));
                outf << doc.dump(2) << "\n";
                std::cout << "wrote " << mpath << "\n";
            }
            return 0;
        }

        if (*c_decay) {
            AngularKernel omega = make_bank_kernel(dc_omega);
            QuadratureSpec quad = default_quadrature(g, G.t_nodes);
            std::string path = !dc_csv.empty() ? dc_csv : G.out;
            require(!path.empty(), "decay: provide --csv or --out");
            std::ofstream outf(path, std::ios::binary);
            require(bool(outf), strf("cannot open %s", path.c_str()));
            outf << "omega,j,t,shell_radius,magnitude\r\n";
            for (int j : parse_int_range(dc_j)) {
                double t = quad.t_nodes[quad.t_nodes.size() / 2];
                DecayProfile p = decay_profile(omega, j, t, g);
                for (size_t i = 0; i < p.radius.size(); ++i)
                    outf << omega.id << ',' << j << ',' << fmt_g17(t) << ','
                         << fmt_g17(p.radius[i]) << ',' << fmt_g17(p.magnitude[i]) << "\r\n";
            }
            std::cout << "wrote " << path << "\n";
            return 0;
        }

        if (*c_approx) {
            AngularKernel omega = make_bank_kernel(axo);
            QuadratureSpec quad = ax_j.empty()
                                      ? default_quadrature(g, G.t_nodes)
                                      : quadrature_with_range(g, parse_int_range(ax_j).front(),
                                                              parse_int_range(ax_j).back(),
                                                              G.t_nodes);
            SampledField f = make_scene(ax_scene, g);
            ApproxDecayResult r =
                approximation_decay(omega, f, parse_int_range(ax_l), quad, G.threads);
            std::string path = !ax_csv.empty() ? ax_csv : G.out;
            require(!path.empty(), "approx: provide --csv or --out");
            std::ofstream outf(path, std::ios::binary);
            require(bool(outf), strf("cannot open %s", path.c_str()));
            outf << "l,err_space,err_freq,err_scalar\r\n";
            for (const ApproxDecayRow& row : r.rows)
                outf << row.l << ',' << fmt_g17(row.err_space) << ',' << fmt_g17(row.err_freq)
                     << ',' << fmt_g17(row.err_scalar) << "\r\n";
            std::cout << "wrote " << path << " (theta_hat = " << fmt_g17(r.theta_hat) << ")\n";
            return 0;
        }

        if (*c_wt) {
            if (wt_r <= 0.0) wt_r = wt_p;
            std::vector<WeightTableRow> rows =
                weight_table(parse_double_range(wt_a), wt_p, wt_r, g, wt_epsc, wt_slack);
            std::string path = !wt_report.empty() ? wt_report : G.out;
            require(!path.empty(), "weights: provide --report or --out");
            write_weight_table_csv(rows, path);
            std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
            return 0;
        }

        if (*c_sp) {
            AngularKernel omega = make_bank_kernel(sp_omega);
            SampledField f = make_scene(sp_scene, g);
            QuadratureSpec quad = default_quadrature(g, G.t_nodes);
            SparseDominationResult r =
                sparse_domination_check(omega, f, sp_l, sp_eta, quad, G.threads);
            nlohmann::ordered_json doc;
            doc["version"] = kVersion;
            doc["config"] = {{"omega", omega.id}, {"scene", sp_scene}, {"l", sp_l},
                             {"eta", sp_eta},     {"N", g.N},          {"L", g.L}};
            doc["result"] = {{"constant", r.constant},
                             {"qprime", r.qprime},
                             {"flagged_cells", r.flagged}};
            if (!sp_family.empty()) {
                SampledField fpow = f;
                for (double& v : fpow.v) v = std::fabs(v);
                std::ofstream ff(sp_family, std::ios::binary);
                require(bool(ff), strf("cannot open %s", sp_family.c_str()));
                ff << sparse_family_json(build_sparse_family(fpow, build_grids()[0], sp_eta))
                          .dump(2)
                   << "\n";
            }
            std::string path = !sp_report.empty() ? sp_report : G.out;
            if (path.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::ofstream outf(path, std::ios::binary);
                require(bool(outf), strf("cannot open %s", path.c_str()));
                outf << doc.dump(2) << "\n";
                std::cout << "wrote " << path << "\n";
            }
            return 0;
        }

        if (*c_w11) {
            AngularKernel omega = make_bank_kernel(w11_omega);
            SampledField f = make_scene(w11_scene, g);
            QuadratureSpec quad = default_quadrature(g, G.t_nodes);
            Weak11Result r = weak11_check(omega, f, w11_l, parse_double_range(w11_lambda), quad,
                                          G.threads);
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const Weak11Row& row : r.rows)
                rows.push_back(
                    {{"lambda", row.lambda}, {"measure", row.measure}, {"value", row.value}});
            nlohmann::ordered_json doc;
            doc["version"] = kVersion;
            doc["config"] = {{"omega", omega.id}, {"scene", w11_scene}, {"l", w11_l}};
            doc["rows"] = rows;
            doc["result"] = {{"max_value", r.max_value}, {"ratio_to_l", r.ratio_to_l}};
            std::string path = !w11_report.empty() ? w11_report : G.out;
            if (path.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::ofstream outf(path, std::ios::binary);
                require(bool(outf), strf("cannot open %s", path.c_str()));
                outf << doc.dump(2) << "\n";
                std::cout << "wrote " << path << "\n";
            }
            return 0;
        }

        if (*c_sw) {
            sw_cfg.seed = G.seed;
            sw_cfg.threads = G.threads;
            SweepReport rep;
            if (sw_kind == "square-function") {
                AngularKernel omega = make_bank_kernel(sw_omega);
                rep = square_function_sweep(omega, g, sw_cfg, default_quadrature(g, G.t_nodes));
            } else if (sw_kind == "singular-integral") {
                rep = singular_integral_sweep(make_bank_kernel(sw_omega), g, sw_cfg);
            } else {
                rep = buckley_sweep(g, sw_cfg);
            }
            if (!sw_csv.empty()) write_sweep_csv(rep, sw_csv);
            if (!sw_json.empty()) {
                std::ofstream outf(sw_json, std::ios::binary);
                require(bool(outf), strf("cannot open %s", sw_json.c_str()));
                outf << sweep_json(rep).dump(2) << "\n";
            }
            std::cout << rep.kind << ": beta_hat = " << fmt_g17(rep.beta_hat)
                      << " (cap " << fmt_g17(rep.exponent_cap) << ", r2 "
                      << fmt_g17(rep.fit_r2) << "), rows " << (rep.rows_ok ? "ok" : "OVER BUDGET")
                      << ", " << (rep.passed ? "PASS" : "FAIL") << "\n";
            return rep.passed ? 0 : 1;
        }

        if (*c_rg) {
            if (rg_write) {
                regress_write_goldens(rg_goldens, rg_filter);
                std::cout << "goldens written to " << rg_goldens << "\n";
                return 0;
            }
            RegressReport rep = run_regress(rg_goldens, rg_filter);
            for (const RegressOutcome& o : rep.outcomes) {
                if (o.status == "pass")
                    std::cout << "pass    " << o.name << "\n";
                else if (o.status == "missing")
                    std::cout << "MISSING " << o.name << "\n";
                else
                    std::cout << "FAIL    " << o.name << ": expected " << fmt_g17(o.expected)
                              << ", got " << fmt_g17(o.actual) << " (rel err "
                              << strf("%.3g", o.rel_err) << ")\n";
            }
            std::cout << rep.n_pass << " passed, " << rep.n_fail << " failed, "
                      << rep.n_missing << " missing\n";
            if (!rg_junit.empty()) write_regress_junit(rep, rg_junit);
            if (!rg_json.empty()) {
                std::ofstream outf(rg_json, std::ios::binary);
                require(bool(outf), strf("cannot open %s", rg_json.c_str()));
                outf << regress_json(rep).dump(2) << "\n";
            }
            return rep.exit_code();
        }
    } catch (const contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
