#ifndef SSB_CLI_COMMANDS_HPP
#define SSB_CLI_COMMANDS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssb/cli/config.hpp"
#include "ssb/cli/report.hpp"
#include "ssb/ssb.hpp"

namespace ssb::cli {

enum ExitCode : int { exit_ok = 0, exit_comparison = 1, exit_config = 2, exit_domain = 3 };

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    // roots / families
    std::optional<int> k;
    std::string family_case;
    double beta = 1.0, gamma = 0.0, delta = 0.0;
    double r_min = 0.1, r_max = 10.0;
    int r_count = 50;
};

using ojson = nlohmann::ordered_json;

inline json load_config(const Options& o) {
    if (o.config_path.empty()) return json::object();
    return load_json_file(o.config_path);
}

inline std::uint64_t effective_seed(const Options& o, const json& cfg) {
    if (o.seed) return *o.seed;
    return get_or<std::uint64_t>(cfg, "seed", 0);
}

inline ojson coords_json(const Vec& v) {
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline std::string coords_cell(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + Report::cell(ojson(v(i)));
    return s;
}

// ---------------------------------------------------------------------------
// verify

struct Comparison {
    double closed_form;
    double oracle;
    double abs_error;
};

/// Closed form vs oracle for the configured function over sampled points.
/// Passing rows satisfy |closed − oracle| ≤ tol (1 + |oracle|).
inline int cmd_verify(const Options& o, Report& report) {
    const json cfg = load_config(o);
    const BaseSpec base = parse_base(require<json>(cfg, "base"));
    const int m = base.chart.dim();
    const BundleConfig bundle = parse_bundle(require<json>(cfg, "bundle"), m);
    const int k = bundle.rank();
    const WeightProfile weights = parse_weights(cfg.contains("weights") ? cfg["weights"] : json("sasaki"));
    const DiffConfig diff = parse_diff(cfg.contains("diff") ? cfg["diff"] : json());
    const MetricField field(base.chart, bundle, weights);

    const json tol_cfg = cfg.contains("tolerance") ? cfg["tolerance"] : json::object();
    const double tol_lap = o.tolerance.value_or(get_or<double>(tol_cfg, "laplacian", 1e-6));
    const double tol_bilap = o.tolerance.value_or(get_or<double>(tol_cfg, "bilaplacian", 1e-3));

    const json fn = require<json>(cfg, "function");
    const auto kind = require<std::string>(fn, "kind");
    std::vector<std::string> quantities{"laplacian", "bilaplacian"};
    if (cfg.contains("quantities")) quantities = cfg["quantities"].get<std::vector<std::string>>();
    for (const auto& q : quantities)
        if (q != "laplacian" && q != "bilaplacian" && q != "gradient" && q != "div_xi")
            throw config_error("unknown quantity '" + q + "'");

    // Sampling: x in a margin-shrunk chart box; u in a cube or on r-shells.
    const json grid = cfg.contains("grid") ? cfg["grid"] : json::object();
    const int count = get_or<int>(grid, "points", 20);
    if (count < 1) throw config_error("grid.points must be positive");
    std::vector<Interval> x_box;
    if (grid.contains("x_box")) {
        x_box = parse_box(grid["x_box"], m);
    } else {
        for (const auto& iv : base.chart.domain()) {
            const double pad = 0.1 * (iv.hi - iv.lo);
            x_box.push_back({iv.lo + pad, iv.hi - pad});
        }
    }
    Rng rng(effective_seed(o, cfg));
    std::vector<TotalPoint> points;
    if (grid.contains("r")) {
        points = sample_radial_points(rng, x_box, bundle.fiber_metric(), parse_interval(grid["r"]), count);
    } else {
        const Interval u_box = grid.contains("u_box") ? parse_interval(grid["u_box"]) : Interval{-1.5, 1.5};
        points = sample_box_points(rng, x_box, k, u_box, count);
    }

    std::optional<BaseFunction> bf;
    std::optional<RadialFunction> rf;
    if (kind == "vertical_lift") {
        bf = parse_base_function(require<json>(fn, "f"), base, diff);
    } else if (kind == "radial") {
        rf = parse_radial(require<json>(fn, "alpha"));
    } else {
        throw config_error("function kind must be vertical_lift or radial");
    }
    const ScalarFieldOnE F = bf ? ScalarFieldOnE::vertical_lift(*bf, m, k) : ScalarFieldOnE::r_radial(*rf, bundle, m);

    auto compute = [&](const std::string& q, const TotalPoint& p) -> Comparison {
        const double r = field.radius(p);
        if (q == "laplacian") {
            const double c = bf ? laplacian_vertical_lift(*bf, field, p) : laplacian_radial(*rf, weights, m, k, r);
            const double n = laplace_beltrami_numeric(field, F, p, diff);
            return {c, n, std::abs(c - n)};
        }
        if (q == "bilaplacian") {
            const double c = bf ? bilaplacian_vertical_lift(*bf, field, p) : bilaplacian_radial(*rf, weights, m, k, r);
            const double n = bilaplacian_numeric(field, F, p, diff);
            return {c, n, std::abs(c - n)};
        }
        if (q == "gradient") {
            const Vec c = bf ? grad_vertical_lift(*bf, field, p) : grad_radial(*rf, field, p);
            const Vec n = gradient_numeric(field, F, p, diff);
            // Norms in the value columns, largest component mismatch as the error.
            return {c.norm(), n.norm(), (c - n).cwiseAbs().maxCoeff()};
        }
        const double c = div_xi_closed_form(weights, m, k, r);
        const double n = divergence_numeric(field, VectorFieldOnE::tautological(m, k), p, diff);
        return {c, n, std::abs(c - n)};
    };

    double max_abs = 0.0, max_rel = 0.0;
    int passed = 0, total = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        for (const auto& q : quantities) {
            const Comparison c = compute(q, p);
            const double tol = q == "bilaplacian" ? tol_bilap : tol_lap;
            const double abs_err = c.abs_error;
            const double rel_err = abs_err / (1.0 + std::abs(c.oracle));
            const bool ok = std::isfinite(abs_err) && rel_err <= tol;
            max_abs = std::max(max_abs, abs_err);
            max_rel = std::max(max_rel, rel_err);
            passed += ok ? 1 : 0;
            ++total;
            report.add(ojson{{"point", static_cast<int>(i)},
                             {"x", coords_cell(p.x)},
                             {"u", coords_cell(p.u)},
                             {"r", field.radius(p)},
                             {"quantity", q},
                             {"closed_form", c.closed_form},
                             {"oracle", c.oracle},
                             {"abs_error", abs_err},
                             {"rel_error", rel_err},
                             {"pass", ok}});
        }
    }

    std::string classification;
    if (bf) {
        classification = std::string(to_string(classify_vertical_lift(*bf, weights, m, k, points, bundle.fiber_metric())));
    } else {
        std::vector<double> radii;
        for (const auto& p : points) radii.push_back(field.radius(p));
        classification = std::string(to_string(classify(*rf, weights, m, k, radii)));
    }

    auto& s = report.summary();
    s["rows"] = total;
    s["passed"] = passed;
    s["max_abs_error"] = max_abs;
    s["max_rel_error"] = max_rel;
    s["classification"] = classification;
    return passed == total ? exit_ok : exit_comparison;
}

// ---------------------------------------------------------------------------
// roots

inline std::string parity_label(int k) {
    if (k == 1) return "k1";
    if (k == 2) return "k2";
    return k % 2 == 0 ? "even" : "odd";
}

inline int cmd_roots(const Options& o, std::ostream& out, Format f) {
    if (!o.k) throw config_error("roots needs --k");
    const int k = *o.k;
    if (k < 1) throw config_error("k must be at least 1");
    const ExponentRoots roots = exponent_roots(k);
    std::string list;
    for (std::size_t i = 0; i < roots.roots.size(); ++i)
        list += (i ? ", " : "") + to_string(roots.roots[i]);
    if (roots.double_root) list += " (double)";
    if (f == Format::records) {
        ojson arr = ojson::array();
        for (const auto& n : roots.roots) arr.push_back(to_string(n));
        out << ojson{{"k", k},
                     {"case", parity_label(k)},
                     {"roots", arr},
                     {"double_root", roots.double_root},
                     {"discriminant", to_string(roots.discriminant)}}
                   .dump()
            << '\n';
    } else {
        out << "k=" << k << " case=" << parity_label(k) << " discriminant=" << to_string(roots.discriminant) << '\n';
        out << list << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// families

/// |residual| ≤ tol · Σ|terms| (exact zero always passes).
inline bool residual_within(double residual, double scale, double tol) {
    return std::abs(residual) <= tol * scale || residual == 0.0;
}

inline double sasaki_residual_scale(const RadialFunction& rf, int k, double r) {
    return 2.0 * r * r * std::abs(rf(r, 4)) + (3.0 * k + 4.0) * r * std::abs(rf(r, 3)) +
           k * (k + 2.0) * std::abs(rf(r, 2));
}

inline int cmd_families(const Options& o, Report& report) {
    const json cfg = load_config(o);
    FamilyParams fp;
    std::vector<double> grid;
    int m = 1;
    if (cfg.contains("family")) {
        fp = parse_family(cfg["family"]);
        grid = parse_r_grid(cfg.contains("r_grid") ? cfg["r_grid"] : json());
        m = get_or<int>(cfg, "m", 1);
    } else {
        if (!o.k) throw config_error("families needs --k or a config with a 'family' entry");
        fp.k = *o.k;
        fp.family = o.family_case.empty() ? default_case(fp.k) : parse_family_case(o.family_case);
        fp.beta = o.beta;
        fp.gamma = o.gamma;
        fp.delta = o.delta;
        if (!(o.r_min > 0.0) || !(o.r_max >= o.r_min)) throw config_error("bad r range");
        grid = linspace(o.r_min, o.r_max, o.r_count);
    }
    const double tol = o.tolerance.value_or(get_or<double>(cfg, "tolerance", 1e-12));
    const RadialFunction rf = radial_family(fp);
    const WeightProfile w = presets::sasaki();

    int passed = 0;
    double max_res = 0.0;
    for (double r : grid) {
        const double res = sasaki_radial_residual(rf, fp.k, r);
        const bool ok = residual_within(res, sasaki_residual_scale(rf, fp.k, r), tol);
        passed += ok ? 1 : 0;
        max_res = std::max(max_res, std::abs(res));
        report.add(ojson{{"r", r},
                         {"alpha", rf(r, 0)},
                         {"alpha_prime", rf(r, 1)},
                         {"laplacian", laplacian_radial(rf, w, m, fp.k, r)},
                         {"bilaplacian", bilaplacian_radial(rf, w, m, fp.k, r)},
                         {"sasaki_radial_residual", res},
                         {"pass", ok}});
    }
    auto& s = report.summary();
    s["k"] = fp.k;
    s["case"] = std::string(to_string(fp.family));
    s["rows"] = static_cast<int>(grid.size());
    s["passed"] = passed;
    s["max_abs_residual"] = max_res;
    return passed == static_cast<int>(grid.size()) ? exit_ok : exit_comparison;
}

// ---------------------------------------------------------------------------
// sweep

inline std::vector<int> int_list(const json& j, const char* key, std::vector<int> fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].get<std::vector<int>>();
}

inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw config_error("bad rational '" + s + "'");
    }
}

inline int cmd_sweep(const Options& o, Report& report) {
    const json cfg = load_config(o);
    const json sw = require<json>(cfg, "sweep");
    const auto kind = require<std::string>(sw, "kind");
    int passed = 0, total = 0;

    if (kind == "equation_E") {
        const auto ms = int_list(sw, "m", {1, 2, 3});
        const auto ks = int_list(sw, "k", {1, 2, 3});
        std::vector<json> wspecs;
        if (sw.contains("weights")) {
            for (const auto& w : sw["weights"]) wspecs.push_back(w);
        } else {
            wspecs.push_back("sasaki");
        }
        const auto grid = parse_r_grid(sw.contains("r_grid") ? sw["r_grid"] : json(), 0.1, 5.0, 25);
        const std::optional<double> expect =
            sw.contains("expect") ? std::optional<double>(sw["expect"].get<double>()) : std::nullopt;
        const double tol = o.tolerance.value_or(get_or<double>(sw, "tolerance", 1e-12));
        for (const auto& ws : wspecs) {
            const WeightProfile w = parse_weights(ws);
            for (int m : ms)
                for (int k : ks)
                    for (double r : grid) {
                        const auto e = equation_E_residual(w, m, k, r);
                        const bool ok = !expect || std::abs(e.e - *expect) <= tol * (1.0 + std::abs(*expect));
                        passed += ok ? 1 : 0;
                        ++total;
                        report.add(ojson{{"weights", w.name()},
                                         {"m", m},
                                         {"k", k},
                                         {"r", r},
                                         {"E", e.e},
                                         {"E_prime", e.e_prime},
                                         {"pass", ok}});
                    }
        }
    } else if (kind == "exponent") {
        const auto ks = int_list(sw, "k", {1, 2, 3, 4, 5, 6, 7, 8});
        std::vector<std::string> samples{"1/2", "1", "3/2", "2", "5/3"};
        if (sw.contains("samples")) samples = sw["samples"].get<std::vector<std::string>>();
        for (int k : ks) {
            const auto roots = exponent_roots(k);
            for (const auto& n : roots.roots)
                for (const auto& s_text : samples) {
                    const Rational s = parse_rational(s_text);
                    if (s <= Rational(0)) throw config_error("sample points must be positive");
                    const Rational res = power_seed_residual(k, n, s);
                    const bool ok = res == Rational(0);
                    passed += ok ? 1 : 0;
                    ++total;
                    report.add(ojson{{"k", k},
                                     {"n", to_string(n)},
                                     {"r", to_string(s * s)},
                                     {"residual", to_string(res)},
                                     {"pass", ok}});
                }
        }
    } else if (kind == "sasaki_radial") {
        const auto ks = int_list(sw, "k", {1, 2, 3, 4, 5, 6, 7, 8});
        const auto grid = parse_r_grid(sw.contains("r_grid") ? sw["r_grid"] : json(), 0.1, 10.0, 50);
        const double tol = o.tolerance.value_or(get_or<double>(sw, "tolerance", 1e-12));
        const double beta = get_or<double>(sw, "beta", 1.0);
        for (int k : ks)
            for (FamilyCase c : admissible_cases(k)) {
                const RadialFunction rf = radial_family({k, c, beta, 0.0, 0.0});
                for (double r : grid) {
                    const double res = sasaki_radial_residual(rf, k, r);
                    const bool ok = residual_within(res, sasaki_residual_scale(rf, k, r), tol);
                    passed += ok ? 1 : 0;
                    ++total;
                    report.add(ojson{{"k", k}, {"case", std::string(to_string(c))}, {"r", r}, {"residual", res}, {"pass", ok}});
                }
            }
    } else {
        throw config_error("sweep kind must be equation_E, exponent or sasaki_radial");
    }
    auto& s = report.summary();
    s["kind"] = kind;
    s["rows"] = total;
    s["passed"] = passed;
    return passed == total ? exit_ok : exit_comparison;
}

// ---------------------------------------------------------------------------
// regularity

inline int cmd_regularity(const Options& o, Report& report) {
    const json cfg = load_config(o);
    const WeightProfile w = parse_weights(require<json>(cfg, "weights"));
    const auto grid = parse_r_grid(cfg.contains("r_grid") ? cfg["r_grid"] : json(), 0.1, 10.0, 20);
    const auto rep = check_regularity(w, grid);
    for (const auto& s : rep.slots)
        report.add(ojson{{"weight", std::string(to_string(s.which))},
                         {"order", s.order},
                         {"max_mismatch", s.max_mismatch},
                         {"right_limit", s.right_limit},
                         {"limit_converged", s.limit_converged}});
    auto& s = report.summary();
    s["profile"] = w.name();
    int clean = 0;
    for (const auto& slot : rep.slots)
        clean += slot.limit_converged && slot.max_mismatch <= regularity::fd_relative_tolerance ? 1 : 0;
    s["passed"] = clean;
    s["failures"] = static_cast<int>(rep.failures.size());
    for (std::size_t i = 0; i < rep.failures.size(); ++i) s["failure_" + std::to_string(i)] = rep.failures[i];
    return rep.ok() ? exit_ok : exit_comparison;
}

// ---------------------------------------------------------------------------
// dispatch

inline std::vector<std::string> columns_for(const std::string& cmd, const json& cfg) {
    if (cmd == "verify") return {"point", "x", "u", "r", "quantity", "closed_form", "oracle", "abs_error", "rel_error", "pass"};
    if (cmd == "families") return {"r", "alpha", "alpha_prime", "laplacian", "bilaplacian", "sasaki_radial_residual", "pass"};
    if (cmd == "regularity") return {"weight", "order", "max_mismatch", "right_limit", "limit_converged"};
    const auto kind = cfg.contains("sweep") ? get_or<std::string>(cfg["sweep"], "kind", "") : std::string();
    if (kind == "equation_E") return {"weights", "m", "k", "r", "E", "E_prime", "pass"};
    if (kind == "exponent") return {"k", "n", "r", "residual", "pass"};
    return {"k", "case", "r", "residual", "pass"};
}

/// Parses argv, runs one command, writes the report to --out (or `out`),
/// and returns the process exit code. Diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed-form vs numerical Laplacians on spherically symmetric bundle metrics", "ssbtool"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;
    double tolerance = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON run configuration");
        sub->add_option("--out", o.out_path, "output file (default stdout)");
        sub->add_option("--format", o.format, "csv or records")->check(CLI::IsMember({"csv", "records"}));
        sub->add_option("--seed", seed, "seed for point sampling (overrides config)");
        sub->add_option("--tolerance", tolerance, "override the comparison tolerance");
    };
    auto* verify = app.add_subcommand("verify", "closed-form operators vs the numerical oracle");
    auto* roots = app.add_subcommand("roots", "exact exponent roots for rank k");
    auto* families = app.add_subcommand("families", "tabulate a radial solution family");
    auto* sweep = app.add_subcommand("sweep", "residual sweeps over parameter grids");
    auto* regularity = app.add_subcommand("regularity", "derivative consistency and right limits of weights");
    for (auto* s : {verify, roots, families, sweep, regularity}) add_common(s);
    roots->add_option("--k", o.k, "bundle rank")->required();
    families->add_option("--k", o.k, "bundle rank");
    families->add_option("--case", o.family_case, "k1, k2, kEvenA, kEvenB or kOdd");
    families->add_option("--beta", o.beta);
    families->add_option("--gamma", o.gamma);
    families->add_option("--delta", o.delta);
    families->add_option("--rmin", o.r_min);
    families->add_option("--rmax", o.r_max);
    families->add_option("--count", o.r_count);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed")) o.seed = seed;
    if (active->count("--tolerance")) o.tolerance = tolerance;
    const std::string cmd = active->get_name();

    try {
        const Format f = parse_format(o.format);
        std::ofstream file;
        std::ostream* sink = &out;
        auto open_sink = [&] {
            if (!o.out_path.empty()) {
                file.open(o.out_path);
                if (!file) throw config_error("cannot open output file '" + o.out_path + "'");
                sink = &file;
            }
        };
        if (cmd == "roots") {
            open_sink();
            return cmd_roots(o, *sink, f);
        }
        const auto start = std::chrono::steady_clock::now();
        Report report(columns_for(cmd, load_config(o)));
        int code = exit_ok;
        if (cmd == "verify") code = cmd_verify(o, report);
        else if (cmd == "families") code = cmd_families(o, report);
        else if (cmd == "sweep") code = cmd_sweep(o, report);
        else code = cmd_regularity(o, report);
        open_sink();
        report.write(*sink, f);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        err << cmd << ": " << report.summary().value("passed", 0) << '/' << report.rows().size()
            << " rows passed, wall time " << wall << " s\n";
        return code;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const unsupported_configuration_error& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const error& e) {
        err << "numeric/domain error: " << e.what() << '\n';
        return exit_domain;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
}

} // namespace ssb::cli

#endif // SSB_CLI_COMMANDS_HPP
