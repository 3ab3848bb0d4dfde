#ifndef SSB_CLI_CONFIG_HPP
#define SSB_CLI_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssb/ssb.hpp"

// JSON run configuration → library objects. Every malformed or unknown entry
// raises config_error so the front end can map it to exit code 2.

namespace ssb::cli {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw config_error(std::string("missing required key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline Interval parse_interval(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw config_error("interval must be a two-element numeric array");
    Interval iv{j[0].get<double>(), j[1].get<double>()};
    if (!(iv.lo <= iv.hi)) throw config_error("interval bounds are reversed");
    return iv;
}

/// [lo, hi] for every axis, or one [lo, hi] per axis.
inline std::vector<Interval> parse_box(const json& j, int m) {
    if (j.is_array() && j.size() == 2 && j[0].is_number()) return std::vector<Interval>(static_cast<std::size_t>(m), parse_interval(j));
    if (!j.is_array() || static_cast<int>(j.size()) != m) throw config_error("box needs one interval per axis");
    std::vector<Interval> out;
    for (const auto& e : j) out.push_back(parse_interval(e));
    return out;
}

inline Mat parse_matrix(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) throw config_error("matrix has the wrong number of rows");
    Mat out(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) throw config_error("matrix row has the wrong length");
        for (int c = 0; c < n; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) throw config_error("matrix entries must be numbers");
            out(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return out;
}

inline std::vector<double> parse_coeffs(const json& j) {
    if (!j.is_array()) throw config_error("coefficients must be an array");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw config_error("coefficients must be numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// base chart

struct BaseSpec {
    BaseChart chart;
    std::string metric_name;
    bool euclidean;
};

inline BaseSpec parse_base(const json& j) {
    const int m = require<int>(j, "dim");
    if (m < 1) throw config_error("base dim must be positive");
    const std::vector<Interval> domain =
        j.contains("domain") ? parse_box(j["domain"], m) : std::vector<Interval>(static_cast<std::size_t>(m), Interval{-2, 2});
    const json metric = j.contains("metric") ? j["metric"] : json("euclidean");

    if (metric.is_string()) {
        const auto name = metric.get<std::string>();
        if (name == "euclidean") return {BaseChart::euclidean(m, domain), name, true};
        if (name == "hyperbolic") {
            // Upper half-space: g = δ / x_{m-1}².
            if (!(domain.back().lo > 0.0)) throw config_error("hyperbolic chart needs the last axis in (0, inf)");
            auto chart = BaseChart::from_generic(m, domain, [m](const auto& x) {
                using S = typename std::decay_t<decltype(x)>::Scalar;
                MatT<S> g = MatT<S>::Zero(m, m);
                const S w = S(1.0) / (x(m - 1) * x(m - 1));
                for (int i = 0; i < m; ++i) g(i, i) = w;
                return g;
            });
            return {std::move(chart), name, false};
        }
        throw config_error("unknown base metric '" + name + "'");
    }
    if (metric.is_object() && metric.contains("diagonal")) {
        const auto& entries = metric["diagonal"];
        if (!entries.is_array() || static_cast<int>(entries.size()) != m)
            throw config_error("diagonal metric needs one expression per axis");
        std::vector<Expr> exprs;
        for (const auto& e : entries) exprs.push_back(Expr::parse_base(e.get<std::string>(), m));
        auto chart = BaseChart::from_generic(m, domain, [exprs, m](const auto& x) {
            using S = typename std::decay_t<decltype(x)>::Scalar;
            MatT<S> g = MatT<S>::Zero(m, m);
            for (int i = 0; i < m; ++i) g(i, i) = exprs[static_cast<std::size_t>(i)](VecT<S>(x));
            return g;
        });
        return {std::move(chart), "diagonal", false};
    }
    throw config_error("base metric must be a name or {\"diagonal\": [...]}");
}

// ---------------------------------------------------------------------------
// bundle

inline BundleConfig parse_bundle(const json& j, int m) {
    const int k = require<int>(j, "rank");
    if (k < 1) throw config_error("bundle rank must be positive");
    const Mat h = j.contains("fiber_metric") ? parse_matrix(j["fiber_metric"], k) : Mat(Mat::Identity(k, k));
    if (!j.contains("connection") || (j["connection"].is_string() && j["connection"] == "zero")) return BundleConfig(h);
    const auto& c = j["connection"];
    if (c.is_object() && c.contains("constant")) {
        const auto& blocks = c["constant"];
        if (!blocks.is_array() || static_cast<int>(blocks.size()) != m)
            throw config_error("constant connection needs one k x k block per base axis");
        std::vector<Mat> gammas;
        for (const auto& b : blocks) gammas.push_back(parse_matrix(b, k));
        return BundleConfig::with_constant_connection(h, gammas);
    }
    throw config_error("connection must be \"zero\" or {\"constant\": [...]}");
}

// ---------------------------------------------------------------------------
// weights

inline WeightProfile parse_weights(const json& j) {
    if (j.is_string()) return preset(j.get<std::string>());
    if (!j.is_object()) throw config_error("weights must be a preset name or an object");
    if (j.contains("polynomial")) {
        const auto& p = j["polynomial"];
        return presets::polynomial(p.contains("phi1") ? parse_coeffs(p["phi1"]) : std::vector<double>{},
                                   p.contains("phi2") ? parse_coeffs(p["phi2"]) : std::vector<double>{});
    }
    const auto name = require<std::string>(j, "preset");
    std::optional<SmoothFn> phi2;
    if (j.contains("phi2")) phi2 = SmoothFn::polynomial(parse_coeffs(j["phi2"]));
    return preset(name, phi2);
}

// ---------------------------------------------------------------------------
// functions

inline FamilyParams parse_family(const json& j) {
    FamilyParams fp;
    fp.k = require<int>(j, "k");
    fp.family = j.contains("case") ? parse_family_case(j["case"].get<std::string>()) : default_case(fp.k);
    fp.beta = get_or<double>(j, "beta", 1.0);
    fp.gamma = get_or<double>(j, "gamma", 0.0);
    fp.delta = get_or<double>(j, "delta", 0.0);
    return fp;
}

inline RadialFunction parse_radial(const json& j) {
    if (!j.is_object()) throw config_error("alpha must be an object");
    if (j.contains("polynomial")) return RadialFunction::polynomial(parse_coeffs(j["polynomial"]));
    if (j.contains("family")) return radial_family(parse_family(j["family"]));
    if (j.contains("log")) return {"log", SmoothFn::log(j["log"].get<double>()), true};
    if (j.contains("power")) {
        const auto& p = j["power"];
        const double e = require<double>(p, "p");
        const bool polynomial_like = e >= 0.0 && std::floor(e) == e;
        return {"power", SmoothFn::power(get_or<double>(p, "c", 1.0), e), !polynomial_like};
    }
    throw config_error("alpha must be one of polynomial, family, log, power");
}

/// Base functions with Euclidean analytic Laplacians. Off a Euclidean chart
/// the Laplacians fall back to the base-chart oracle.
inline BaseFunction named_base_function(const std::string& name, int m) {
    if (name == "inverse_norm") return base_example_inverse_norm(m);
    if (name == "quadratic_norm") {
        const double md = m;
        return BaseFunction::from_generic(
            name, [](const auto& x) { return x.dot(x); }, [md](const Vec&) { return 2.0 * md; },
            [](const Vec&) { return 0.0; }, [](const Vec& x) -> Vec { return 2.0 * x; });
    }
    if (name == "linear") {
        return BaseFunction::from_generic(
            name, [](const auto& x) { return x(0); }, [](const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; },
            [m](const Vec&) -> Vec { return Vec::Unit(m, 0); });
    }
    if (name == "harmonic_xy") {
        if (m < 2) throw config_error("harmonic_xy needs a base of dimension at least 2");
        return BaseFunction::from_generic(
            name, [](const auto& x) { return x(0) * x(0) - x(1) * x(1); }, [](const Vec&) { return 0.0; },
            [](const Vec&) { return 0.0; },
            [m](const Vec& x) -> Vec {
                Vec g = Vec::Zero(m);
                g(0) = 2.0 * x(0);
                g(1) = -2.0 * x(1);
                return g;
            });
    }
    throw config_error("unknown base function '" + name + "'");
}

inline BaseFunction with_numeric_laplacians(const BaseFunction& bf, const BaseChart& chart, const DiffConfig& cfg) {
    auto f = [bf](const Vec& x) { return bf(x); };
    return BaseFunction(
        bf.name(), f, [chart, f, cfg](const Vec& x) { return base_laplacian_numeric(chart, f, x, cfg); },
        [chart, f, cfg](const Vec& x) { return base_bilaplacian_numeric(chart, f, x, cfg); },
        bf.has_gradient() ? BaseFunction::GradFn([bf](const Vec& x) { return bf.differential(x); })
                          : BaseFunction::GradFn{},
        bf.has_jet() ? BaseFunction::JetFn([bf](const VecT<D2>& x) { return bf.jet(x); }) : BaseFunction::JetFn{});
}

inline BaseFunction parse_base_function(const json& j, const BaseSpec& base, const DiffConfig& cfg) {
    const int m = base.chart.dim();
    if (j.is_string()) {
        BaseFunction bf = named_base_function(j.get<std::string>(), m);
        return base.euclidean ? bf : with_numeric_laplacians(bf, base.chart, cfg);
    }
    if (!j.is_object() || !j.contains("expr")) throw config_error("base function must be a name or {\"expr\": ...}");
    const Expr f = Expr::parse_base(j["expr"].get<std::string>(), m);
    BaseFunction::Fn lap, bilap;
    if (j.contains("laplacian")) {
        const Expr e = Expr::parse_base(j["laplacian"].get<std::string>(), m);
        lap = [e](const Vec& x) { return e(x); };
    }
    if (j.contains("bilaplacian")) {
        const Expr e = Expr::parse_base(j["bilaplacian"].get<std::string>(), m);
        bilap = [e](const Vec& x) { return e(x); };
    }
    BaseFunction::GradFn grad;
    if (j.contains("gradient")) {
        std::vector<Expr> comps;
        for (const auto& e : j["gradient"]) comps.push_back(Expr::parse_base(e.get<std::string>(), m));
        if (static_cast<int>(comps.size()) != m) throw config_error("gradient needs one expression per axis");
        grad = [comps, m](const Vec& x) {
            Vec g(m);
            for (int i = 0; i < m; ++i) g(i) = comps[static_cast<std::size_t>(i)](x);
            return g;
        };
    }
    BaseFunction bf(
        "expr", [f](const Vec& x) { return f(x); }, lap, bilap, grad, [f](const VecT<D2>& x) { return f(x); });
    if (!lap || !bilap) {
        auto plain = [f](const Vec& x) { return f(x); };
        auto chart = base.chart;
        if (!lap) lap = [chart, plain, cfg](const Vec& x) { return base_laplacian_numeric(chart, plain, x, cfg); };
        if (!bilap)
            bilap = [chart, plain, cfg](const Vec& x) { return base_bilaplacian_numeric(chart, plain, x, cfg); };
        bf = BaseFunction("expr", plain, lap, bilap, grad, [f](const VecT<D2>& x) { return f(x); });
    }
    return bf;
}

inline DiffConfig parse_diff(const json& j) {
    DiffConfig cfg;
    if (j.is_null()) return cfg;
    const auto scheme = get_or<std::string>(j, "scheme", "central_fd");
    if (scheme == "central_fd") {
        cfg.scheme = Scheme::central_fd;
    } else if (scheme == "forward_mode") {
        cfg.scheme = Scheme::forward_mode;
    } else {
        throw config_error("unknown differentiation scheme '" + scheme + "'");
    }
    cfg.base_step = get_or<double>(j, "base_step", cfg.base_step);
    cfg.richardson_levels = get_or<int>(j, "richardson_levels", cfg.richardson_levels);
    cfg.nested_step_ratio = get_or<double>(j, "nested_step_ratio", cfg.nested_step_ratio);
    cfg.validate();
    return cfg;
}

/// {"min", "max", "count"} or an explicit list.
inline std::vector<double> parse_r_grid(const json& j, double lo = 0.1, double hi = 10.0, int count = 50) {
    if (j.is_null()) return linspace(lo, hi, count);
    if (j.is_array()) return parse_coeffs(j);
    return linspace(get_or<double>(j, "min", lo), get_or<double>(j, "max", hi), get_or<int>(j, "count", count));
}

} // namespace ssb::cli

#endif // SSB_CLI_CONFIG_HPP
