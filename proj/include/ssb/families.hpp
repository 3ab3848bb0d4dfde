#ifndef SSB_FAMILIES_HPP
#define SSB_FAMILIES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "ssb/closed_form.hpp"
#include "ssb/errors.hpp"
#include "ssb/fields.hpp"
#include "ssb/smooth_fn.hpp"
#include "ssb/weights.hpp"

namespace ssb {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// ---------------------------------------------------------------------------
// Weight equation E

struct EquationEResidual {
    double e;        // 2rφ1″ − 4rφ1′(φ1+φ2)′ + 2mr(φ1′)² + 2krφ1′φ2′ + kφ1′
    double e_prime;  // 2rφ1″ + 2r(m−2)(φ1′)² + 2r(k−2)φ1′φ2′ + kφ1′
};

/// Residual of the weight equation E, together with its regrouped form E′. The two
/// are the same polynomial in (φ1′, φ1″, φ2′); disagreement beyond rounding
/// means a broken weight profile and raises.
inline EquationEResidual equation_E_residual(const WeightProfile& w, int m, int k, double r) {
    const double a1 = w.p1(r, 1), a2 = w.p2(r, 1), b1 = w.p1(r, 2);
    const double e = vertical_bracket(w, m, k, r);
    const double ep = 2.0 * r * b1 + 2.0 * r * (m - 2.0) * a1 * a1 + 2.0 * r * (k - 2.0) * a1 * a2 + k * a1;
    const double scale = std::abs(2.0 * r * b1) + 4.0 * r * std::abs(a1) * (std::abs(a1) + std::abs(a2)) +
                         2.0 * m * r * a1 * a1 + 2.0 * k * r * std::abs(a1 * a2) + k * std::abs(a1);
    if (!(std::abs(e - ep) <= 1e-12 * std::max(1.0, scale)))
        throw error("weight equation E and its regrouped form disagree: " + std::to_string(e) + " vs " + std::to_string(ep));
    return {e, ep};
}

// ---------------------------------------------------------------------------
// Sasaki radial ODE and its exponent quadratic

/// 2r²α⁽⁴⁾ + (3k+4) r α⁽³⁾ + k(k+2) α″.
inline double sasaki_radial_residual(const RadialFunction& rf, int k, double r) {
    rf.require_domain(r);
    return 2.0 * r * r * rf(r, 4) + (3.0 * k + 4.0) * r * rf(r, 3) + k * (k + 2.0) * rf(r, 2);
}

struct ExponentRoots {
    std::vector<Rational> roots;  // distinct roots (−(3k+2) ∓ (k−2))/4 = −k, −(k+2)/2
    bool double_root = false;
    Rational discriminant;

    int multiplicity(std::size_t i) const { return double_root && i == 0 ? 2 : 1; }
};

/// Indicial polynomial 2n² + (3k+2)n + k(k+2), exactly.
inline Rational exponent_polynomial(int k, const Rational& n) {
    const std::int64_t kk = k;
    return Rational(2) * n * n + Rational(3 * kk + 2) * n + Rational(kk * (kk + 2));
}

inline std::int64_t exact_isqrt(std::int64_t v) {
    if (v < 0) return -1;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
    while (s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s * s == v ? s : -1;
}

/// Rational roots of 2n² + (3k+2)n + k(k+2) = 0. The discriminant is (k−2)²,
/// a perfect square, so the roots are −k and −(k+2)/2 (a double root at k = 2).
inline ExponentRoots exponent_roots(int k) {
    if (k < 1) throw domain_error("bundle rank must be at least 1, got " + std::to_string(k));
    const std::int64_t kk = k;
    const std::int64_t b = 3 * kk + 2;
    const std::int64_t disc = b * b - 8 * kk * (kk + 2);
    const std::int64_t s = exact_isqrt(disc);
    if (s < 0) throw error("discriminant is not a perfect square");  // unreachable: disc = (k-2)^2
    ExponentRoots out;
    out.discriminant = Rational(disc);
    // Signed square root (k − 2) keeps the −k root first for every k.
    const std::int64_t signed_root = kk - 2;
    const Rational s1(-b - signed_root, 4);
    const Rational s2(-b + signed_root, 4);
    out.roots.push_back(s1);
    if (s2 == s1) {
        out.double_root = true;
    } else {
        out.roots.push_back(s2);
    }
    for (const auto& n : out.roots)
        if (exponent_polynomial(k, n) != Rational(0)) throw error("exponent root check failed");
    return out;
}

/// Residual of 2r²ψ″ + (3k+4)rψ′ + k(k+2)ψ for ψ = r^n, evaluated exactly at
/// r = s² (s rational), where r^n is rational whenever 2n is an integer.
inline Rational power_seed_residual(int k, const Rational& n, const Rational& s) {
    if ((n * 2).denominator() != 1) throw domain_error("exponent must be a half-integer");
    auto rpow = [&](const Rational& e) {
        // r^e = s^(2e)
        const std::int64_t two_e = (e * 2).numerator();
        Rational acc(1);
        const Rational base = two_e >= 0 ? s : Rational(1) / s;
        for (std::int64_t i = 0; i < (two_e >= 0 ? two_e : -two_e); ++i) acc *= base;
        return acc;
    };
    const std::int64_t kk = k;
    const Rational r = s * s;
    const Rational psi = rpow(n);
    const Rational dpsi = n * rpow(n - 1);
    const Rational ddpsi = n * (n - 1) * rpow(n - 2);
    return Rational(2) * r * r * ddpsi + Rational(3 * kk + 4) * r * dpsi + Rational(kk * (kk + 2)) * psi;
}

// ---------------------------------------------------------------------------
// Solution families of the Sasaki radial ODE

enum class FamilyCase { k1, k2, kEvenA, kEvenB, kOdd };

inline std::string_view to_string(FamilyCase c) {
    switch (c) {
        case FamilyCase::k1: return "k1";
        case FamilyCase::k2: return "k2";
        case FamilyCase::kEvenA: return "kEvenA";
        case FamilyCase::kEvenB: return "kEvenB";
        case FamilyCase::kOdd: return "kOdd";
    }
    return "?";
}

inline FamilyCase parse_family_case(std::string_view s) {
    for (FamilyCase c : {FamilyCase::k1, FamilyCase::k2, FamilyCase::kEvenA, FamilyCase::kEvenB, FamilyCase::kOdd})
        if (to_string(c) == s) return c;
    throw config_error("unknown family case '" + std::string(s) + "'");
}

/// The family a rank admits by default (kEvenA for even k ≥ 4).
inline FamilyCase default_case(int k) {
    if (k == 1) return FamilyCase::k1;
    if (k == 2) return FamilyCase::k2;
    return k % 2 == 0 ? FamilyCase::kEvenA : FamilyCase::kOdd;
}

inline std::vector<FamilyCase> admissible_cases(int k) {
    if (k == 1) return {FamilyCase::k1};
    if (k == 2) return {FamilyCase::k2};
    if (k % 2 == 0) return {FamilyCase::kEvenA, FamilyCase::kEvenB};
    return {FamilyCase::kOdd};
}

struct FamilyParams {
    int k = 1;
    FamilyCase family = FamilyCase::k1;
    double beta = 1.0;
    double gamma = 0.0;
    double delta = 0.0;
};

/// Exponent n of the seed ψ = α″ = β rⁿ for this family.
inline Rational family_exponent(const FamilyParams& fp) {
    switch (fp.family) {
        case FamilyCase::k1: return Rational(-1);
        case FamilyCase::k2: return Rational(-2);
        case FamilyCase::kOdd:
        case FamilyCase::kEvenA: return Rational(-fp.k);
        case FamilyCase::kEvenB: return Rational(-fp.k, 2);
    }
    return Rational(0);
}

/// α with α″ = β rⁿ, α′(r) → integration constant γ, α → δ. The two
/// exponents whose antiderivatives are logarithmic (n = −1, −2) get the
/// ln-bearing closed forms; every other n uses β r^{n+2}/((n+1)(n+2)).
inline SmoothFn integrate_power_seed(double beta, double n, double gamma, double delta) {
    SmoothFn linear = SmoothFn::polynomial({delta, gamma});
    if (n == -1.0) return SmoothFn::t_log_t_minus_t(beta) + linear;
    if (n == -2.0) return SmoothFn::log(-beta) + linear;
    return SmoothFn::power(beta / ((n + 1.0) * (n + 2.0)), n + 2.0) + linear;
}

inline void validate(const FamilyParams& fp) {
    const int k = fp.k;
    if (k < 1) throw config_error("bundle rank must be at least 1");
    const auto ok = admissible_cases(k);
    if (std::find(ok.begin(), ok.end(), fp.family) == ok.end())
        throw config_error("family case " + std::string(to_string(fp.family)) + " is not admissible for k = " +
                           std::to_string(k));
    if (fp.beta == 0.0) throw config_error("family coefficient beta must be nonzero");
}

inline RadialFunction radial_family(const FamilyParams& fp) {
    validate(fp);
    const Rational n = family_exponent(fp);
    const double nd = boost::rational_cast<double>(n);
    SmoothFn alpha = integrate_power_seed(fp.beta, nd, fp.gamma, fp.delta);
    std::string name = "family_" + std::string(to_string(fp.family)) + "_k" + std::to_string(fp.k);
    return RadialFunction(std::move(name), std::move(alpha), /*singular_at_zero=*/true);
}

// ---------------------------------------------------------------------------
// Classification

enum class Classification { harmonic, proper_biharmonic, not_biharmonic };

inline std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::harmonic: return "harmonic";
        case Classification::proper_biharmonic: return "proper_biharmonic";
        case Classification::not_biharmonic: return "not_biharmonic";
    }
    return "?";
}

struct ClassificationResult {
    Classification kind;
    double max_laplacian;
    double max_bilaplacian;
    double tolerance;
};

/// harmonic iff max|Δ_G F| ≤ tol; proper_biharmonic iff max|Δ_G² F| ≤ tol
/// and not harmonic; tol = 1e-9 (1 + max|α″| · max(1, max r)).
inline ClassificationResult classify_detailed(const RadialFunction& rf, const WeightProfile& w, int m, int k,
                                              const std::vector<double>& grid) {
    double max_lap = 0.0, max_bilap = 0.0, max_a2 = 0.0, max_r = 1.0;
    for (double r : grid) {
        max_lap = std::max(max_lap, std::abs(laplacian_radial(rf, w, m, k, r)));
        max_bilap = std::max(max_bilap, std::abs(bilaplacian_radial(rf, w, m, k, r)));
        max_a2 = std::max(max_a2, std::abs(rf(r, 2)));
        max_r = std::max(max_r, r);
    }
    const double tol = 1e-9 * (1.0 + max_a2 * max_r);
    Classification kind = Classification::not_biharmonic;
    if (max_lap <= tol) {
        kind = Classification::harmonic;
    } else if (max_bilap <= tol) {
        kind = Classification::proper_biharmonic;
    }
    return {kind, max_lap, max_bilap, tol};
}

inline Classification classify(const RadialFunction& rf, const WeightProfile& w, int m, int k,
                               const std::vector<double>& grid) {
    return classify_detailed(rf, w, m, k, grid).kind;
}

/// Same rule for a vertical lift, sampled at total-space points (x, r);
/// tol = 1e-9 (1 + max|f|).
inline ClassificationResult classify_vertical_lift_detailed(const BaseFunction& bf, const WeightProfile& w, int m,
                                                            int k, const std::vector<TotalPoint>& points,
                                                            const Mat& h) {
    double max_lap = 0.0, max_bilap = 0.0, max_f = 0.0;
    for (const auto& p : points) {
        const double r = p.u.dot(h * p.u);
        max_lap = std::max(max_lap, std::abs(laplacian_vertical_lift(bf, w, r, p.x)));
        max_bilap = std::max(max_bilap, std::abs(bilaplacian_vertical_lift(bf, w, m, k, r, p.x)));
        max_f = std::max(max_f, std::abs(bf(p.x)));
    }
    const double tol = 1e-9 * (1.0 + max_f);
    Classification kind = Classification::not_biharmonic;
    if (max_lap <= tol) {
        kind = Classification::harmonic;
    } else if (max_bilap <= tol) {
        kind = Classification::proper_biharmonic;
    }
    return {kind, max_lap, max_bilap, tol};
}

inline Classification classify_vertical_lift(const BaseFunction& bf, const WeightProfile& w, int m, int k,
                                             const std::vector<TotalPoint>& points, const Mat& h) {
    return classify_vertical_lift_detailed(bf, w, m, k, points, h).kind;
}

// ---------------------------------------------------------------------------
// Base example: f = |x|^{-1} on punctured Euclidean R^n

/// f(x) = |x|^{-1}; Δf = (3−n) f³; Δ²f = 3(n−5)(n−3) |x|^{-5}.
inline BaseFunction base_example_inverse_norm(int n) {
    if (n < 2) throw config_error("inverse-norm example needs n >= 2");
    const double nd = n;
    return BaseFunction::from_generic(
        "inverse_norm",
        [](const auto& x) {
            using S = typename std::decay_t<decltype(x)>::Scalar;
            S acc(0.0);
            for (Eigen::Index i = 0; i < x.size(); ++i) acc += x(i) * x(i);
            using std::sqrt;
            return S(1.0) / sqrt(acc);
        },
        [nd](const Vec& x) {
            const double f = 1.0 / x.norm();
            return (3.0 - nd) * f * f * f;
        },
        [nd](const Vec& x) { return 3.0 * (nd - 5.0) * (nd - 3.0) * std::pow(x.norm(), -5.0); },
        [](const Vec& x) -> Vec { return -x / std::pow(x.norm(), 3.0); });
}

} // namespace ssb

#endif // SSB_FAMILIES_HPP
