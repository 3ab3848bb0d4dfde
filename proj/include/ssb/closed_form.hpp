#ifndef SSB_CLOSED_FORM_HPP
#define SSB_CLOSED_FORM_HPP

#include <array>
#include <cmath>
#include <vector>

#include "ssb/bundle.hpp"
#include "ssb/errors.hpp"
#include "ssb/fields.hpp"
#include "ssb/linalg.hpp"
#include "ssb/smooth_fn.hpp"
#include "ssb/weights.hpp"

// Closed-form gradients, Laplacians and bilaplacians of vertical lifts and
// r-radial functions on (E, G). Gradients are contravariant components in raw
// (x, u) coordinates, i.e. what G^{-1} applied to the coordinate differential
// gives; every formula is converted to that convention here and nowhere else.

namespace ssb {

/// Bracket shared by the vertical-lift bilaplacian and the weight equation E:
/// 2rφ1″ − 4rφ1′(φ1+φ2)′ + 2mr(φ1′)² + 2krφ1′φ2′ + kφ1′.
inline double vertical_bracket(const WeightProfile& w, int m, int k, double r) {
    const double a1 = w.p1(r, 1), a2 = w.p2(r, 1), b1 = w.p1(r, 2);
    return 2.0 * r * b1 - 4.0 * r * a1 * (a1 + a2) + 2.0 * m * r * a1 * a1 + 2.0 * k * r * a1 * a2 + k * a1;
}

/// ∇̃ f^v = e^{-2φ1} (∇f)^h.
inline Vec grad_vertical_lift(const BaseFunction& bf, const MetricField& field, const TotalPoint& p) {
    const int m = field.base_dim();
    const int k = field.rank();
    const double r = field.radius(p);
    const Vec X = SpdFactor(field.base().metric(p.x)).solve(bf.differential(p.x));
    const auto gamma = field.bundle().connection(p.x, m);
    Vec out = Vec::Zero(m + k);
    out.head(m) = X;
    for (int j = 0; j < m; ++j) out.tail(k) -= X(j) * (gamma[static_cast<std::size_t>(j)] * p.u);
    return std::exp(-2.0 * field.weights().p1(r)) * out;
}

/// Δ_G f^v = e^{-2φ1} (Δ_g f)^v.
inline double laplacian_vertical_lift(const BaseFunction& bf, const WeightProfile& w, double r, const Vec& x) {
    return std::exp(-2.0 * w.p1(r)) * bf.laplacian(x);
}

inline double laplacian_vertical_lift(const BaseFunction& bf, const MetricField& field, const TotalPoint& p) {
    return laplacian_vertical_lift(bf, field.weights(), field.radius(p), p.x);
}

/// Δ_G² f^v = e^{-4φ1} (Δ_g² f)^v − 4 e^{-2(φ1+φ2)} [bracket] (Δ_g f)^v.
inline double bilaplacian_vertical_lift(const BaseFunction& bf, const WeightProfile& w, int m, int k, double r,
                                        const Vec& x) {
    const double q1 = w.p1(r), q2 = w.p2(r);
    const double lap = bf.laplacian(x);
    const double bracket = vertical_bracket(w, m, k, r);
    return std::exp(-4.0 * q1) * bf.bilaplacian(x) - 4.0 * std::exp(-2.0 * (q1 + q2)) * bracket * lap;
}

inline double bilaplacian_vertical_lift(const BaseFunction& bf, const MetricField& field, const TotalPoint& p) {
    return bilaplacian_vertical_lift(bf, field.weights(), field.base_dim(), field.rank(), field.radius(p), p.x);
}

/// ∇̃F = 2 e^{-2φ2} α′ ξ; ξ has raw components (0, u).
inline Vec grad_radial(const RadialFunction& rf, const MetricField& field, const TotalPoint& p) {
    const double r = field.radius(p);
    Vec out = Vec::Zero(field.dim());
    out.tail(field.rank()) = 2.0 * std::exp(-2.0 * field.weights().p2(r)) * rf(r, 1) * p.u;
    return out;
}

/// P(r) = m r φ1′ + (k−2) r φ2′ + k/2 and its first two r-derivatives.
struct RadialCoefficient {
    double p, dp, ddp;
};

inline RadialCoefficient radial_coefficient(const WeightProfile& w, int m, int k, double r) {
    const double km2 = k - 2.0;
    return {m * r * w.p1(r, 1) + km2 * r * w.p2(r, 1) + 0.5 * k,
            m * w.p1(r, 1) + m * r * w.p1(r, 2) + km2 * w.p2(r, 1) + km2 * r * w.p2(r, 2),
            2.0 * m * w.p1(r, 2) + m * r * w.p1(r, 3) + 2.0 * km2 * w.p2(r, 2) + km2 * r * w.p2(r, 3)};
}

/// Δ_G F = 4 e^{-2φ2} { r α″ + (m r φ1′ + (k−2) r φ2′ + k/2) α′ }.
inline double laplacian_radial(const RadialFunction& rf, const WeightProfile& w, int m, int k, double r) {
    rf.require_domain(r);
    const auto c = radial_coefficient(w, m, k, r);
    return 4.0 * std::exp(-2.0 * w.p2(r)) * (r * rf(r, 2) + c.p * rf(r, 1));
}

/// The seed β(r) = Δ_G F as an r-radial function in its own right, with
/// analytic slots 0..2 (β′, β″ expanded from α⁽³⁾, α⁽⁴⁾, φ″, φ⁽³⁾).
inline RadialFunction laplacian_as_radial(const RadialFunction& rf, const WeightProfile& w, int m, int k) {
    auto L = [=](double r) {
        const auto c = radial_coefficient(w, m, k, r);
        const double a1 = rf(r, 1), a2 = rf(r, 2), a3 = rf(r, 3), a4 = rf(r, 4);
        const double l0 = r * a2 + c.p * a1;
        const double l1 = a2 + r * a3 + c.dp * a1 + c.p * a2;
        const double l2 = 2.0 * a3 + r * a4 + c.ddp * a1 + 2.0 * c.dp * a2 + c.p * a3;
        return std::array<double, 3>{l0, l1, l2};
    };
    std::vector<SmoothFn::Slot> slots{
        [=](double r) { return 4.0 * std::exp(-2.0 * w.p2(r)) * L(r)[0]; },
        [=](double r) {
            const auto l = L(r);
            return 4.0 * std::exp(-2.0 * w.p2(r)) * (l[1] - 2.0 * w.p2(r, 1) * l[0]);
        },
        [=](double r) {
            const auto l = L(r);
            const double d1 = w.p2(r, 1), d2 = w.p2(r, 2);
            return 4.0 * std::exp(-2.0 * w.p2(r)) *
                   (l[2] - 4.0 * d1 * l[1] + (4.0 * d1 * d1 - 2.0 * d2) * l[0]);
        }};
    return RadialFunction("laplacian(" + rf.name() + ")", SmoothFn(std::move(slots)), rf.singular_at_zero(),
                          rf.domain_min());
}

/// Δ_G² F computed as Δ_G of the r-radial function Δ_G F.
inline double bilaplacian_radial(const RadialFunction& rf, const WeightProfile& w, int m, int k, double r) {
    rf.require_domain(r);
    if (rf.max_order() < 4) throw unsupported_order_error("bilaplacian needs alpha derivatives up to order 4");
    return laplacian_radial(laplacian_as_radial(rf, w, m, k), w, m, k, r);
}

/// Expanded bilaplacian formula for r-radial functions, evaluated term by
/// term with the div ξ factor. Kept as a cross-check only;
/// `bilaplacian_radial` is normative.
inline double bihar_radial_transcription(const RadialFunction& rf, const WeightProfile& w, int m, int k, double r) {
    rf.require_domain(r);
    const double a1 = rf(r, 1), a2 = rf(r, 2), a3 = rf(r, 3), a4 = rf(r, 4);
    const double f1 = w.p1(r, 1), f1b = w.p1(r, 2), f1c = w.p1(r, 3);
    const double q2 = w.p2(r), f2 = w.p2(r, 1), f2b = w.p2(r, 2), f2c = w.p2(r, 3);
    const double km2 = k - 2.0;
    const double e2 = std::exp(-2.0 * q2), e4 = std::exp(-4.0 * q2), e6 = std::exp(-6.0 * q2);

    const double P = m * r * f1 + km2 * r * f2 + 0.5 * k;          // first-order coefficient
    const double Q = m * f1 + m * r * f1b + km2 * f2 + r * km2 * f2b; // its r-derivative
    const double Pp1 = m * r * f1 + r * km2 * f2 + 0.5 * k + 1.0;
    const double S = r * a3 + Q * a1 + Pp1 * a2;

    const double t1 = -16.0 * f2 * e4 * (r * a2 + P * a1) * a1;
    // Q enters the div ξ block bare, without an α′ factor.
    const double t2 = 4.0 * e2 * (e2 * (r * a3 + Q + Pp1 * a2)) * div_xi_closed_form(w, m, k, r);
    const double t3 = -8.0 * f2 * r * e2 * S;
    const double t4 = 4.0 * r * e2 *
                      (a3 + r * a4 + (2.0 * m * f1b + m * r * f1c + 2.0 * km2 * f2b + r * km2 * f2c) * a1 +
                       2.0 * Q * a2 + Pp1 * a3);
    const double t5 = -8.0 * r * f2 * e6 * S;
    return t1 + t2 + t3 + t4 + t5;
}

struct TranscriptionRow {
    double r;
    double composition;
    double transcription;
    double difference;
};

/// Side-by-side comparison of the composition route and the transcription.
inline std::vector<TranscriptionRow> transcription_report(const RadialFunction& rf, const WeightProfile& w, int m,
                                                          int k, const std::vector<double>& grid) {
    std::vector<TranscriptionRow> rows;
    for (double r : grid) {
        const double a = bilaplacian_radial(rf, w, m, k, r);
        const double b = bihar_radial_transcription(rf, w, m, k, r);
        rows.push_back({r, a, b, b - a});
    }
    return rows;
}

} // namespace ssb

#endif // SSB_CLOSED_FORM_HPP
