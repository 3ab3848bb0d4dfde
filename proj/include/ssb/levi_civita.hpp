#ifndef SSB_LEVI_CIVITA_HPP
#define SSB_LEVI_CIVITA_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssb/bundle.hpp"
#include "ssb/errors.hpp"
#include "ssb/linalg.hpp"
#include "ssb/oracle.hpp"

namespace ssb {

/// Coefficients of the decomposition ∇̃ = D̃ + C for a flat connection.
struct LeviCivitaCoefficients {
    double a;   // 2 phi1'
    double b;   // 2 phi2'
    double c1;  // -2 phi1' e^{2(phi1 - phi2)}
    double c2;  // -2 phi2'
};

inline LeviCivitaCoefficients levi_civita_coefficients(const WeightProfile& w, double r) {
    const double d1 = w.p1(r, 1), d2 = w.p2(r, 1);
    return {2.0 * d1, 2.0 * d2, -2.0 * d1 * std::exp(2.0 * (w.p1(r) - w.p2(r))), -2.0 * d2};
}

/// Christoffel symbols of G predicted from the base symbols of g plus the
/// a, b, c1, c2 terms; entry [K](I, J) in raw coordinates (x, u).
///
///   Γ^k_{ij}   = Γ(g)^k_{ij}
///   Γ^p_{ij}   = c1 g_{ij} u^p
///   Γ^j_{ip}   = Γ^j_{pi} = a (hu)_p δ^j_i
///   Γ^s_{pq}   = b ((hu)_p δ^s_q + (hu)_q δ^s_p) + c2 h_{pq} u^s
///
/// every other symbol vanishes.
inline std::vector<Mat> christoffel_predicted(const MetricField& field, const TotalPoint& p) {
    if (!field.bundle().is_flat())
        throw unsupported_configuration_error("Levi-Civita prediction is implemented for flat connections only");
    const int m = field.base_dim();
    const int k = field.rank();
    const int n = m + k;
    const double r = field.radius(p);
    const auto c = levi_civita_coefficients(field.weights(), r);

    const Mat g = field.base().metric(p.x);
    const Mat gi = SpdFactor(g).inverse();
    const auto dg = field.base().partials(p.x);
    const Mat& h = field.bundle().fiber_metric();
    const Vec hu = h * p.u;

    std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (int kk = 0; kk < m; ++kk)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double acc = 0.0;
                for (int l = 0; l < m; ++l)
                    acc += gi(kk, l) * (dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                                        dg[static_cast<std::size_t>(l)](i, j));
                out[static_cast<std::size_t>(kk)](i, j) = 0.5 * acc;
            }
    for (int q = 0; q < k; ++q)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(m + q)](i, j) = c.c1 * g(i, j) * p.u(q);
    for (int j = 0; j < m; ++j)
        for (int q = 0; q < k; ++q) {
            out[static_cast<std::size_t>(j)](j, m + q) = c.a * hu(q);
            out[static_cast<std::size_t>(j)](m + q, j) = c.a * hu(q);
        }
    for (int s = 0; s < k; ++s)
        for (int q1 = 0; q1 < k; ++q1)
            for (int q2 = 0; q2 < k; ++q2) {
                double v = c.c2 * h(q1, q2) * p.u(s);
                if (s == q2) v += c.b * hu(q1);
                if (s == q1) v += c.b * hu(q2);
                out[static_cast<std::size_t>(m + s)](m + q1, m + q2) = v;
            }
    return out;
}

/// Max entrywise |Γ_numeric − Γ_predicted|.
inline double check_levi_civita_flat(const MetricField& field, const TotalPoint& p, const DiffConfig& cfg = {}) {
    const auto predicted = christoffel_predicted(field, p);
    const auto numeric = christoffel_numeric(field, p, cfg);
    double worst = 0.0;
    for (std::size_t kk = 0; kk < predicted.size(); ++kk)
        worst = std::max(worst, (predicted[kk] - numeric[kk]).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace ssb

#endif // SSB_LEVI_CIVITA_HPP
