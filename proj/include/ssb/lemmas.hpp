#ifndef SSB_LEMMAS_HPP
#define SSB_LEMMAS_HPP

#include <algorithm>
#include <cmath>

#include "ssb/bundle.hpp"
#include "ssb/fields.hpp"
#include "ssb/linalg.hpp"
#include "ssb/oracle.hpp"

namespace ssb {

struct DerFunReport {
    double max_horizontal;  // max |E_i(α(r))| over the horizontal frame
    double max_vertical;    // max |∂_{u^p} α(r) − 2α′(r)(hu)_p|
};

/// Derivatives of F = α(r): zero along horizontal lifts, 2α′(hu)_p along ∂/∂u^p.
inline DerFunReport check_der_fun(const RadialFunction& rf, const MetricField& field, const TotalPoint& p,
                                  const DiffConfig& cfg = {}) {
    const int m = field.base_dim();
    const int k = field.rank();
    const auto F = ScalarFieldOnE::r_radial(rf, field.bundle(), m);
    const Mat E = adapted_frame(field, p);
    const double r = field.radius(p);
    const Vec hu = field.bundle().fiber_metric() * p.u;

    DerFunReport out{0.0, 0.0};
    for (int i = 0; i < m; ++i)
        out.max_horizontal = std::max(out.max_horizontal, std::abs(directional_derivative_numeric(F, p, E.col(i), cfg)));
    for (int q = 0; q < k; ++q) {
        Vec dir = Vec::Zero(m + k);
        dir(m + q) = 1.0;
        const double numeric = directional_derivative_numeric(F, p, dir, cfg);
        out.max_vertical = std::max(out.max_vertical, std::abs(numeric - 2.0 * rf(r, 1) * hu(q)));
    }
    return out;
}

/// Deviation of the raw Jacobian of ξ from [0 0; 0 I] (flat connection):
/// fiber components have unit derivative in their own fiber direction and
/// none in base directions.
inline double check_der_xi(const TotalPoint& p) {
    const int m = static_cast<int>(p.x.size());
    const int k = static_cast<int>(p.u.size());
    const Mat J = jacobian_forward(VectorFieldOnE::tautological(m, k), p);
    Mat expected = Mat::Zero(m + k, m + k);
    expected.bottomRightCorner(k, k).setIdentity();
    return (J - expected).cwiseAbs().maxCoeff();
}

} // namespace ssb

#endif // SSB_LEMMAS_HPP
