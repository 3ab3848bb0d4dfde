#ifndef SSB_ORACLE_HPP
#define SSB_ORACLE_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ssb/bundle.hpp"
#include "ssb/dual.hpp"
#include "ssb/errors.hpp"
#include "ssb/fields.hpp"
#include "ssb/linalg.hpp"
#include "ssb/richardson.hpp"

// Coordinate-based numerical ground truth for Δ_G, Δ_G², grad and div on any
// chart with a metric field. Nothing here knows about weights, radial seeds
// or the closed-form operators: it only sees G(z) and f(z).

namespace ssb {

enum class Scheme { central_fd, forward_mode };

struct DiffConfig {
    Scheme scheme = Scheme::central_fd;
    /// Finest step, relative to max(1, |coordinate|). Richardson levels use
    /// base_step · 2^j, j < richardson_levels.
    double base_step = 4e-3;
    int richardson_levels = 3;
    /// Outer/inner step ratio of the nested bilaplacian.
    double nested_step_ratio = 8.0;

    void validate() const {
        if (!(base_step > 0.0)) throw config_error("base_step must be positive");
        if (richardson_levels < 1) throw config_error("richardson_levels must be at least 1");
        if (!(nested_step_ratio > 0.0)) throw config_error("nested_step_ratio must be positive");
    }
};

namespace oracle_detail {

using ScalarFn = std::function<double(const Vec&)>;
using MetricFn = std::function<Mat(const Vec&)>;
using ScalarJetFn = std::function<D2(const VecT<D2>&)>;
using MetricJetFn = std::function<MatT<D1>(const VecT<D1>&)>;

/// Coarsest step of the Richardson ladder ending at `base`.
inline double ladder_top(double base, int levels) { return base * std::ldexp(1.0, levels - 1); }

inline Vec step_sizes(const Vec& z, double s) {
    Vec h(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) h(i) = s * std::max(1.0, std::abs(z(i)));
    return h;
}

/// Δf = G^{IJ} ∂_I∂_J f − G^{KL}(G^{IJ} ∂_I G_{LJ} − ½ G^{IJ} ∂_L G_{IJ}) ∂_K f,
/// the expanded form of |G|^{-1/2} ∂_I(|G|^{1/2} G^{IJ} ∂_J f), with all
/// derivatives taken by second-order central differences at one step scale.
inline double laplacian_at_step(const MetricFn& G, const ScalarFn& f, const Vec& z, double s) {
    const Eigen::Index n = z.size();
    const Vec h = step_sizes(z, s);

    const double f0 = f(z);
    Vec fp(n), fm(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec zp = z, zm = z;
        zp(i) += h(i);
        zm(i) -= h(i);
        fp(i) = f(zp);
        fm(i) = f(zm);
    }
    Mat hess(n, n);
    Vec grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        hess(i, i) = (fp(i) - 2.0 * f0 + fm(i)) / (h(i) * h(i));
        grad(i) = (fp(i) - fm(i)) / (2.0 * h(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            Vec z_pp = z, z_pm = z, z_mp = z, z_mm = z;
            z_pp(i) += h(i), z_pp(j) += h(j);
            z_pm(i) += h(i), z_pm(j) -= h(j);
            z_mp(i) -= h(i), z_mp(j) += h(j);
            z_mm(i) -= h(i), z_mm(j) -= h(j);
            hess(i, j) = hess(j, i) = (f(z_pp) - f(z_pm) - f(z_mp) + f(z_mm)) / (4.0 * h(i) * h(j));
        }
    }

    const Mat Ginv = SpdFactor(G(z)).inverse();
    // contracted(L) = G^{IJ} ∂_I G_{LJ} − ½ G^{IJ} ∂_L G_{IJ}
    Vec contracted = Vec::Zero(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        Vec zp = z, zm = z;
        zp(l) += h(l);
        zm(l) -= h(l);
        const Mat dG = (G(zp) - G(zm)) / (2.0 * h(l));
        // ∂_l G: contributes to the trace term of index l and the first term of every L.
        contracted(l) -= 0.5 * (Ginv.cwiseProduct(dG)).sum();
        contracted += dG * Ginv.col(l);  // Σ_J ∂_l G_{LJ} G^{lJ} summed over the I = l slice
    }
    const Vec christoffel_trace = Ginv * contracted;
    return (Ginv.cwiseProduct(hess)).sum() - christoffel_trace.dot(grad);
}

inline double laplacian_fd(const MetricFn& G, const ScalarFn& f, const Vec& z, double base, int levels) {
    return richardson<double>([&](double s) { return laplacian_at_step(G, f, z, s); }, ladder_top(base, levels),
                              levels, 2);
}

inline Vec differential_fd(const ScalarFn& f, const Vec& z, double base, int levels) {
    return richardson<Vec>(
        [&](double s) {
            const Vec h = step_sizes(z, s);
            Vec d(z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                Vec zp = z, zm = z;
                zp(i) += h(i);
                zm(i) -= h(i);
                d(i) = (f(zp) - f(zm)) / (2.0 * h(i));
            }
            return d;
        },
        ladder_top(base, levels), levels, 2);
}

/// |G|^{-1/2} ∂_I(|G|^{1/2} V^I) with central differences of the density.
inline double divergence_fd(const MetricFn& G, const std::function<Vec(const Vec&)>& V, const Vec& z, double base,
                            int levels) {
    const double sqrt_det0 = std::sqrt(SpdFactor(G(z)).determinant());
    return richardson<double>(
        [&](double s) {
            const Vec h = step_sizes(z, s);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                Vec zp = z, zm = z;
                zp(i) += h(i);
                zm(i) -= h(i);
                const double plus = std::sqrt(SpdFactor(G(zp)).determinant()) * V(zp)(i);
                const double minus = std::sqrt(SpdFactor(G(zm)).determinant()) * V(zm)(i);
                acc += (plus - minus) / (2.0 * h(i));
            }
            return acc / sqrt_det0;
        },
        ladder_top(base, levels), levels, 2);
}

inline std::vector<Mat> metric_partials_fd(const MetricFn& G, const Vec& z, double base, int levels) {
    std::vector<Mat> out;
    for (Eigen::Index l = 0; l < z.size(); ++l) {
        out.push_back(richardson<Mat>(
            [&](double s) {
                const double h = s * std::max(1.0, std::abs(z(l)));
                Vec zp = z, zm = z;
                zp(l) += h;
                zm(l) -= h;
                return Mat((G(zp) - G(zm)) / (2.0 * h));
            },
            ladder_top(base, levels), levels, 2));
    }
    return out;
}

inline std::vector<Mat> metric_partials_fm(const MetricJetFn& G, const Vec& z) {
    std::vector<Mat> out;
    for (Eigen::Index l = 0; l < z.size(); ++l) {
        VecT<D1> zj(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) zj(i) = D1(z(i), i == l ? 1.0 : 0.0);
        const MatT<D1> Gj = G(zj);
        Mat d(Gj.rows(), Gj.cols());
        for (Eigen::Index i = 0; i < Gj.rows(); ++i)
            for (Eigen::Index j = 0; j < Gj.cols(); ++j) d(i, j) = Gj(i, j).d;
        out.push_back(d);
    }
    return out;
}

/// Seeds outer infinitesimal along e_i and inner along e_j.
inline VecT<D2> seed2(const Vec& z, Eigen::Index i, Eigen::Index j) {
    VecT<D2> out(z.size());
    for (Eigen::Index l = 0; l < z.size(); ++l)
        out(l) = D2(D1(z(l), l == j ? 1.0 : 0.0), D1(l == i ? 1.0 : 0.0, 0.0));
    return out;
}

inline void hessian_fm(const ScalarJetFn& f, const Vec& z, Mat& hess, Vec& grad) {
    const Eigen::Index n = z.size();
    hess.resize(n, n);
    grad.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const D2 v = f(seed2(z, i, j));
            hess(i, j) = hess(j, i) = v.d.d;
            if (j == 0) grad(i) = v.d.v;
        }
}

inline double laplacian_fm(const MetricFn& G, const MetricJetFn& Gj, const ScalarJetFn& f, const Vec& z) {
    const Eigen::Index n = z.size();
    Mat hess;
    Vec grad;
    hessian_fm(f, z, hess, grad);
    const Mat Ginv = SpdFactor(G(z)).inverse();
    const auto dG = metric_partials_fm(Gj, z);
    Vec contracted = Vec::Zero(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const Mat& d = dG[static_cast<std::size_t>(l)];
        contracted(l) -= 0.5 * (Ginv.cwiseProduct(d)).sum();
        contracted += d * Ginv.col(l);
    }
    return (Ginv.cwiseProduct(hess)).sum() - (Ginv * contracted).dot(grad);
}

} // namespace oracle_detail

inline double laplace_beltrami_numeric(const MetricField& metric, const ScalarFieldOnE& field, const TotalPoint& p,
                                       const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    auto G = [&](const Vec& y) { return metric.matrix(y); };
    if (cfg.scheme == Scheme::forward_mode) {
        return oracle_detail::laplacian_fm(
            G, [&](const VecT<D1>& y) { return metric.matrix_jet(y); },
            [&](const VecT<D2>& y) { return field.jet(y); }, z);
    }
    return oracle_detail::laplacian_fd(G, [&](const Vec& y) { return field(y); }, z, cfg.base_step,
                                       cfg.richardson_levels);
}

/// Δ_G(Δ_G f) by nesting: the inner Laplacian runs at `base_step`, the outer
/// one at `base_step · nested_step_ratio`. Under forward_mode the inner
/// Laplacian is exact to rounding and only the outer one is differenced.
inline double bilaplacian_numeric(const MetricField& metric, const ScalarFieldOnE& field, const TotalPoint& p,
                                  const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    auto G = [&](const Vec& y) { return metric.matrix(y); };
    oracle_detail::ScalarFn inner;
    if (cfg.scheme == Scheme::forward_mode) {
        inner = [&](const Vec& y) {
            return oracle_detail::laplacian_fm(
                G, [&](const VecT<D1>& w) { return metric.matrix_jet(w); },
                [&](const VecT<D2>& w) { return field.jet(w); }, y);
        };
    } else {
        inner = [&](const Vec& y) {
            return oracle_detail::laplacian_fd(G, [&](const Vec& w) { return field(w); }, y, cfg.base_step,
                                               cfg.richardson_levels);
        };
    }
    return oracle_detail::laplacian_fd(G, inner, z, cfg.base_step * cfg.nested_step_ratio, cfg.richardson_levels);
}

/// G^{-1} dF: contravariant gradient in raw coordinates.
inline Vec gradient_numeric(const MetricField& metric, const ScalarFieldOnE& field, const TotalPoint& p,
                            const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    Vec dF;
    if (cfg.scheme == Scheme::forward_mode) {
        Mat hess;
        oracle_detail::hessian_fm([&](const VecT<D2>& y) { return field.jet(y); }, z, hess, dF);
    } else {
        dF = oracle_detail::differential_fd([&](const Vec& y) { return field(y); }, z, cfg.base_step,
                                            cfg.richardson_levels);
    }
    return SpdFactor(metric.matrix(z)).solve(dF);
}

inline double divergence_numeric(const MetricField& metric, const VectorFieldOnE& V, const TotalPoint& p,
                                 const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    auto G = [&](const Vec& y) { return metric.matrix(y); };
    if (cfg.scheme == Scheme::forward_mode) {
        // div V = ∂_I V^I + V^I · ½ tr(G^{-1} ∂_I G)
        const Mat Ginv = SpdFactor(G(z)).inverse();
        const auto dG = oracle_detail::metric_partials_fm([&](const VecT<D1>& y) { return metric.matrix_jet(y); }, z);
        const Vec v0 = V(z);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            VecT<D1> zj(z.size());
            for (Eigen::Index l = 0; l < z.size(); ++l) zj(l) = D1(z(l), l == i ? 1.0 : 0.0);
            acc += V.jet(zj)(i).d + v0(i) * 0.5 * (Ginv.cwiseProduct(dG[static_cast<std::size_t>(i)])).sum();
        }
        return acc;
    }
    return oracle_detail::divergence_fd(G, [&](const Vec& y) { return V(y); }, z, cfg.base_step,
                                        cfg.richardson_levels);
}

/// Γ^K_{IJ} = ½ G^{KL}(∂_I G_{LJ} + ∂_J G_{LI} − ∂_L G_{IJ}); entry [K](I, J).
inline std::vector<Mat> christoffel_numeric(const MetricField& metric, const TotalPoint& p,
                                            const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    const Eigen::Index n = z.size();
    const auto dG = cfg.scheme == Scheme::forward_mode
                        ? oracle_detail::metric_partials_fm([&](const VecT<D1>& y) { return metric.matrix_jet(y); }, z)
                        : oracle_detail::metric_partials_fd([&](const Vec& y) { return metric.matrix(y); }, z,
                                                            cfg.base_step, cfg.richardson_levels);
    const Mat Ginv = SpdFactor(metric.matrix(z)).inverse();
    // lowered(L)(I, J) = ½ (∂_I G_{LJ} + ∂_J G_{LI} − ∂_L G_{IJ})
    std::vector<Mat> lowered(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                lowered[static_cast<std::size_t>(l)](i, j) =
                    0.5 * (dG[static_cast<std::size_t>(i)](l, j) + dG[static_cast<std::size_t>(j)](l, i) -
                           dG[static_cast<std::size_t>(l)](i, j));
    std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l)
            out[static_cast<std::size_t>(k)] += Ginv(k, l) * lowered[static_cast<std::size_t>(l)];
    return out;
}

/// Derivative of F along a raw-coordinate direction at p.
inline double directional_derivative_numeric(const ScalarFieldOnE& field, const TotalPoint& p, const Vec& direction,
                                             const DiffConfig& cfg = {}) {
    cfg.validate();
    const Vec z = p.coords();
    const double scale = std::max(1.0, z.cwiseAbs().maxCoeff()) / std::max(1e-300, direction.norm());
    return derivative_1d([&](double t) { return field(Vec(z + t * direction)); }, 0.0,
                         oracle_detail::ladder_top(cfg.base_step, cfg.richardson_levels) * scale,
                         cfg.richardson_levels);
}

/// ∂V^I/∂z^J by forward mode (exact up to rounding).
inline Mat jacobian_forward(const VectorFieldOnE& V, const TotalPoint& p) {
    const Vec z = p.coords();
    const Eigen::Index n = z.size();
    Mat J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        VecT<D1> zj(n);
        for (Eigen::Index l = 0; l < n; ++l) zj(l) = D1(z(l), l == j ? 1.0 : 0.0);
        const VecT<D1> v = V.jet(zj);
        for (Eigen::Index i = 0; i < n; ++i) J(i, j) = v(i).d;
    }
    return J;
}

/// Δ_g f on the base chart alone (used to validate analytic base Laplacians).
inline double base_laplacian_numeric(const BaseChart& chart, const std::function<double(const Vec&)>& f,
                                     const Vec& x, const DiffConfig& cfg = {}) {
    cfg.validate();
    return oracle_detail::laplacian_fd([&](const Vec& y) { return chart.metric(y); }, f, x, cfg.base_step,
                                       cfg.richardson_levels);
}

inline double base_bilaplacian_numeric(const BaseChart& chart, const std::function<double(const Vec&)>& f,
                                       const Vec& x, const DiffConfig& cfg = {}) {
    cfg.validate();
    auto G = [&](const Vec& y) { return chart.metric(y); };
    auto inner = [&](const Vec& y) {
        return oracle_detail::laplacian_fd(G, f, y, cfg.base_step, cfg.richardson_levels);
    };
    return oracle_detail::laplacian_fd(G, inner, x, cfg.base_step * cfg.nested_step_ratio, cfg.richardson_levels);
}

} // namespace ssb

#endif // SSB_ORACLE_HPP
