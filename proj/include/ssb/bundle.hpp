#ifndef SSB_BUNDLE_HPP
#define SSB_BUNDLE_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ssb/dual.hpp"
#include "ssb/errors.hpp"
#include "ssb/linalg.hpp"
#include "ssb/richardson.hpp"
#include "ssb/weights.hpp"

namespace ssb {

struct Interval {
    double lo;
    double hi;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Coordinate chart of the base manifold: a box in R^m with an SPD metric field.
class BaseChart {
public:
    using MetricFn = std::function<Mat(const Vec&)>;
    using MetricJetFn = std::function<MatT<D1>(const VecT<D1>&)>;
    using PartialsFn = std::function<std::vector<Mat>(const Vec&)>;

    BaseChart(int m, std::vector<Interval> domain, MetricFn g, MetricJetFn g_jet = {}, PartialsFn g_partials = {})
        : m_(m), domain_(std::move(domain)), g_(std::move(g)), g_jet_(std::move(g_jet)),
          g_partials_(std::move(g_partials)) {
        if (m_ < 1) throw config_error("base dimension must be positive");
        if (static_cast<int>(domain_.size()) != m_) throw config_error("chart domain must have one interval per axis");
        for (const auto& iv : domain_)
            if (!(iv.lo < iv.hi)) throw config_error("chart domain interval is empty");
    }

    /// Builds both the real and the jet closure from one generic callable
    /// `g(const VecT<S>&) -> MatT<S>`.
    template <class G>
    static BaseChart from_generic(int m, std::vector<Interval> domain, G g, PartialsFn g_partials = {}) {
        return BaseChart(
            m, std::move(domain), [g](const Vec& x) -> Mat { return g(x); },
            [g](const VecT<D1>& x) -> MatT<D1> { return g(x); }, std::move(g_partials));
    }

    static BaseChart euclidean(int m, std::vector<Interval> domain) {
        return BaseChart(
            m, std::move(domain), [m](const Vec&) -> Mat { return Mat::Identity(m, m); },
            [m](const VecT<D1>&) -> MatT<D1> {
                MatT<D1> g = MatT<D1>::Zero(m, m);
                for (int i = 0; i < m; ++i) g(i, i) = D1(1.0);
                return g;
            },
            [m](const Vec&) { return std::vector<Mat>(static_cast<std::size_t>(m), Mat::Zero(m, m)); });
    }

    static BaseChart euclidean(int m, double lo = -2.0, double hi = 2.0) {
        return euclidean(m, std::vector<Interval>(static_cast<std::size_t>(m), Interval{lo, hi}));
    }

    int dim() const { return m_; }
    const std::vector<Interval>& domain() const { return domain_; }
    bool has_jet() const { return static_cast<bool>(g_jet_); }
    bool has_analytic_partials() const { return static_cast<bool>(g_partials_); }

    bool contains(const Vec& x) const {
        if (x.size() != m_) return false;
        for (int i = 0; i < m_; ++i)
            if (!domain_[static_cast<std::size_t>(i)].contains(x(i))) return false;
        return true;
    }

    Mat metric(const Vec& x) const {
        require_inside(x);
        return g_(x);
    }

    MatT<D1> metric_jet(const VecT<D1>& x) const {
        if (!g_jet_) throw capability_error("base chart has no forward-mode metric closure");
        Vec xv(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) xv(i) = x(i).v;
        require_inside(xv);
        return g_jet_(x);
    }

    /// ∂g/∂x^i for i = 0..m-1: analytic when supplied, otherwise central FD.
    std::vector<Mat> partials(const Vec& x) const {
        if (g_partials_) return g_partials_(x);
        std::vector<Mat> out;
        for (int i = 0; i < m_; ++i) {
            const double h = 1e-3 * std::max(1.0, std::abs(x(i)));
            out.push_back(richardson<Mat>(
                [&](double s) {
                    Vec xp = x, xm = x;
                    xp(i) += s;
                    xm(i) -= s;
                    return Mat((metric(xp) - metric(xm)) / (2.0 * s));
                },
                h, 3));
        }
        return out;
    }

    /// Checks g(x) SPD at the given sample points.
    bool check_spd(const std::vector<Vec>& samples) const {
        for (const auto& x : samples)
            if (!is_spd(metric(x))) return false;
        return true;
    }

private:
    void require_inside(const Vec& x) const {
        if (!contains(x)) throw domain_error("base point outside the chart domain");
    }

    int m_;
    std::vector<Interval> domain_;
    MetricFn g_;
    MetricJetFn g_jet_;
    PartialsFn g_partials_;
};

/// Rank-k bundle data over the chart: constant SPD fiber metric h and
/// connection coefficients Γ^p_{iq}(x), stored as m matrices (Γ_i)_{pq}.
class BundleConfig {
public:
    using ConnFn = std::function<std::vector<Mat>(const Vec&)>;
    using ConnJetFn = std::function<std::vector<MatT<D1>>(const VecT<D1>&)>;

    explicit BundleConfig(Mat h) : k_(static_cast<int>(h.rows())), h_(std::move(h)) {
        if (k_ < 1) throw config_error("bundle rank must be positive");
        if (!is_spd(h_)) throw config_error("fiber metric must be symmetric positive definite");
    }

    static BundleConfig trivial(int k) {
        if (k < 1) throw config_error("bundle rank must be positive");
        return BundleConfig(Mat::Identity(k, k));
    }

    /// Connection with x-independent coefficients; must satisfy Dh = 0.
    static BundleConfig with_constant_connection(Mat h, std::vector<Mat> gammas, double tol = 1e-10) {
        BundleConfig b(std::move(h));
        for (const auto& gi : gammas)
            if (gi.rows() != b.k_ || gi.cols() != b.k_)
                throw config_error("connection coefficient block has wrong shape");
        b.conn_ = [gammas](const Vec&) { return gammas; };
        b.conn_jet_ = [gammas](const VecT<D1>&) {
            std::vector<MatT<D1>> out;
            for (const auto& gi : gammas) out.push_back(gi.cast<D1>());
            return out;
        };
        if (b.compatibility_defect(Vec()) > tol) throw config_error("connection is not compatible with the fiber metric");
        return b;
    }

    static BundleConfig with_connection(Mat h, ConnFn conn, ConnJetFn conn_jet = {}) {
        BundleConfig b(std::move(h));
        b.conn_ = std::move(conn);
        b.conn_jet_ = std::move(conn_jet);
        return b;
    }

    int rank() const { return k_; }
    const Mat& fiber_metric() const { return h_; }
    bool is_flat() const { return !conn_; }

    std::vector<Mat> connection(const Vec& x, int m) const {
        if (!conn_) return std::vector<Mat>(static_cast<std::size_t>(m), Mat::Zero(k_, k_));
        return conn_(x);
    }

    std::vector<MatT<D1>> connection_jet(const VecT<D1>& x, int m) const {
        if (!conn_) return std::vector<MatT<D1>>(static_cast<std::size_t>(m), MatT<D1>::Zero(k_, k_));
        if (!conn_jet_) throw capability_error("connection has no forward-mode closure");
        return conn_jet_(x);
    }

    /// max |h Γ_i + Γ_iᵀ h| at x (metric compatibility Dh = 0).
    double compatibility_defect(const Vec& x) const {
        if (!conn_) return 0.0;
        double worst = 0.0;
        for (const auto& gi : conn_(x)) worst = std::max(worst, (h_ * gi + gi.transpose() * h_).cwiseAbs().maxCoeff());
        return worst;
    }

private:
    int k_;
    Mat h_;
    ConnFn conn_;
    ConnJetFn conn_jet_;
};

/// A point e of the total space in adapted coordinates (x, u).
struct TotalPoint {
    Vec x;
    Vec u;

    Vec coords() const {
        Vec z(x.size() + u.size());
        z << x, u;
        return z;
    }

    static TotalPoint split(const Vec& z, int m) {
        return {z.head(m), z.tail(z.size() - m)};
    }
};

/// r = h(e, e) = uᵀ h u.
inline double radius(const BundleConfig& bundle, const TotalPoint& p) {
    return p.u.dot(bundle.fiber_metric() * p.u);
}

template <class T>
T radius_of(const Mat& h, const VecT<T>& u) {
    T r(0.0);
    for (Eigen::Index p = 0; p < u.size(); ++p)
        for (Eigen::Index q = 0; q < u.size(); ++q) r += h(p, q) * u(p) * u(q);
    return r;
}

/// The spherically symmetric metric on the total space, in raw (x, u) coordinates.
///
/// In the adapted coframe (dx^i, δu^p = du^p + Γ^p_{iq} u^q dx^i) it is
/// block diagonal e^{2phi1} g ⊕ e^{2phi2} h; the raw matrix is its congruence
/// transform by the coframe Jacobian.
class MetricField {
public:
    MetricField(BaseChart base, BundleConfig bundle, WeightProfile weights)
        : base_(std::move(base)), bundle_(std::move(bundle)), weights_(std::move(weights)) {}

    const BaseChart& base() const { return base_; }
    const BundleConfig& bundle() const { return bundle_; }
    const WeightProfile& weights() const { return weights_; }
    int base_dim() const { return base_.dim(); }
    int rank() const { return bundle_.rank(); }
    int dim() const { return base_dim() + rank(); }

    bool contains(const TotalPoint& p) const { return base_.contains(p.x); }

    double radius(const TotalPoint& p) const { return ssb::radius(bundle_, p); }

    Mat matrix(const TotalPoint& p) const { return matrix(p.coords()); }

    /// Raw-coordinate metric; throws domain_error outside the chart and
    /// geometry_error when the result is not SPD.
    Mat matrix(const Vec& z) const {
        require_dim(z.size());
        const int m = base_dim();
        const Vec x = z.head(m);
        const Vec u = z.tail(rank());
        Mat G = assemble<double>(x, u, base_.metric(x), bundle_.connection(x, m));
        if (!G.allFinite() || !is_spd(G)) throw geometry_error("total-space metric is not SPD at the requested point");
        return G;
    }

    /// Metric on a first-order jet (forward mode); no SPD check.
    MatT<D1> matrix_jet(const VecT<D1>& z) const {
        require_dim(z.size());
        const int m = base_dim();
        const VecT<D1> x = z.head(m);
        const VecT<D1> u = z.tail(rank());
        return assemble<D1>(x, u, base_.metric_jet(x), bundle_.connection_jet(x, m));
    }

    /// e^{2phi1}, e^{2phi2} at radius r.
    double horizontal_factor(double r) const { return std::exp(2.0 * weights_.p1(r)); }
    double vertical_factor(double r) const { return std::exp(2.0 * weights_.p2(r)); }

private:
    void require_dim(Eigen::Index n) const {
        if (n != dim()) throw config_error("point has wrong dimension for this total space");
    }

    template <class T>
    MatT<T> assemble(const VecT<T>& x, const VecT<T>& u, const MatT<T>& g, const std::vector<MatT<T>>& gamma) const {
        using std::exp;
        const int m = base_dim();
        const int k = rank();
        const Mat& h = bundle_.fiber_metric();
        const T r = radius_of<T>(h, u);
        const T e1 = exp(2.0 * weights_.phi1().lift(r));
        const T e2 = exp(2.0 * weights_.phi2().lift(r));

        // Coframe coupling: C(p, i) = Γ^p_{iq} u^q.
        MatT<T> C = MatT<T>::Zero(k, m);
        for (int i = 0; i < m; ++i) {
            const auto& gi = gamma[static_cast<std::size_t>(i)];
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q) C(p, i) += gi(p, q) * u(q);
        }
        MatT<T> hT(k, k);
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) hT(p, q) = T(h(p, q));
        const MatT<T> hC = hT * C;

        MatT<T> G(m + k, m + k);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                T coupling(0.0);
                for (int p = 0; p < k; ++p) coupling += C(p, i) * hC(p, j);
                G(i, j) = e1 * g(i, j) + e2 * coupling;
            }
        for (int i = 0; i < m; ++i)
            for (int p = 0; p < k; ++p) {
                G(i, m + p) = e2 * hC(p, i);
                G(m + p, i) = G(i, m + p);
            }
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) G(m + p, m + q) = e2 * hT(p, q);
        return G;
    }

    BaseChart base_;
    BundleConfig bundle_;
    WeightProfile weights_;
};

inline Mat metric_matrix(const MetricField& field, const TotalPoint& p) { return field.matrix(p); }

/// G-orthonormal adapted frame E_i = e^{-phi1} e_i^h, E_{m+p} = e^{-phi2} σ_p^v,
/// returned as columns in raw coordinates. e_i and σ_p are the
/// Cholesky-orthonormalized coordinate frames of g(x) and h.
inline Mat adapted_frame(const MetricField& field, const TotalPoint& p) {
    const int m = field.base_dim();
    const int k = field.rank();
    const double r = field.radius(p);
    const double s1 = std::exp(-field.weights().p1(r));
    const double s2 = std::exp(-field.weights().p2(r));

    const Mat g = field.base().metric(p.x);
    const Mat& h = field.bundle().fiber_metric();
    // L Lᵀ = g  ⇒  columns of L^{-T} are g-orthonormal.
    const Mat base_frame = g.llt().matrixU().solve(Mat::Identity(m, m));
    const Mat fiber_frame = h.llt().matrixU().solve(Mat::Identity(k, k));
    const auto gamma = field.bundle().connection(p.x, m);

    Mat E = Mat::Zero(m + k, m + k);
    for (int i = 0; i < m; ++i) {
        const Vec X = base_frame.col(i);
        E.block(0, i, m, 1) = s1 * X;
        // Horizontal lift: δu = 0  ⇒  du^p = -Γ^p_{jq} u^q X^j.
        Vec du = Vec::Zero(k);
        for (int j = 0; j < m; ++j) du -= X(j) * (gamma[static_cast<std::size_t>(j)] * p.u);
        E.block(m, i, k, 1) = s1 * du;
    }
    for (int q = 0; q < k; ++q) E.block(m, m + q, k, 1) = s2 * fiber_frame.col(q);
    return E;
}

/// Fiber components of the tautological vertical field ξ at p.
inline Vec tautological_components(const TotalPoint& p) { return p.u; }

/// div ξ = 2 m r phi1' + (1 + 2 r phi2') k.
inline double div_xi_closed_form(const WeightProfile& w, int m, int k, double r) {
    return 2.0 * m * r * w.p1(r, 1) + (1.0 + 2.0 * r * w.p2(r, 1)) * k;
}

} // namespace ssb

#endif // SSB_BUNDLE_HPP
