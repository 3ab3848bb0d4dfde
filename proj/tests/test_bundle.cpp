#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ssb/bundle.hpp"
#include "ssb/lemmas.hpp"
#include "ssb/levi_civita.hpp"
#include "ssb/oracle.hpp"
#include "ssb/sampling.hpp"

using namespace ssb;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// so(2)-valued blocks are compatible with h = I.
BundleConfig rotating_bundle() {
    Mat a(2, 2), b(2, 2);
    a << 0.0, 0.7, -0.7, 0.0;
    b << 0.0, -0.3, 0.3, 0.0;
    return BundleConfig::with_constant_connection(Mat::Identity(2, 2), {a, b});
}

BaseChart warped_chart() {
    return BaseChart::from_generic(2, {{-2, 2}, {-2, 2}}, [](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::Scalar;
        MatT<S> g(2, 2);
        g(0, 0) = S(1.0) + x(1) * x(1);
        g(0, 1) = S(0.2) * x(0);
        g(1, 0) = S(0.2) * x(0);
        g(1, 1) = S(2.0) + S(0.0) * x(0);
        return g;
    });
}

} // namespace

TEST(Radius, Examples) {
    EXPECT_EQ(radius(BundleConfig::trivial(2), {vec({0}), vec({0, 0})}), 0.0);
    EXPECT_EQ(radius(BundleConfig::trivial(2), {vec({0}), vec({1, 1})}), 2.0);
    Mat h(2, 2);
    h << 2, 0, 0, 1;
    EXPECT_EQ(radius(BundleConfig(h), {vec({0}), vec({1, 0})}), 2.0);
}

TEST(BundleConfig, RejectsBadInput) {
    Mat h(2, 2);
    h << 1, 0, 0, -1;
    EXPECT_THROW(BundleConfig{h}, config_error);
    Mat sym(2, 2);
    sym << 0, 1, 1, 0;
    EXPECT_THROW(BundleConfig::with_constant_connection(Mat::Identity(2, 2), {sym}), config_error);
    EXPECT_THROW(BundleConfig::trivial(0), config_error);
}

TEST(MetricMatrix, SasakiOnTrivialDataIsIdentity) {
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(3), presets::sasaki());
    const Mat G = metric_matrix(f, {vec({0.3, -1.0}), vec({0.4, 1.0, -2.0})});
    EXPECT_TRUE(G.isApprox(Mat::Identity(5, 5), 0.0));
}

TEST(MetricMatrix, VerticalFactorFour) {
    // e^{2 phi2(1)} = 4
    const auto w = presets::vertical_conformal(SmoothFn::polynomial({0.0, std::log(2.0)}));
    const MetricField f(BaseChart::euclidean(1), BundleConfig::trivial(1), w);
    const Mat G = metric_matrix(f, {vec({0.5}), vec({1.0})});
    EXPECT_NEAR(G(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(G(1, 1), 4.0, 1e-14);
    EXPECT_EQ(G(0, 1), 0.0);
}

TEST(MetricMatrix, ConnectionCouplingMatchesCoframeCongruence) {
    const auto w = presets::polynomial({0.0, 0.2}, {0.0, -0.1});
    const MetricField f(warped_chart(), rotating_bundle(), w);
    const TotalPoint p{vec({0.4, -0.3}), vec({0.8, -0.5})};
    const Mat G = metric_matrix(f, p);

    // Direct evaluation on coordinate vectors: θ = J dz with
    // J = [I 0; C I], C(p, i) = Γ^p_{iq} u^q, and G = Jᵀ (e^{2phi1} g ⊕ e^{2phi2} h) J.
    const double r = f.radius(p);
    const auto gam = f.bundle().connection(p.x, 2);
    Mat C(2, 2);
    for (int i = 0; i < 2; ++i) C.col(i) = gam[static_cast<std::size_t>(i)] * p.u;
    Mat J = Mat::Identity(4, 4);
    J.block(2, 0, 2, 2) = C;
    Mat D = Mat::Zero(4, 4);
    D.topLeftCorner(2, 2) = std::exp(2.0 * w.p1(r)) * f.base().metric(p.x);
    D.bottomRightCorner(2, 2) = std::exp(2.0 * w.p2(r)) * Mat::Identity(2, 2);
    const Mat expected = J.transpose() * D * J;

    EXPECT_LE((G - expected).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GT(G.topRightCorner(2, 2).cwiseAbs().maxCoeff(), 0.1);
    EXPECT_TRUE(is_spd(G));
    // off-diagonal block equals e^{2phi2} (hC)ᵀ
    EXPECT_LE((G.topRightCorner(2, 2) - std::exp(2.0 * w.p2(r)) * C.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MetricMatrix, FlatIsBlockDiagonal) {
    const auto w = presets::polynomial({0.1, 0.3}, {0.0, 0.0, 0.2});
    const MetricField f(warped_chart(), BundleConfig::trivial(2), w);
    Rng rng(3);
    for (const auto& p : sample_box_points(rng, {{-1.5, 1.5}, {-1.5, 1.5}}, 2, {-1, 1}, 20)) {
        const Mat G = metric_matrix(f, p);
        const double r = f.radius(p);
        EXPECT_EQ(G.topRightCorner(2, 2).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LE((G.topLeftCorner(2, 2) - std::exp(2 * w.p1(r)) * f.base().metric(p.x)).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LE((G.bottomRightCorner(2, 2) - std::exp(2 * w.p2(r)) * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(),
                  1e-14);
    }
}

TEST(MetricMatrix, ErrorsOutsideDomainAndOnBadWeights) {
    const MetricField f(BaseChart::euclidean(1, -1, 1), BundleConfig::trivial(1), presets::sasaki());
    EXPECT_THROW(metric_matrix(f, {vec({1.5}), vec({0.0})}), domain_error);
    EXPECT_THROW(f.matrix(vec({0.0})), config_error);
    // e^{2phi} overflows to inf: not a valid metric.
    const MetricField g(BaseChart::euclidean(1), BundleConfig::trivial(1), presets::polynomial({0, 400.0}, {0}));
    EXPECT_THROW(metric_matrix(g, {vec({0.0}), vec({1.0})}), geometry_error);
}

TEST(MetricMatrix, SpdForEveryPresetAtSampledPoints) {
    const WeightProfile profiles[] = {presets::sasaki(), presets::linear_horizontal(),
                                      presets::vertical_conformal(SmoothFn::polynomial({0, 0, 1}))};
    Rng rng(11);
    for (const auto& w : profiles) {
        const MetricField f(warped_chart(), rotating_bundle(), w);
        for (const auto& p : sample_box_points(rng, {{-1.8, 1.8}, {-1.8, 1.8}}, 2, {-1.2, 1.2}, 30))
            EXPECT_TRUE(is_spd(metric_matrix(f, p)));
    }
}

TEST(AdaptedFrame, SasakiStandardBasis) {
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(2), presets::sasaki());
    EXPECT_TRUE(adapted_frame(f, {vec({0.1, 0.2}), vec({0.3, 0.4})}).isApprox(Mat::Identity(4, 4), 0.0));
}

TEST(AdaptedFrame, HorizontalScaledByHalf) {
    // e^{phi1} = 2 at r = 1
    const auto w = presets::polynomial({0.0, std::log(2.0)}, {0.0});
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(1), w);
    const Mat E = adapted_frame(f, {vec({0.0, 0.0}), vec({1.0})});
    EXPECT_NEAR(E(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(E(1, 1), 0.5, 1e-15);
    EXPECT_NEAR(E(2, 2), 1.0, 1e-15);
}

TEST(AdaptedFrame, OrthonormalForGenericConfigurations) {
    Mat h(2, 2);
    h << 2.0, 0.3, 0.3, 1.0;
    const auto w = presets::polynomial({0.1, -0.2, 0.05}, {0.0, 0.3});
    Rng rng(5);
    for (bool flat : {true, false}) {
        // Γ with hΓ antisymmetric: Γ = h^{-1} A.
        Mat A(2, 2);
        A << 0, 0.4, -0.4, 0;
        const BundleConfig b = flat ? BundleConfig(h)
                                    : BundleConfig::with_constant_connection(h, {Mat(h.inverse() * A), Mat(0.5 * h.inverse() * A)});
        const MetricField f(warped_chart(), b, w);
        for (const auto& p : sample_box_points(rng, {{-1.5, 1.5}, {-1.5, 1.5}}, 2, {-1, 1}, 20)) {
            const Mat E = adapted_frame(f, p);
            EXPECT_LE((E.transpose() * metric_matrix(f, p) * E - Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(Tautological, ComponentsAndLinearity) {
    EXPECT_TRUE(tautological_components({vec({1}), vec({0, 0, 0})}).isZero(0.0));
    EXPECT_EQ(tautological_components({vec({1}), vec({1, 2})}), vec({1, 2}));
    const TotalPoint p{vec({0.5}), vec({1.0, -2.0})};
    const TotalPoint q{p.x, 3.0 * p.u};
    EXPECT_EQ(tautological_components(q), 3.0 * tautological_components(p));
}

TEST(DivXi, ClosedFormExamples) {
    for (int m : {1, 3})
        for (int k : {1, 2, 5}) EXPECT_EQ(div_xi_closed_form(presets::sasaki(), m, k, 0.7), k);
    EXPECT_DOUBLE_EQ(div_xi_closed_form(presets::linear_horizontal(), 2, 3, 1.0), 7.0);
    EXPECT_DOUBLE_EQ(div_xi_closed_form(presets::vertical_conformal(SmoothFn::polynomial({0, 1})), 1, 2, 0.5), 4.0);
}

TEST(DivXi, MatchesNumericDivergence) {
    struct Case {
        WeightProfile w;
        int m, k;
        Vec x, u;
        double expect;
    };
    const Case cases[] = {
        {presets::linear_horizontal(), 2, 3, vec({0.2, -0.4}), Vec::Constant(3, 1.0 / std::sqrt(3.0)), 7.0},
        {presets::vertical_conformal(SmoothFn::polynomial({0, 1})), 1, 2, vec({0.3}), vec({0.5, 0.5}), 4.0},
    };
    for (const auto& c : cases) {
        const MetricField f(BaseChart::euclidean(c.m), BundleConfig::trivial(c.k), c.w);
        const TotalPoint p{c.x, c.u};
        for (Scheme s : {Scheme::central_fd, Scheme::forward_mode}) {
            DiffConfig cfg;
            cfg.scheme = s;
            EXPECT_NEAR(divergence_numeric(f, VectorFieldOnE::tautological(c.m, c.k), p, cfg), c.expect, 1e-6);
        }
    }
}

TEST(LeviCivita, SasakiSymbolsVanish) {
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(2), presets::sasaki());
    const TotalPoint p{vec({0.3, 0.1}), vec({0.5, -0.7})};
    for (const auto& m : christoffel_predicted(f, p)) EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(check_levi_civita_flat(f, p), 1e-12);
}

TEST(LeviCivita, VerticalLinearWeight) {
    const MetricField f(BaseChart::euclidean(1), BundleConfig::trivial(1),
                        presets::vertical_conformal(SmoothFn::polynomial({0, 1})));
    EXPECT_LE(check_levi_civita_flat(f, {vec({0.2}), vec({1.0})}), 1e-6);
}

TEST(LeviCivita, HorizontalLinearWeight) {
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(1), presets::linear_horizontal());
    EXPECT_LE(check_levi_civita_flat(f, {vec({0.4, -0.6}), vec({0.8})}), 1e-6);
}

TEST(LeviCivita, CurvedBaseAndGeneralFiberMetric) {
    Mat h(2, 2);
    h << 1.5, 0.2, 0.2, 0.8;
    const MetricField f(warped_chart(), BundleConfig(h), presets::polynomial({0, 0.3, -0.1}, {0.05, -0.2, 0.1}));
    const TotalPoint p{vec({0.3, 0.7}), vec({0.6, -0.4})};
    EXPECT_LE(check_levi_civita_flat(f, p), 1e-6);
    DiffConfig fm;
    fm.scheme = Scheme::forward_mode;
    EXPECT_LE(check_levi_civita_flat(f, p, fm), 1e-10);
}

TEST(LeviCivita, RefusesNonFlatConnection) {
    const MetricField f(warped_chart(), rotating_bundle(), presets::sasaki());
    EXPECT_THROW(check_levi_civita_flat(f, {vec({0.1, 0.1}), vec({0.2, 0.3})}), unsupported_configuration_error);
}

TEST(Lemmas, DerFunOnFlatAndTwistedBundles) {
    const auto rf = RadialFunction("cubic", SmoothFn::polynomial({0.3, -1.0, 0.5, 0.2}));
    const auto w = presets::polynomial({0.0, 0.2}, {0.0, -0.3});
    Rng rng(21);
    for (bool flat : {true, false}) {
        const MetricField f(warped_chart(), flat ? BundleConfig::trivial(2) : rotating_bundle(), w);
        for (const auto& p : sample_box_points(rng, {{-1.5, 1.5}, {-1.5, 1.5}}, 2, {-1, 1}, 10)) {
            const auto rep = check_der_fun(rf, f, p);
            EXPECT_LE(rep.max_horizontal, 1e-8);
            EXPECT_LE(rep.max_vertical, 1e-8);
        }
    }
}

TEST(Lemmas, DerXiJacobianIsExact) {
    Rng rng(2);
    for (const auto& p : sample_box_points(rng, {{-1, 1}, {-1, 1}, {-1, 1}}, 2, {-2, 2}, 10))
        EXPECT_EQ(check_der_xi(p), 0.0);
}
