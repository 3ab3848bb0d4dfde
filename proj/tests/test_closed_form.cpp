#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ssb/closed_form.hpp"
#include "ssb/families.hpp"
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

BaseFunction constant_fn() {
    return BaseFunction::from_generic(
        "const", [](const auto& x) { return 0.0 * x(0) + 2.0; }, [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; }, [](const Vec& x) -> Vec { return Vec::Zero(x.size()); });
}

BaseFunction first_coordinate(int m) {
    return BaseFunction::from_generic(
        "x0", [](const auto& x) { return x(0); }, [](const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; },
        [m](const Vec&) -> Vec { return Vec::Unit(m, 0); });
}

BaseFunction half_square_x0(int m) {
    // Δ = 1, Δ² = 0 on Euclidean space.
    return BaseFunction::from_generic(
        "x0^2/2", [](const auto& x) { return 0.5 * x(0) * x(0); }, [](const Vec&) { return 1.0; },
        [](const Vec&) { return 0.0; }, [m](const Vec& x) -> Vec { return x(0) * Vec::Unit(m, 0); });
}

BaseFunction norm_squared(int m) {
    return BaseFunction::from_generic(
        "|x|^2", [](const auto& x) { return x.dot(x); }, [m](const Vec&) { return 2.0 * m; },
        [](const Vec&) { return 0.0; }, [](const Vec& x) -> Vec { return 2.0 * x; });
}

BaseFunction harmonic_xy() {
    return BaseFunction::from_generic(
        "x^2-y^2", [](const auto& x) { return x(0) * x(0) - x(1) * x(1); }, [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; }, [](const Vec& x) -> Vec { return vec({2 * x(0), -2 * x(1)}); });
}

// The inner Laplacian is exact under forward mode, so the outer step needs no
// headroom over the base step.
DiffConfig forward() {
    DiffConfig c;
    c.scheme = Scheme::forward_mode;
    c.nested_step_ratio = 1.0;
    return c;
}

} // namespace

// ---------------------------------------------------------------------------
// vertical lifts

TEST(GradVerticalLift, Examples) {
    const MetricField sas(BaseChart::euclidean(2), BundleConfig::trivial(1), presets::sasaki());
    const TotalPoint p{vec({0.3, 0.5}), vec({1.0})};
    EXPECT_TRUE(grad_vertical_lift(constant_fn(), sas, p).isZero(0.0));
    EXPECT_EQ(grad_vertical_lift(first_coordinate(2), sas, p), vec({1, 0, 0}));

    const MetricField lin(BaseChart::euclidean(2), BundleConfig::trivial(1), presets::linear_horizontal());
    const Vec g = grad_vertical_lift(first_coordinate(2), lin, p);  // r = 1
    EXPECT_NEAR(g(0), std::exp(-2.0), 1e-15);
    const auto F = ScalarFieldOnE::vertical_lift(first_coordinate(2), 2, 1);
    EXPECT_LE((g - gradient_numeric(lin, F, p)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GradVerticalLift, HorizontalLiftUnderConnection) {
    Mat a(2, 2);
    a << 0, 0.5, -0.5, 0;
    const MetricField f(BaseChart::euclidean(2), BundleConfig::with_constant_connection(Mat::Identity(2, 2), {a, a}),
                        presets::polynomial({0.0, 0.3}, {0.0, -0.2}));
    const TotalPoint p{vec({0.4, -0.2}), vec({0.7, 0.3})};
    const auto bf = harmonic_xy();
    EXPECT_LE((grad_vertical_lift(bf, f, p) - gradient_numeric(f, ScalarFieldOnE::vertical_lift(bf, 2, 2), p, forward()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
}

TEST(GradVerticalLift, MissingGradientIsCapabilityError) {
    const BaseFunction bf("nograd", [](const Vec& x) { return x(0); }, {}, {});
    const MetricField f(BaseChart::euclidean(1), BundleConfig::trivial(1), presets::sasaki());
    EXPECT_THROW(grad_vertical_lift(bf, f, {vec({0.0}), vec({1.0})}), capability_error);
}

TEST(LaplacianVerticalLift, Examples) {
    const WeightProfile profiles[] = {presets::sasaki(), presets::linear_horizontal(),
                                      presets::vertical_conformal(SmoothFn::polynomial({0, 0, 1}))};
    for (const auto& w : profiles) EXPECT_EQ(laplacian_vertical_lift(harmonic_xy(), w, 1.3, vec({0.2, 0.9})), 0.0);
    for (int m : {1, 2, 4})
        EXPECT_EQ(laplacian_vertical_lift(norm_squared(m), presets::sasaki(), 0.5, Vec::Zero(m)), 2.0 * m);

    // phi1 = r at r = ln 2 / 2: e^{-2 phi1} = 1/2
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(1), presets::linear_horizontal());
    const TotalPoint p{vec({0.3, -0.4}), vec({std::sqrt(std::log(2.0) / 2.0)})};
    const double closed = laplacian_vertical_lift(norm_squared(2), f, p);
    EXPECT_NEAR(closed, 2.0, 1e-14);
    EXPECT_NEAR(closed, laplace_beltrami_numeric(f, ScalarFieldOnE::vertical_lift(norm_squared(2), 2, 1), p), 1e-6);
}

TEST(BilaplacianVerticalLift, ConstantPhi1PreservesBiharmonicity) {
    const auto w = presets::polynomial({0.7}, {0.0, 0.4, -0.1});
    const auto bf = base_example_inverse_norm(5);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        const Vec x = rng.uniform_box(std::vector<Interval>(5, {0.5, 1.5}));
        const double r = rng.uniform(0.1, 3.0);
        EXPECT_EQ(bilaplacian_vertical_lift(bf, w, 5, 2, r, x), 0.0);
        const double f = bf(x);
        EXPECT_NEAR(laplacian_vertical_lift(bf, w, r, x), std::exp(-1.4) * -2.0 * f * f * f, 1e-14);
    }
}

TEST(BilaplacianVerticalLift, LinearHorizontalWithUnitLaplacian) {
    const auto w = presets::linear_horizontal();
    EXPECT_NEAR(bilaplacian_vertical_lift(half_square_x0(2), w, 2, 2, 1.0, vec({0.1, 0.2})), -8.0 * std::exp(-2.0),
                1e-15);
    const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(2), w);
    const TotalPoint p{vec({0.1, 0.2}), vec({1.0, 0.0})};
    const auto F = ScalarFieldOnE::vertical_lift(half_square_x0(2), 2, 2);
    EXPECT_NEAR(bilaplacian_numeric(f, F, p), -8.0 * std::exp(-2.0), 1e-3);
    EXPECT_NEAR(bilaplacian_numeric(f, F, p, forward()), -8.0 * std::exp(-2.0), 1e-5);
}

TEST(BilaplacianVerticalLift, BracketEqualsEquationE) {
    const auto w = presets::polynomial({0.0, 0.3, -0.2, 0.05}, {0.1, -0.4, 0.2});
    for (int m : {1, 2, 3})
        for (int k : {1, 2, 4})
            for (double r : {0.2, 1.0, 2.5}) EXPECT_EQ(vertical_bracket(w, m, k, r), equation_E_residual(w, m, k, r).e);
}

TEST(HarmonicityFactorization, ZeroSetsAgree) {
    const auto w = presets::polynomial({0.0, 0.5}, {0.0});
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const Vec x = rng.uniform_box({{-1, 1}, {-1, 1}});
        const double r = rng.uniform(0.0, 3.0);
        for (const auto& bf : {harmonic_xy(), half_square_x0(2), norm_squared(2)}) {
            const double lap = laplacian_vertical_lift(bf, w, r, x);
            EXPECT_EQ(lap == 0.0, bf.laplacian(x) == 0.0);
            EXPECT_EQ(std::signbit(lap), std::signbit(bf.laplacian(x)));
        }
    }
}

// ---------------------------------------------------------------------------
// radial functions

TEST(GradRadial, Examples) {
    const MetricField sas(BaseChart::euclidean(1), BundleConfig::trivial(2), presets::sasaki());
    const TotalPoint p{vec({0.2}), vec({0.6, 0.8})};  // r = 1
    EXPECT_TRUE(grad_radial(RadialFunction::linear(0.0, 3.0), sas, p).isZero(0.0));
    EXPECT_EQ(grad_radial(RadialFunction::linear(1.0, 0.0), sas, p).tail(2), 2.0 * p.u);

    const MetricField vc(BaseChart::euclidean(1), BundleConfig::trivial(2),
                         presets::vertical_conformal(SmoothFn::polynomial({0, 1})));
    const auto rf = RadialFunction::linear(1.0, 0.0);
    const Vec g = grad_radial(rf, vc, p);
    EXPECT_LE((g.tail(2) - 2.0 * std::exp(-2.0) * p.u).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((g - gradient_numeric(vc, ScalarFieldOnE::r_radial(rf, vc.bundle(), 1), p)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GradRadial, BelowDomainMinimumIsDomainError) {
    const MetricField sas(BaseChart::euclidean(1), BundleConfig::trivial(1), presets::sasaki());
    const auto rf = radial_family({2, FamilyCase::k2, 1.0, 0.0, 0.0});
    EXPECT_THROW(grad_radial(rf, sas, {vec({0.0}), vec({0.01})}), domain_error);
    EXPECT_THROW(laplacian_radial(rf, presets::sasaki(), 1, 2, 1e-4), domain_error);
    EXPECT_THROW(bilaplacian_radial(rf, presets::sasaki(), 1, 2, 0.0), domain_error);
}

TEST(LaplacianRadial, Examples) {
    const auto w = presets::sasaki();
    for (int k : {1, 2, 5})
        for (double a : {0.0, 1.5, -2.0})
            for (double r : {0.1, 2.0}) EXPECT_DOUBLE_EQ(laplacian_radial(RadialFunction::linear(a, 0.7), w, 3, k, r), 2.0 * k * a);
    EXPECT_EQ(laplacian_radial(RadialFunction::linear(1.0, 0.0), w, 1, 2, 0.8), 4.0);
    EXPECT_EQ(laplacian_radial(RadialFunction::linear(0.0, 4.0), presets::linear_horizontal(), 2, 3, 1.1), 0.0);

    const MetricField f(BaseChart::euclidean(1), BundleConfig::trivial(2), w);
    EXPECT_NEAR(laplace_beltrami_numeric(f, ScalarFieldOnE::r_radial(RadialFunction::linear(1.0, 0.0), f.bundle(), 1),
                                         {vec({0.0}), vec({0.5, 0.5})}),
                4.0, 1e-8);
}

TEST(BilaplacianRadial, Examples) {
    const auto w = presets::sasaki();
    for (int k : {1, 2, 3}) EXPECT_EQ(bilaplacian_radial(RadialFunction::linear(2.0, -1.0), w, 2, k, 1.3), 0.0);
    const auto minus_log = radial_family({2, FamilyCase::k2, 1.0, 0.0, 0.0});
    EXPECT_NEAR(bilaplacian_radial(minus_log, w, 1, 2, 1.0), 0.0, 1e-13);

    // α = r², k = 2, r = 1: value fixed by the numerical oracle on flat coordinates.
    const auto sq = RadialFunction::polynomial({0.0, 0.0, 1.0});
    EXPECT_NEAR(bilaplacian_radial(sq, w, 1, 2, 1.0), 64.0, 1e-12);
    const MetricField f(BaseChart::euclidean(1), BundleConfig::trivial(2), w);
    const TotalPoint p{vec({0.0}), vec({0.6, 0.8})};
    EXPECT_NEAR(bilaplacian_numeric(f, ScalarFieldOnE::r_radial(sq, f.bundle(), 1), p), 64.0, 1e-3 * 65.0);
}

TEST(BilaplacianRadial, SasakiPolynomialClosedForm) {
    // Δ²α(r) on flat fibers = 16 r² α⁗ + 16 (k+2) r α‴ + 4 k (k+2) α″.
    const auto rf = RadialFunction::polynomial({0.3, -0.2, 0.5, 0.25, -0.1});
    for (int k : {1, 2, 3, 6})
        for (double r : {0.5, 1.0, 2.0}) {
            const double expect = 16 * r * r * rf(r, 4) + 16 * (k + 2) * r * rf(r, 3) + 4 * k * (k + 2) * rf(r, 2);
            EXPECT_NEAR(bilaplacian_radial(rf, presets::sasaki(), 2, k, r), expect, 1e-12 * (1 + std::abs(expect)));
        }
}

TEST(BilaplacianRadial, NeedsFourthOrderSeed) {
    const RadialFunction rf("short", SmoothFn::polynomial({0, 1}, 3));
    EXPECT_THROW(bilaplacian_radial(rf, presets::sasaki(), 1, 1, 1.0), unsupported_order_error);
}

TEST(Composition, SeedSlotsMatchFiniteDifferences) {
    const auto w = presets::polynomial({0.0, 0.3, -0.1, 0.02}, {0.05, -0.2, 0.1, 0.01});
    const auto rf = RadialFunction::polynomial({0.2, -0.4, 0.3, 0.1, -0.02});
    const auto beta = laplacian_as_radial(rf, w, 2, 3);
    for (double r = 0.5; r <= 3.0; r += 0.25) {
        EXPECT_EQ(beta(r), laplacian_radial(rf, w, 2, 3, r));
        const double d1 = derivative_1d([&](double t) { return laplacian_radial(rf, w, 2, 3, t); }, r, 1e-2);
        EXPECT_NEAR(beta(r, 1), d1, 1e-6 * (1 + std::abs(d1)));
        const double d2 = derivative_1d([&](double t) { return beta(t, 1); }, r, 1e-2);
        EXPECT_NEAR(beta(r, 2), d2, 1e-6 * (1 + std::abs(d2)));
        EXPECT_EQ(bilaplacian_radial(rf, w, 2, 3, r), laplacian_radial(beta, w, 2, 3, r));
    }
}

TEST(OracleEquivalence, RadialRandomPoints) {
    const WeightProfile profiles[] = {presets::sasaki(), presets::vertical_conformal(SmoothFn::polynomial({0, 0, 1})),
                                      presets::polynomial({0.0, 0.2, -0.05}, {0.1, -0.15, 0.03})};
    const auto rf = RadialFunction("mix", SmoothFn::exponential(0.5, -0.4) + SmoothFn::polynomial({0, 0.3, 0.1}));
    Rng rng(12);
    for (const auto& w : profiles)
        for (int k : {1, 2}) {
            const MetricField f(BaseChart::euclidean(2), BundleConfig::trivial(k), w);
            const auto F = ScalarFieldOnE::r_radial(rf, f.bundle(), 2);
            for (const auto& p : sample_radial_points(rng, {{-1, 1}, {-1, 1}}, f.bundle().fiber_metric(), {0.5, 3.0}, 5)) {
                const double r = f.radius(p);
                const double lap = laplacian_radial(rf, w, 2, k, r);
                EXPECT_NEAR(laplace_beltrami_numeric(f, F, p), lap, 1e-6 * (1 + std::abs(lap)));
                const double bl = bilaplacian_radial(rf, w, 2, k, r);
                EXPECT_NEAR(bilaplacian_numeric(f, F, p), bl, 1e-3 * (1 + std::abs(bl)));
                EXPECT_NEAR(bilaplacian_numeric(f, F, p, forward()), bl, 1e-5 * (1 + std::abs(bl)));
            }
        }
}

// ---------------------------------------------------------------------------
// transcription cross-check

TEST(Transcription, ConstantSeedLeavesOnlyTheBareQTerm) {
    const auto c = RadialFunction::linear(0.0, 2.0);
    EXPECT_EQ(bihar_radial_transcription(c, presets::sasaki(), 2, 3, 1.2), 0.0);

    // Q = m φ1′ + m r φ1″ + (k−2) φ2′ + r (k−2) φ2″ survives without any α derivative.
    const auto w = presets::polynomial({0.0, 0.3}, {0.0, -0.2, 0.1});
    const int m = 2, k = 3;
    const double r = 1.2;
    const double Q = m * w.p1(r, 1) + m * r * w.p1(r, 2) + (k - 2) * w.p2(r, 1) + r * (k - 2) * w.p2(r, 2);
    const double expect = 4.0 * std::exp(-4.0 * w.p2(r)) * Q * div_xi_closed_form(w, m, k, r);
    EXPECT_NEAR(bihar_radial_transcription(c, w, m, k, r), expect, 1e-12 * std::abs(expect));
    EXPECT_NE(expect, 0.0);
    EXPECT_EQ(bilaplacian_radial(c, w, m, k, r), 0.0);
}

TEST(Transcription, SasakiValueIsTwiceTheOdeResidual) {
    const auto rf = RadialFunction::polynomial({0.3, -0.2, 0.5, 0.25, -0.1});
    for (int k : {1, 2, 5})
        for (double r : {0.5, 1.0, 2.0})
            EXPECT_NEAR(bihar_radial_transcription(rf, presets::sasaki(), 3, k, r), 2.0 * sasaki_radial_residual(rf, k, r),
                        1e-12);
}

// The transcription is a cross-check only; its disagreement with the
// oracle-backed composition route is recorded, not assumed away.
TEST(Transcription, DisagreesWithCompositionUnderSasaki) {
    const auto sq = RadialFunction::polynomial({0.0, 0.0, 1.0});
    EXPECT_NEAR(bihar_radial_transcription(sq, presets::sasaki(), 1, 2, 1.0), 32.0, 1e-12);
    EXPECT_NEAR(bilaplacian_radial(sq, presets::sasaki(), 1, 2, 1.0), 64.0, 1e-12);
}

TEST(Transcription, ReportListsBothRoutes) {
    const auto w = presets::vertical_conformal(SmoothFn::polynomial({0.0, 0.3}));
    const auto rows = transcription_report(RadialFunction::polynomial({0.0, 1.0, 0.5, 0.1, 0.01}), w, 2, 2,
                                           {0.5, 1.0, 2.0});
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& row : rows) EXPECT_EQ(row.difference, row.transcription - row.composition);
}
