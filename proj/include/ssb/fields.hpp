#ifndef SSB_FIELDS_HPP
#define SSB_FIELDS_HPP

#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "ssb/bundle.hpp"
#include "ssb/dual.hpp"
#include "ssb/errors.hpp"
#include "ssb/linalg.hpp"
#include "ssb/smooth_fn.hpp"

namespace ssb {

/// Default lower bound on r for seeds singular at the zero section.
inline constexpr double singular_domain_min = 1e-3;

/// Seed α of an r-radial function F(e) = α(r), with analytic derivatives 0..4.
class RadialFunction {
public:
    RadialFunction(std::string name, SmoothFn alpha, bool singular_at_zero = false,
                   double domain_min = -1.0)
        : name_(std::move(name)), alpha_(std::move(alpha)), singular_(singular_at_zero),
          domain_min_(domain_min >= 0.0 ? domain_min : (singular_at_zero ? singular_domain_min : 0.0)) {
        if (alpha_.max_order() < 0) throw config_error("radial function needs at least a value slot");
    }

    /// α(r) = a r + b.
    static RadialFunction linear(double a, double b) {
        return {"linear", SmoothFn::polynomial({b, a})};
    }

    static RadialFunction polynomial(std::vector<double> coeffs) {
        return {"polynomial", SmoothFn::polynomial(std::move(coeffs))};
    }

    const std::string& name() const { return name_; }
    const SmoothFn& seed() const { return alpha_; }
    bool singular_at_zero() const { return singular_; }
    double domain_min() const { return domain_min_; }
    int max_order() const { return alpha_.max_order(); }

    double operator()(double r, int order = 0) const {
        require_domain(r);
        return alpha_(r, order);
    }

    template <class T>
    T lift(const T& r) const {
        require_domain(value_of(r));
        return alpha_.lift(r);
    }

    void require_domain(double r) const {
        if (!(r >= domain_min_))
            throw domain_error("radial function '" + name_ + "' evaluated at r = " + std::to_string(r) +
                               " below its domain minimum " + std::to_string(domain_min_));
    }

private:
    std::string name_;
    SmoothFn alpha_;
    bool singular_;
    double domain_min_;
};

/// A function on the base chart, with its base Laplacian and bilaplacian.
class BaseFunction {
public:
    using Fn = std::function<double(const Vec&)>;
    using JetFn = std::function<D2(const VecT<D2>&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    BaseFunction(std::string name, Fn f, Fn lap_f, Fn bilap_f, GradFn grad_f = {}, JetFn f_jet = {})
        : name_(std::move(name)), f_(std::move(f)), lap_(std::move(lap_f)), bilap_(std::move(bilap_f)),
          grad_(std::move(grad_f)), jet_(std::move(f_jet)) {}

    /// One generic callable `f(const VecT<S>&) -> S` provides both the real
    /// closure and the second-order jet closure.
    template <class F>
    static BaseFunction from_generic(std::string name, F f, Fn lap_f, Fn bilap_f, GradFn grad_f = {}) {
        return BaseFunction(
            std::move(name), [f](const Vec& x) -> double { return f(x); }, std::move(lap_f), std::move(bilap_f),
            std::move(grad_f), [f](const VecT<D2>& x) -> D2 { return f(x); });
    }

    const std::string& name() const { return name_; }
    double operator()(const Vec& x) const { return f_(x); }
    D2 jet(const VecT<D2>& x) const {
        if (!jet_) throw capability_error("base function '" + name_ + "' has no jet closure");
        return jet_(x);
    }
    bool has_jet() const { return static_cast<bool>(jet_); }
    bool has_laplacian() const { return static_cast<bool>(lap_); }
    bool has_bilaplacian() const { return static_cast<bool>(bilap_); }
    bool has_gradient() const { return static_cast<bool>(grad_); }

    double laplacian(const Vec& x) const {
        if (!lap_) throw capability_error("base function '" + name_ + "' has no Laplacian");
        return lap_(x);
    }
    double bilaplacian(const Vec& x) const {
        if (!bilap_) throw capability_error("base function '" + name_ + "' has no bilaplacian");
        return bilap_(x);
    }
    /// Coordinate differential ∂f/∂x^i.
    Vec differential(const Vec& x) const {
        if (!grad_) throw capability_error("base function '" + name_ + "' has no analytic gradient");
        return grad_(x);
    }

private:
    std::string name_;
    Fn f_;
    Fn lap_;
    Fn bilap_;
    GradFn grad_;
    JetFn jet_;
};

/// Class C1: f^v = f ∘ π.
struct VerticalLift {
    BaseFunction f;
};

/// Class C2: F(e) = α(h(e, e)).
struct RRadial {
    RadialFunction alpha;
    Mat h;
};

/// Any scalar function of the raw coordinates z = (x, u).
struct RawCoordinate {
    std::function<double(const Vec&)> f;
    std::function<D2(const VecT<D2>&)> f_jet;
    std::string name = "raw";
};

/// Scalar field on the total space: one of the three kinds above.
class ScalarFieldOnE {
public:
    using Kind = std::variant<VerticalLift, RRadial, RawCoordinate>;

    ScalarFieldOnE(int m, int k, Kind kind) : m_(m), k_(k), kind_(std::move(kind)) {}

    static ScalarFieldOnE vertical_lift(BaseFunction f, int m, int k) {
        return {m, k, VerticalLift{std::move(f)}};
    }
    static ScalarFieldOnE r_radial(RadialFunction alpha, const BundleConfig& bundle, int m) {
        return {m, bundle.rank(), RRadial{std::move(alpha), bundle.fiber_metric()}};
    }
    template <class F>
    static ScalarFieldOnE raw(int m, int k, F f, std::string name = "raw") {
        return {m, k,
                RawCoordinate{[f](const Vec& z) -> double { return f(z); },
                              [f](const VecT<D2>& z) -> D2 { return f(z); }, std::move(name)}};
    }

    int base_dim() const { return m_; }
    int rank() const { return k_; }
    const Kind& kind() const { return kind_; }

    double operator()(const TotalPoint& p) const { return (*this)(p.coords()); }

    double operator()(const Vec& z) const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, VerticalLift>) {
                    return k.f(Vec(z.head(m_)));
                } else if constexpr (std::is_same_v<K, RRadial>) {
                    const Vec u = z.tail(k_);
                    return k.alpha(u.dot(k.h * u));
                } else {
                    return k.f(z);
                }
            },
            kind_);
    }

    D2 jet(const VecT<D2>& z) const {
        return std::visit(
            [&](const auto& k) -> D2 {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, VerticalLift>) {
                    return k.f.jet(VecT<D2>(z.head(m_)));
                } else if constexpr (std::is_same_v<K, RRadial>) {
                    return k.alpha.lift(radius_of<D2>(k.h, VecT<D2>(z.tail(k_))));
                } else {
                    if (!k.f_jet) throw capability_error("raw field '" + k.name + "' has no jet closure");
                    return k.f_jet(z);
                }
            },
            kind_);
    }

private:
    int m_;
    int k_;
    Kind kind_;
};

/// Contravariant vector field on the total space, components in raw coordinates.
class VectorFieldOnE {
public:
    using Fn = std::function<Vec(const Vec&)>;
    using JetFn = std::function<VecT<D1>(const VecT<D1>&)>;

    VectorFieldOnE(int n, Fn f, JetFn f_jet = {}) : n_(n), f_(std::move(f)), jet_(std::move(f_jet)) {}

    template <class F>
    static VectorFieldOnE from_generic(int n, F f) {
        return VectorFieldOnE(
            n, [f](const Vec& z) -> Vec { return f(z); }, [f](const VecT<D1>& z) -> VecT<D1> { return f(z); });
    }

    /// ξ: components (0, u).
    static VectorFieldOnE tautological(int m, int k) {
        return from_generic(m + k, [m, k](const auto& z) {
            using S = typename std::decay_t<decltype(z)>::Scalar;
            VecT<S> out = VecT<S>::Zero(m + k);
            out.tail(k) = z.tail(k);
            return out;
        });
    }

    int dim() const { return n_; }
    Vec operator()(const Vec& z) const { return f_(z); }
    VecT<D1> jet(const VecT<D1>& z) const {
        if (!jet_) throw capability_error("vector field has no jet closure");
        return jet_(z);
    }

private:
    int n_;
    Fn f_;
    JetFn jet_;
};

} // namespace ssb

#endif // SSB_FIELDS_HPP
