#ifndef SSB_SMOOTH_FN_HPP
#define SSB_SMOOTH_FN_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ssb/dual.hpp"
#include "ssb/errors.hpp"

namespace ssb {

/// A real function of one variable together with its analytic derivatives.
///
/// Slot d holds the d-th derivative. Slots are supplied by the constructor;
/// nothing is differentiated internally. `lift` evaluates the function on a
/// forward-mode jet by Taylor composition through the stored slots, so a
/// Dual<Dual<double>> argument consumes slots 0..2.
class SmoothFn {
public:
    using Slot = std::function<double(double)>;

    SmoothFn() = default;
    explicit SmoothFn(std::vector<Slot> slots)
        : slots_(std::make_shared<const std::vector<Slot>>(std::move(slots))) {}

    int max_order() const { return slots_ ? static_cast<int>(slots_->size()) - 1 : -1; }

    double operator()(double t, int order = 0) const {
        if (order < 0 || order > max_order())
            throw unsupported_order_error("derivative of order " + std::to_string(order) +
                                          " not supplied (max " + std::to_string(max_order()) + ")");
        return (*slots_)[static_cast<std::size_t>(order)](t);
    }

    template <class T>
    T lift(const T& t) const {
        return lift_from(0, t);
    }

    /// Derivative stack of t ↦ f'(t), one order shorter.
    SmoothFn derivative() const {
        if (max_order() < 1) throw unsupported_order_error("cannot differentiate a bare value slot");
        return SmoothFn(std::vector<Slot>(slots_->begin() + 1, slots_->end()));
    }

    friend SmoothFn operator+(const SmoothFn& a, const SmoothFn& b) {
        const int n = std::min(a.max_order(), b.max_order());
        std::vector<Slot> out;
        for (int d = 0; d <= n; ++d) out.push_back([a, b, d](double t) { return a(t, d) + b(t, d); });
        return SmoothFn(std::move(out));
    }

    friend SmoothFn operator*(double s, const SmoothFn& a) {
        std::vector<Slot> out;
        for (int d = 0; d <= a.max_order(); ++d) out.push_back([a, s, d](double t) { return s * a(t, d); });
        return SmoothFn(std::move(out));
    }

    static SmoothFn constant(double c, int order = 4) {
        std::vector<Slot> out{[c](double) { return c; }};
        for (int d = 1; d <= order; ++d) out.push_back([](double) { return 0.0; });
        return SmoothFn(std::move(out));
    }

    static SmoothFn zero(int order = 4) { return constant(0.0, order); }

    /// Σ c_i t^i.
    static SmoothFn polynomial(std::vector<double> coeffs, int order = 4) {
        std::vector<Slot> out;
        for (int d = 0; d <= order; ++d) {
            out.push_back([coeffs, d](double t) {
                double acc = 0.0;
                for (std::size_t i = coeffs.size(); i-- > static_cast<std::size_t>(d);) {
                    double falling = 1.0;
                    for (int j = 0; j < d; ++j) falling *= static_cast<double>(i) - j;
                    acc = acc * t + coeffs[i] * falling;
                }
                return acc;
            });
        }
        return SmoothFn(std::move(out));
    }

    /// c · t^p for real p; derivatives vanish identically once a
    /// nonnegative integer power has been differentiated away.
    static SmoothFn power(double c, double p, int order = 4) {
        std::vector<Slot> out;
        for (int d = 0; d <= order; ++d) {
            double falling = 1.0;
            for (int j = 0; j < d; ++j) falling *= p - j;
            if (falling == 0.0) {
                out.push_back([](double) { return 0.0; });
                continue;
            }
            out.push_back([c, p, d, falling](double t) { return c * falling * std::pow(t, p - d); });
        }
        return SmoothFn(std::move(out));
    }

    /// c · ln t.
    static SmoothFn log(double c, int order = 4) {
        std::vector<Slot> out{[c](double t) { return c * std::log(t); }};
        for (int d = 1; d <= order; ++d) {
            // d^d/dt^d ln t = (-1)^(d-1) (d-1)! t^(-d)
            double coef = c;
            for (int j = 1; j < d; ++j) coef *= -static_cast<double>(j);
            out.push_back([coef, d](double t) { return coef * std::pow(t, -d); });
        }
        return SmoothFn(std::move(out));
    }

    /// c · (t ln t − t).
    static SmoothFn t_log_t_minus_t(double c, int order = 4) {
        std::vector<Slot> out{[c](double t) { return c * (t * std::log(t) - t); },
                              [c](double t) { return c * std::log(t); }};
        if (order >= 2) {
            SmoothFn tail = log(c, order - 1).derivative();
            for (int d = 0; d <= tail.max_order(); ++d) out.push_back([tail, d](double t) { return tail(t, d); });
        }
        out.resize(static_cast<std::size_t>(order + 1));
        return SmoothFn(std::move(out));
    }

    /// c · exp(a t).
    static SmoothFn exponential(double c, double a, int order = 4) {
        std::vector<Slot> out;
        double coef = c;
        for (int d = 0; d <= order; ++d, coef *= a)
            out.push_back([coef, a](double t) { return coef * std::exp(a * t); });
        return SmoothFn(std::move(out));
    }

private:
    double lift_from(int offset, double t) const { return (*this)(t, offset); }

    template <class T>
    Dual<T> lift_from(int offset, const Dual<T>& t) const {
        return {lift_from(offset, t.v), lift_from(offset + 1, t.v) * t.d};
    }

    std::shared_ptr<const std::vector<Slot>> slots_;
};

} // namespace ssb

#endif // SSB_SMOOTH_FN_HPP
