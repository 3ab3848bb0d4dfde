#ifndef SSB_DUAL_HPP
#define SSB_DUAL_HPP

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace ssb {

/// Forward-mode dual number a + b·eps with eps² = 0.
///
/// Nests with itself: Dual<Dual<double>> carries two independent
/// infinitesimals and yields mixed second partials in `.d.d`.
template <class T>
struct Dual {
    T v{};
    T d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit lift of constants
    constexpr Dual(T value, T deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

    friend Dual operator+(const Dual& a) { return a; }
    friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
    friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T inv = T(1.0) / b.v;
        return {a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv};
    }
    friend Dual operator+(const Dual& a, double s) { return {a.v + s, a.d}; }
    friend Dual operator+(double s, const Dual& a) { return {s + a.v, a.d}; }
    friend Dual operator-(const Dual& a, double s) { return {a.v - s, a.d}; }
    friend Dual operator-(double s, const Dual& a) { return {s - a.v, -a.d}; }
    friend Dual operator*(const Dual& a, double s) { return {a.v * s, a.d * s}; }
    friend Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.d}; }
    friend Dual operator/(const Dual& a, double s) { return {a.v / s, a.d / s}; }
    friend Dual operator/(double s, const Dual& a) { return Dual(s) / a; }

    friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v && a.d == b.d; }
    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
    friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
    friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

    friend std::ostream& operator<<(std::ostream& os, const Dual& a) {
        return os << '(' << a.v << " + " << a.d << " eps)";
    }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;

/// Innermost real part.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T>
Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    T e = exp(x.v);
    return {e, e * x.d};
}

template <class T>
Dual<T> log(const Dual<T>& x) {
    using std::log;
    return {log(x.v), x.d / x.v};
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    T s = sqrt(x.v);
    return {s, x.d / (2.0 * s)};
}

template <class T>
Dual<T> sin(const Dual<T>& x) {
    using std::cos;
    using std::sin;
    return {sin(x.v), cos(x.v) * x.d};
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
    using std::cos;
    using std::sin;
    return {cos(x.v), -(sin(x.v) * x.d)};
}

template <class T>
Dual<T> tanh(const Dual<T>& x) {
    using std::tanh;
    T t = tanh(x.v);
    return {t, (1.0 - t * t) * x.d};
}

template <class T>
Dual<T> pow(const Dual<T>& x, double p) {
    using std::pow;
    if (p == 0.0) return Dual<T>(1.0);
    return {pow(x.v, p), p * pow(x.v, p - 1.0) * x.d};
}

template <class T>
Dual<T> pow(const Dual<T>& x, const Dual<T>& p) {
    return exp(p * log(x));
}

template <class T>
Dual<T> abs(const Dual<T>& x) {
    return value_of(x) < 0.0 ? -x : x;
}

} // namespace ssb

namespace Eigen {

template <class T>
struct NumTraits<ssb::Dual<T>> : NumTraits<double> {
    using Real = ssb::Dual<T>;
    using NonInteger = ssb::Dual<T>;
    using Nested = ssb::Dual<T>;
    using Literal = ssb::Dual<T>;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 4,
        MulCost = 8
    };
};

} // namespace Eigen

#endif // SSB_DUAL_HPP
