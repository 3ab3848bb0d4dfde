#ifndef SSB_RICHARDSON_HPP
#define SSB_RICHARDSON_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace ssb {

/// Richardson extrapolation of `at_step(h)` towards h → 0.
///
/// Evaluates at h, h/2, ..., h/2^(levels-1) and eliminates error terms
/// h^p, h^(2p), ... where p = `power` (2 for central differences, 1 for
/// one-sided limits). V needs +, - and scalar division (double, Eigen types).
template <class V, class Fn>
V richardson(Fn&& at_step, double h, int levels, int power = 2) {
    std::vector<std::vector<V>> table(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        auto& row = table[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(i + 1));
        row.push_back(at_step(h / std::ldexp(1.0, i)));
        for (int j = 1; j <= i; ++j) {
            const double factor = std::ldexp(1.0, power * j) - 1.0;
            const V& fine = row[static_cast<std::size_t>(j - 1)];
            const V& coarse = table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            row.push_back(V(fine + (fine - coarse) / factor));
        }
    }
    return table.back().back();
}

/// Central-difference first derivative with Richardson extrapolation.
template <class Fn>
double derivative_1d(Fn&& f, double x, double h, int levels = 3) {
    return richardson<double>(
        [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); }, h, levels, 2);
}

/// One-sided limit lim_{t→0+} f(t), from samples at h, h/2, h/4, ...
template <class Fn>
double right_limit(Fn&& f, double h, int levels = 3) {
    return richardson<double>([&](double s) { return f(s); }, h, levels, 1);
}

} // namespace ssb

#endif // SSB_RICHARDSON_HPP
