#ifndef SSB_SAMPLING_HPP
#define SSB_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ssb/bundle.hpp"
#include "ssb/errors.hpp"
#include "ssb/linalg.hpp"

namespace ssb {

/// Portable deterministic generator: mt19937_64 is fully specified by the
/// standard, and uniforms are built from its top 53 bits directly instead of
/// going through the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double uniform(const Interval& iv) { return uniform(iv.lo, iv.hi); }

    /// Uniform in [lo, hi] with |value| ≥ min_abs (rejection).
    double uniform_nonzero(double lo, double hi, double min_abs = 1e-3) {
        for (;;) {
            const double v = uniform(lo, hi);
            if (std::abs(v) >= min_abs) return v;
        }
    }

    Vec uniform_box(const std::vector<Interval>& box) {
        Vec out(static_cast<Eigen::Index>(box.size()));
        for (std::size_t i = 0; i < box.size(); ++i) out(static_cast<Eigen::Index>(i)) = uniform(box[i]);
        return out;
    }

    /// Uniform direction on the unit sphere of R^k (cube rejection).
    Vec direction(int k) {
        for (;;) {
            Vec v(k);
            for (int i = 0; i < k; ++i) v(i) = uniform(-1.0, 1.0);
            const double n2 = v.squaredNorm();
            if (n2 > 1e-4 && n2 <= 1.0) return v / std::sqrt(n2);
        }
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

/// Points with x uniform in `x_box` and u uniform in the cube `u_box`^k.
inline std::vector<TotalPoint> sample_box_points(Rng& rng, const std::vector<Interval>& x_box, int k,
                                                 const Interval& u_box, int count) {
    std::vector<TotalPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TotalPoint p;
        p.x = rng.uniform_box(x_box);
        p.u = rng.uniform_box(std::vector<Interval>(static_cast<std::size_t>(k), u_box));
        out.push_back(std::move(p));
    }
    return out;
}

/// Points with x uniform in `x_box` and h(u, u) = r uniform in `r_range`.
inline std::vector<TotalPoint> sample_radial_points(Rng& rng, const std::vector<Interval>& x_box, const Mat& h,
                                                    const Interval& r_range, int count) {
    if (!(r_range.lo >= 0.0)) throw config_error("radius range must be nonnegative");
    const int k = static_cast<int>(h.rows());
    std::vector<TotalPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TotalPoint p;
        p.x = rng.uniform_box(x_box);
        const Vec d = rng.direction(k);
        const double r = rng.uniform(r_range);
        p.u = std::sqrt(r / d.dot(h * d)) * d;
        out.push_back(std::move(p));
    }
    return out;
}

/// n evenly spaced values on [lo, hi] (n ≥ 2), or {lo} when n = 1.
inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw config_error("grid needs at least one point");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

} // namespace ssb

#endif // SSB_SAMPLING_HPP
