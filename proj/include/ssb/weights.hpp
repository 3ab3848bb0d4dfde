#ifndef SSB_WEIGHTS_HPP
#define SSB_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/richardson.hpp"
#include "ssb/smooth_fn.hpp"

namespace ssb {

enum class Weight { phi1, phi2 };

inline std::string_view to_string(Weight w) { return w == Weight::phi1 ? "phi1" : "phi2"; }

/// Weight pair (phi1, phi2) of a spherically symmetric metric
///   G = e^{2 phi1(r)} g  ⊕  e^{2 phi2(r)} h,   r = h(e, e).
/// Both weights carry analytic derivatives up to order 3. Immutable.
class WeightProfile {
public:
    static constexpr int max_order = 3;

    WeightProfile(std::string name, SmoothFn phi1, SmoothFn phi2)
        : name_(std::move(name)), phi1_(std::move(phi1)), phi2_(std::move(phi2)) {
        if (phi1_.max_order() < max_order || phi2_.max_order() < max_order)
            throw config_error("weight profile '" + name_ + "' must supply derivatives up to order 3");
    }

    const std::string& name() const { return name_; }
    const SmoothFn& phi1() const { return phi1_; }
    const SmoothFn& phi2() const { return phi2_; }
    const SmoothFn& weight(Weight w) const { return w == Weight::phi1 ? phi1_ : phi2_; }

    double eval(Weight w, int order, double r) const {
        if (order < 0 || order > max_order)
            throw unsupported_order_error("weight derivatives are available for orders 0..3, got " +
                                          std::to_string(order));
        return weight(w)(r, order);
    }

    // Shorthands used throughout the closed-form formulas.
    double p1(double r, int order = 0) const { return eval(Weight::phi1, order, r); }
    double p2(double r, int order = 0) const { return eval(Weight::phi2, order, r); }

private:
    std::string name_;
    SmoothFn phi1_;
    SmoothFn phi2_;
};

inline double eval_weight(const WeightProfile& profile, Weight which, int order, double r) {
    return profile.eval(which, order, r);
}

namespace presets {

/// phi1 = phi2 = 0.
inline WeightProfile sasaki() { return {"sasaki", SmoothFn::zero(), SmoothFn::zero()}; }

/// phi1 = 0, phi2 free.
inline WeightProfile vertical_conformal(SmoothFn phi2) {
    return {"vertical_conformal", SmoothFn::zero(), std::move(phi2)};
}

/// phi1(r) = r, phi2 = 0. Violates the weight equation E; used as a negative control.
inline WeightProfile linear_horizontal() {
    return {"linear_horizontal", SmoothFn::polynomial({0.0, 1.0}), SmoothFn::zero()};
}

inline WeightProfile polynomial(std::vector<double> phi1, std::vector<double> phi2) {
    return {"polynomial", SmoothFn::polynomial(std::move(phi1)), SmoothFn::polynomial(std::move(phi2))};
}

} // namespace presets

inline WeightProfile preset(std::string_view name, std::optional<SmoothFn> phi2 = std::nullopt) {
    if (name == "sasaki") return presets::sasaki();
    if (name == "linear_horizontal") return presets::linear_horizontal();
    if (name == "vertical_conformal") {
        if (!phi2) throw config_error("vertical_conformal preset needs a phi2 specification");
        return presets::vertical_conformal(*phi2);
    }
    throw config_error("unknown weight preset '" + std::string(name) + "'");
}

struct RegularitySlot {
    Weight which;
    int order;
    double max_mismatch;   // FD-vs-analytic, relative; 0 for order 0
    double right_limit;    // extrapolated lim r→0+
    bool limit_converged;
};

struct RegularityReport {
    std::vector<RegularitySlot> slots;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }

    const RegularitySlot& slot(Weight w, int order) const {
        for (const auto& s : slots)
            if (s.which == w && s.order == order) return s;
        throw config_error("no such regularity slot");
    }
};

namespace regularity {
inline constexpr double fd_relative_tolerance = 1e-6;
inline constexpr double limit_step = 1e-2;
inline constexpr double limit_tolerance = 1e-4;
} // namespace regularity

/// Checks derivative consistency (central FD of slot d-1 against slot d on the
/// positive grid points) and one-sided regularity at 0 (Richardson limit
/// from r = h, h/2, h/4 with h = 1e-2, compared against the same estimate
/// at h/8; disagreement or non-finite values flag a divergent limit).
inline RegularityReport check_regularity(const WeightProfile& profile, std::span<const double> grid) {
    RegularityReport report;
    if (grid.empty()) report.failures.emplace_back("empty grid");
    for (double r : grid)
        if (!(r >= 0.0)) report.failures.emplace_back("negative grid value " + std::to_string(r));

    const bool has_zero = std::any_of(grid.begin(), grid.end(), [](double r) { return r == 0.0; });

    for (Weight w : {Weight::phi1, Weight::phi2}) {
        const SmoothFn& fn = profile.weight(w);
        for (int order = 0; order <= WeightProfile::max_order; ++order) {
            RegularitySlot slot{w, order, 0.0, 0.0, true};
            const std::string label = std::string(to_string(w)) + "^(" + std::to_string(order) + ")";

            if (order > 0) {
                for (double r : grid) {
                    if (!(r > 0.0)) continue;
                    const double step = 1e-2 * r;
                    const double fd = derivative_1d([&](double t) { return fn(t, order - 1); }, r, step);
                    const double an = fn(r, order);
                    const double mismatch = std::abs(fd - an) / std::max(1.0, std::abs(an));
                    slot.max_mismatch = std::max(slot.max_mismatch, std::isfinite(mismatch) ? mismatch : HUGE_VAL);
                }
                if (slot.max_mismatch > regularity::fd_relative_tolerance)
                    report.failures.push_back(label + " disagrees with finite differences (" +
                                              std::to_string(slot.max_mismatch) + ")");
            }

            auto at = [&](double t) { return fn(t, order); };
            const double coarse = right_limit(at, regularity::limit_step);
            const double fine = right_limit(at, regularity::limit_step / 8.0);
            slot.right_limit = coarse;
            slot.limit_converged = std::isfinite(coarse) && std::isfinite(fine) &&
                                   std::abs(coarse - fine) <= regularity::limit_tolerance * (1.0 + std::abs(coarse));
            if (!slot.limit_converged) {
                report.failures.push_back(label + " has no finite right limit at r = 0");
            } else if (has_zero) {
                const double at_zero = fn(0.0, order);
                if (!(std::abs(at_zero - coarse) <= regularity::limit_tolerance * (1.0 + std::abs(coarse))))
                    report.failures.push_back(label + " value at r = 0 does not match its right limit");
            }
            report.slots.push_back(slot);
        }
    }
    return report;
}

} // namespace ssb

#endif // SSB_WEIGHTS_HPP
