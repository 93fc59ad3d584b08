#include "gridsim/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim::vr {

void validate(const RegulatorParams& p) {
    std::string problems;
    auto flag = [&](bool bad, const char* msg) {
        if (bad) {
            if (!problems.empty()) problems += "; ";
            problems += msg;
        }
    };
    flag(!(p.step_size > 0.0), "tap step size must be > 0");
    flag(!(p.dead_band_lo < p.v_ref && p.v_ref < p.dead_band_hi),
         "set-point must lie strictly inside the dead-band");
    flag(!(p.tap_min < p.tap_max), "tap range must satisfy tap_min < tap_max");
    flag(!(p.max_operations > 0.0), "rated operation count must be > 0");
    flag(!(p.operating_cycle > 0.0), "operating cycle must be > 0");
    if (!problems.empty()) throw DomainError("regulator parameters: " + problems);
}

double tap_ratio(const TapState& state, const RegulatorParams& p) {
    return 1.0 + static_cast<double>(state.tap) * p.step_size;
}

TapState step_tap(const TapState& state, double v, double t, const RegulatorParams& p) {
    if (!(v > 0.0)) throw DomainError("measured voltage must be > 0");
    if (t - state.last_decision < p.operating_cycle) return state;

    TapState next = state;
    next.last_decision = t;
    if (v >= p.dead_band_lo && v <= p.dead_band_hi) return next;

    // The control law's literal value is (v - v_ref)/step; the corrective
    // move has the opposite sign (a sagging voltage raises the tap).
    next.raw_target = (v - p.v_ref) / p.step_size;
    const double correction = std::round((p.v_ref - v) / p.step_size);
    const int target = state.tap + static_cast<int>(correction);
    next.tap = std::clamp(target, p.tap_min, p.tap_max);
    next.travel += std::abs(next.tap - state.tap);
    return next;
}

double vr_loss_of_life(std::span<const int> tap_history, double max_operations, std::size_t n1,
                       std::size_t n2) {
    if (!(max_operations > 0.0)) throw RangeError("rated operation count must be > 0");
    if (n1 > n2 || n2 >= tap_history.size()) {
        throw RangeError("tap-history window [" + std::to_string(n1) + ", " + std::to_string(n2) +
                         "] outside history of length " + std::to_string(tap_history.size()));
    }
    long travel = 0;
    for (std::size_t i = n1 + 1; i <= n2; ++i) {
        travel += std::abs(static_cast<long>(tap_history[i]) - tap_history[i - 1]);
    }
    return static_cast<double>(travel) / max_operations;
}

double vr_loss_of_life(double travel, double max_operations) {
    if (!(max_operations > 0.0)) throw RangeError("rated operation count must be > 0");
    if (travel < 0.0) throw RangeError("travel must be >= 0");
    return travel / max_operations;
}

LifetimeEstimate vr_lifetime(double daily_travel, double max_operations) {
    if (daily_travel < 0.0) throw DomainError("daily travel must be >= 0");
    if (!(max_operations > 0.0)) throw DomainError("rated operation count must be > 0");
    if (daily_travel == 0.0) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {max_operations / (365.0 * daily_travel), false};
}

}  // namespace gridsim::vr
