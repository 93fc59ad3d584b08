#pragma once

#include <span>

#include "gridsim/lifetime.hpp"

namespace gridsim::vr {

// Step-voltage regulator control: a tap decision is taken at most once per
// operating cycle; inside the dead-band the tap holds, outside it the tap
// moves by the rounded number of steps needed to restore the set-point,
// clamped to the physical tap range. Wear is counted as cumulative tap
// travel against an empirical maximum number of operations.
struct RegulatorParams {
    double v_ref = 1.0;             // set-point [pu]
    double step_size = 0.00625;     // voltage change per tap [pu]
    double dead_band_lo = 0.99;     // [pu]
    double dead_band_hi = 1.01;     // [pu]
    int tap_min = -16;
    int tap_max = 16;
    double operating_cycle = 0.5;   // minimum time between tap decisions [h]
    double max_operations = 100000; // rated tap-travel count
};

// Throws DomainError listing every violated parameter constraint.
void validate(const RegulatorParams& params);

struct TapState {
    int tap = 0;
    double travel = 0.0;          // cumulative |tap change|
    double last_decision = -1e300;  // time of the last decision [h]
    double raw_target = 0.0;      // unrounded (V - v_ref)/step at the last correction, kept for audit
};

// Tap multiplier applied to the regulated branch in the power flow.
double tap_ratio(const TapState& state, const RegulatorParams& params);

// One control evaluation at time t with measured voltage v (pu). Within the
// operating cycle of the previous decision the state is returned unchanged;
// a dead-band hold refreshes the decision time without moving the tap.
// Throws DomainError for v <= 0.
TapState step_tap(const TapState& state, double v, double t, const RegulatorParams& params);

// Fraction of rated operations consumed by a tap-position history over
// decision indices [n1, n2]. Throws RangeError if the window is outside the
// history.
double vr_loss_of_life(std::span<const int> tap_history, double max_operations, std::size_t n1,
                       std::size_t n2);

// Same, from an already-accumulated travel count.
double vr_loss_of_life(double travel, double max_operations);

// Lifetime in years from expected per-day tap travel. Zero travel is flagged
// degenerate (no wear observed) with an infinite lifetime.
LifetimeEstimate vr_lifetime(double daily_travel, double max_operations);

}  // namespace gridsim::vr
