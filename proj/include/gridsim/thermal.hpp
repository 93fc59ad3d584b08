#pragma once

#include <span>

#include "gridsim/lifetime.hpp"

namespace gridsim::thermal {

// Exponential-response transformer thermal model: top-oil temperature and
// hot-spot rise each relax toward a load-dependent steady state, and the
// hot-spot temperature is their composition. Aging constants map hot-spot
// temperature to an instantaneous insulation aging rate (1.0 at the
// reference hot spot, here 110 C with the defaults).
struct TransformerThermalParams {
    double delta_q_to_rated = 55.0;  // rated top-oil rise over ambient [K]
    double delta_q_h_rated = 25.0;   // rated hot-spot rise over top oil [K]
    double tau_to = 3.5;             // oil time constant [h]
    double tau_h = 0.08;             // winding time constant [h]
    double oil_exponent = 0.8;       // x
    double winding_exponent = 1.6;   // y
    double loss_ratio = 5.0;         // load loss / no-load loss at rated
    double alpha = 15000.0 / 383.0;  // aging-rate constants: F = exp(alpha - beta/(Q + omega))
    double beta = 15000.0;           // [K]
    double omega = 273.0;            // [K]
    double t_ins_hours = 180000.0;   // normal insulation life [h]
};

// Throws DomainError listing every violated parameter constraint.
void validate(const TransformerThermalParams& params);

struct ThermalState {
    double t = 0.0;          // [h]
    double q_to = 0.0;       // top-oil temperature [C]
    double delta_q_h = 0.0;  // hot-spot rise over top oil [K]
    double q_hst = 0.0;      // q_to + delta_q_h, kept in sync by every update
};

// Analytic steady state under constant load factor k and constant ambient.
ThermalState make_steady_state(const TransformerThermalParams& params, double k, double ambient_c);

// Advance one step of length dt holding load factor k and ambient constant.
// Both states use the exact exponential response of their relaxation
// equations, so the update is stable for any dt (including tau_h << dt,
// where the hot-spot rise simply lands on its quasi-static target).
// Throws DomainError for k < 0, StabilityError for dt <= 0 or dt > tau_to/2.
ThermalState step_thermal(const ThermalState& state, double k, double ambient_c, double dt,
                          const TransformerThermalParams& params);

// Instantaneous aging rate at a hot-spot temperature; 1.0 at the reference
// temperature. Throws DomainError if q_hst + omega <= 0.
double aging_factor(double q_hst, const TransformerThermalParams& params);

// Fraction of insulation life consumed over [t1, t2] hours, where faa[i] is
// the aging factor sampled at time i*dt. Trapezoidal quadrature, with window
// endpoints off the sample grid handled by linear interpolation (exact for
// the piecewise-linear reconstruction, hence additive over adjacent
// windows). Throws RangeError if the window is invalid or not covered.
double loss_of_life(std::span<const double> faa, double dt, double t_ins_hours, double t1,
                    double t2);

// Lifetime in years from an expected per-day loss of life, extrapolating the
// representative day across the year. Zero wear is flagged degenerate and
// reports the rated insulation life instead.
LifetimeEstimate transformer_lifetime(double daily_loss, double t_ins_hours);

}  // namespace gridsim::thermal
