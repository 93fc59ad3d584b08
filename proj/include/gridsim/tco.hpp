#pragma once

#include <vector>

namespace gridsim::tco {

// Cost model parameters. The conventional annual form levelizes the capital
// cost over t_ins_years with the capital-recovery factor and prices loss
// energy with the present-value energy cost over the same period; the
// windowed form replaces the capital schedule with loss-of-life-proportional
// depreciation and restricts present-value terms to an arbitrary window.
struct TcoParams {
    double capital_cost = 4575.0;      // transformer purchase price [$]
    double core_loss_kw = 0.96;        // no-load loss [kW]
    double load_loss_kw = 5.1;         // load loss at rated current [kW]
    double energy_cost = 0.05;         // [$ per kWh]
    double interest = 0.05;            // annual rate [fraction]
    double gamma = 0.2;                // loss-factor blend constant
    double hours_per_year = 8760.0;
    double t_ins_years = 20.0;         // capital depreciation period [yr]
    double vr_capital_cost = 15000.0;  // regulator replacement price [$]
    // The printed load-loss factor carries no hours term; this opt-in scales
    // it by hours_per_year for users who want symmetric energy accounting.
    bool load_loss_hours = false;
    bool annualize_capital = true;     // false: carry the raw purchase price instead
};

// Throws DomainError listing every violated parameter constraint.
void validate(const TcoParams& params);

// i*(1+i)^t / ((1+i)^t - 1): annual payment per dollar financed over t years.
double capital_recovery_factor(double interest, double t_years);

// Present value of one $/kWh-year of energy cost over t_years at the given
// interest rate.
double pec_conventional(double energy_cost, double interest, double t_years);

// Present value of the same cost stream restricted to years [t1, t2];
// equals pec_conventional at (0, t) and is additive over adjacent windows.
double pec_window(double energy_cost, double interest, double t1_years, double t2_years);

// gamma*m + (1-gamma)*m^2 with m = mean_load/peak_load. Throws DomainError
// if mean exceeds peak or peak is not positive.
double loss_factor(double mean_load, double peak_load, double gamma);

// Annual total cost of ownership: levelized capital plus core- and
// load-loss energy cost. peak_norm is the peak load in per-unit of rating;
// mean_to_peak is the load-shape ratio fed to the loss factor.
double conventional_tco(const TcoParams& params, double peak_norm = 1.0,
                        double mean_to_peak = 1.0);

struct CostBreakdown {
    double t1_years = 0.0;
    double t2_years = 0.0;
    double capital = 0.0;  // [$]
    double core = 0.0;     // [$]
    double load = 0.0;     // [$]
    double total = 0.0;    // sum of the three terms [$]
    int replacements = 0;
};

// Windowed transformer cost: capital = loss_of_life * purchase price, core
// and load terms use the window-restricted present-value energy cost with
// load statistics taken from the expected load over the window (all loads in
// the same unit, typically kVA). Throws RangeError on an invalid window.
CostBreakdown windowed_tco_transformer(double loss_of_life, const TcoParams& params,
                                       double t1_years, double t2_years, double mean_load,
                                       double peak_load, double rated_load);

// Regulator cost consumed by a loss-of-life fraction.
double vr_tco(double loss_of_life, double vr_capital_cost);

// Cumulative windowed cost over [0, horizon] with replacement accounting:
// capital accrues continuously at annual_loss_of_life * purchase price per
// year (a worn-out unit is replaced and the fresh unit keeps accruing), and
// the replacement count records how many times cumulative loss-of-life
// crosses 1 strictly before the horizon.
CostBreakdown long_term_cost_with_replacement(double annual_loss_of_life, const TcoParams& params,
                                              double horizon_years, double mean_load,
                                              double peak_load, double rated_load);

struct TcoCurvePoint {
    double year;
    double windowed;      // cumulative cost, loss-of-life depreciation [$]
    double conventional;  // cumulative cost, fixed depreciation schedule [$]
};

// Year-by-year cumulative cost under both formulations, sharing the same
// operating-cost terms; they differ only in how capital depreciates.
std::vector<TcoCurvePoint> long_term_cost_curve(double annual_loss_of_life,
                                                const TcoParams& params, int horizon_years,
                                                double mean_load, double peak_load,
                                                double rated_load);

}  // namespace gridsim::tco
