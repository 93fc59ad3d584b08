#include "gridsim/tco.hpp"

#include <cmath>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim::tco {

void validate(const TcoParams& p) {
    std::string problems;
    auto flag = [&](bool bad, const char* msg) {
        if (bad) {
            if (!problems.empty()) problems += "; ";
            problems += msg;
        }
    };
    flag(!(p.capital_cost >= 0.0), "capital cost must be >= 0");
    flag(!(p.core_loss_kw >= 0.0), "core loss must be >= 0");
    flag(!(p.load_loss_kw >= 0.0), "load loss must be >= 0");
    flag(!(p.energy_cost >= 0.0), "energy cost must be >= 0");
    flag(!(p.interest > 0.0 && p.interest < 1.0), "interest rate must lie in (0, 1)");
    flag(!(p.gamma >= 0.0 && p.gamma <= 1.0), "gamma must lie in [0, 1]");
    flag(!(p.hours_per_year > 0.0), "hours per year must be > 0");
    flag(!(p.t_ins_years > 0.0), "depreciation period must be > 0");
    flag(!(p.vr_capital_cost >= 0.0), "regulator capital cost must be >= 0");
    if (!problems.empty()) throw DomainError("cost parameters: " + problems);
}

double capital_recovery_factor(double interest, double t_years) {
    if (!(interest > 0.0) || !(t_years > 0.0)) {
        throw DomainError("capital recovery factor requires interest > 0 and period > 0");
    }
    const double growth = std::pow(1.0 + interest, t_years);
    return interest * growth / (growth - 1.0);
}

double pec_conventional(double energy_cost, double interest, double t_years) {
    if (energy_cost < 0.0) throw DomainError("energy cost must be >= 0");
    if (!(interest > 0.0) || !(t_years > 0.0)) {
        throw DomainError("present-value energy cost requires interest > 0 and period > 0");
    }
    const double growth = std::pow(1.0 + interest, t_years);
    return energy_cost * (growth - 1.0) / (interest * growth);
}

double pec_window(double energy_cost, double interest, double t1_years, double t2_years) {
    if (energy_cost < 0.0) throw DomainError("energy cost must be >= 0");
    if (!(interest > 0.0)) throw DomainError("interest rate must be > 0");
    if (!(t1_years >= 0.0) || !(t2_years >= t1_years)) {
        throw RangeError("present-value window [" + std::to_string(t1_years) + ", " +
                         std::to_string(t2_years) + "] yr is invalid");
    }
    const double base = 1.0 + interest;
    return energy_cost / interest * (std::pow(base, -t1_years) - std::pow(base, -t2_years));
}

double loss_factor(double mean_load, double peak_load, double gamma) {
    if (!(peak_load > 0.0)) throw DomainError("peak load must be > 0");
    if (mean_load < 0.0 || mean_load > peak_load) {
        throw DomainError("mean load " + std::to_string(mean_load) +
                          " outside [0, peak] with peak " + std::to_string(peak_load));
    }
    const double m = mean_load / peak_load;
    return gamma * m + (1.0 - gamma) * m * m;
}

double conventional_tco(const TcoParams& p, double peak_norm, double mean_to_peak) {
    validate(p);
    const double capital = p.annualize_capital
                               ? p.capital_cost * capital_recovery_factor(p.interest, p.t_ins_years)
                               : p.capital_cost;
    const double pec = pec_conventional(p.energy_cost, p.interest, p.t_ins_years);
    const double core_factor = p.hours_per_year * pec;
    double load_factor_term = loss_factor(mean_to_peak, 1.0, p.gamma) * pec * peak_norm * peak_norm;
    if (p.load_loss_hours) load_factor_term *= p.hours_per_year;
    return capital + p.core_loss_kw * core_factor + p.load_loss_kw * load_factor_term;
}

namespace {

// Operating (core + load loss) cost over [t1, t2] shared by both TCO forms.
void operating_terms(const TcoParams& p, double t1, double t2, double mean_load, double peak_load,
                     double rated_load, double& core, double& load) {
    if (!(rated_load > 0.0)) throw DomainError("rated load must be > 0");
    const double pec = pec_window(p.energy_cost, p.interest, t1, t2);
    core = p.core_loss_kw * p.hours_per_year * pec;
    const double peak_norm = peak_load / rated_load;
    double b = loss_factor(mean_load, peak_load, p.gamma) * pec * peak_norm * peak_norm;
    if (p.load_loss_hours) b *= p.hours_per_year;
    load = p.load_loss_kw * b;
}

}  // namespace

CostBreakdown windowed_tco_transformer(double loss_of_life, const TcoParams& p, double t1_years,
                                       double t2_years, double mean_load, double peak_load,
                                       double rated_load) {
    if (loss_of_life < 0.0) throw DomainError("loss of life must be >= 0");
    CostBreakdown out;
    out.t1_years = t1_years;
    out.t2_years = t2_years;
    out.capital = loss_of_life * p.capital_cost;
    operating_terms(p, t1_years, t2_years, mean_load, peak_load, rated_load, out.core, out.load);
    out.total = out.capital + out.core + out.load;
    return out;
}

double vr_tco(double loss_of_life, double vr_capital_cost) {
    if (loss_of_life < 0.0) throw DomainError("loss of life must be >= 0");
    if (vr_capital_cost < 0.0) throw DomainError("capital cost must be >= 0");
    return loss_of_life * vr_capital_cost;
}

CostBreakdown long_term_cost_with_replacement(double annual_loss_of_life, const TcoParams& p,
                                              double horizon_years, double mean_load,
                                              double peak_load, double rated_load) {
    if (annual_loss_of_life < 0.0) throw DomainError("annual loss of life must be >= 0");
    if (!(horizon_years > 0.0)) throw DomainError("horizon must be > 0");
    CostBreakdown out;
    out.t1_years = 0.0;
    out.t2_years = horizon_years;
    const double consumed = annual_loss_of_life * horizon_years;
    out.capital = consumed * p.capital_cost;
    operating_terms(p, 0.0, horizon_years, mean_load, peak_load, rated_load, out.core, out.load);
    out.total = out.capital + out.core + out.load;
    // Replacements happen when cumulative loss-of-life crosses a whole unit
    // strictly before the horizon; a unit worn out exactly at the horizon is
    // not replaced within it.
    const double crossings = std::ceil(consumed - 1e-9) - 1.0;
    out.replacements = crossings > 0.0 ? static_cast<int>(crossings) : 0;
    return out;
}

std::vector<TcoCurvePoint> long_term_cost_curve(double annual_loss_of_life, const TcoParams& p,
                                                int horizon_years, double mean_load,
                                                double peak_load, double rated_load) {
    if (annual_loss_of_life < 0.0) throw DomainError("annual loss of life must be >= 0");
    if (horizon_years <= 0) throw DomainError("horizon must be > 0");
    const double annual_capital =
        p.capital_cost * capital_recovery_factor(p.interest, p.t_ins_years);
    std::vector<TcoCurvePoint> curve;
    curve.reserve(static_cast<std::size_t>(horizon_years));
    for (int year = 1; year <= horizon_years; ++year) {
        const double t = static_cast<double>(year);
        double core = 0.0, load = 0.0;
        operating_terms(p, 0.0, t, mean_load, peak_load, rated_load, core, load);
        const double operating = core + load;
        // Present value of the fixed annual capital charge paid through year t.
        const double annuity = (1.0 - std::pow(1.0 + p.interest, -t)) / p.interest;
        curve.push_back({t, annual_loss_of_life * t * p.capital_cost + operating,
                         annual_capital * annuity + operating});
    }
    return curve;
}

}  // namespace gridsim::tco
