#include "gridsim/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim::thermal {

namespace {

double oil_target(const TransformerThermalParams& p, double k, double ambient_c) {
    const double load_term = (1.0 + p.loss_ratio * k * k) / (1.0 + p.loss_ratio);
    return ambient_c + p.delta_q_to_rated * std::pow(load_term, p.oil_exponent);
}

double hotspot_rise_target(const TransformerThermalParams& p, double k) {
    return p.delta_q_h_rated * std::pow(k, p.winding_exponent);
}

}  // namespace

void validate(const TransformerThermalParams& p) {
    std::string problems;
    auto flag = [&](bool bad, const char* msg) {
        if (bad) {
            if (!problems.empty()) problems += "; ";
            problems += msg;
        }
    };
    flag(!(p.tau_to > 0.0), "oil time constant must be > 0");
    flag(!(p.tau_h > 0.0), "winding time constant must be > 0");
    flag(!(p.oil_exponent > 0.5 && p.oil_exponent < 2.5), "oil exponent must lie in (0.5, 2.5)");
    flag(!(p.winding_exponent > 0.5 && p.winding_exponent < 2.5),
         "winding exponent must lie in (0.5, 2.5)");
    flag(!(p.t_ins_hours > 0.0), "insulation life must be > 0");
    flag(!(p.beta > 0.0), "aging constant beta must be > 0");
    flag(!(p.delta_q_to_rated >= 0.0), "rated top-oil rise must be >= 0");
    flag(!(p.delta_q_h_rated >= 0.0), "rated hot-spot rise must be >= 0");
    flag(!(p.loss_ratio >= 0.0), "loss ratio must be >= 0");
    if (!problems.empty()) throw DomainError("thermal parameters: " + problems);
}

ThermalState make_steady_state(const TransformerThermalParams& p, double k, double ambient_c) {
    if (k < 0.0) throw DomainError("load factor must be >= 0");
    ThermalState s;
    s.t = 0.0;
    s.q_to = oil_target(p, k, ambient_c);
    s.delta_q_h = hotspot_rise_target(p, k);
    s.q_hst = s.q_to + s.delta_q_h;
    return s;
}

ThermalState step_thermal(const ThermalState& state, double k, double ambient_c, double dt,
                          const TransformerThermalParams& p) {
    if (k < 0.0) throw DomainError("load factor must be >= 0");
    if (!(dt > 0.0)) throw StabilityError("thermal step requires dt > 0");
    if (dt > p.tau_to / 2.0) {
        throw StabilityError("thermal step dt = " + std::to_string(dt) +
                             " h exceeds half the oil time constant");
    }
    ThermalState next;
    next.t = state.t + dt;
    const double oil_gain = -std::expm1(-dt / p.tau_to);
    next.q_to = state.q_to + oil_gain * (oil_target(p, k, ambient_c) - state.q_to);
    const double winding_gain = -std::expm1(-dt / p.tau_h);
    next.delta_q_h = state.delta_q_h + winding_gain * (hotspot_rise_target(p, k) - state.delta_q_h);
    next.q_hst = next.q_to + next.delta_q_h;
    return next;
}

double aging_factor(double q_hst, const TransformerThermalParams& p) {
    const double denom = q_hst + p.omega;
    if (denom <= 0.0) {
        throw DomainError("hot-spot temperature " + std::to_string(q_hst) +
                          " C is at or below absolute zero for the aging law");
    }
    return std::exp(p.alpha - p.beta / denom);
}

double loss_of_life(std::span<const double> faa, double dt, double t_ins_hours, double t1,
                    double t2) {
    if (!(dt > 0.0)) throw RangeError("loss-of-life series resolution must be > 0");
    if (!(t_ins_hours > 0.0)) throw RangeError("insulation life must be > 0");
    if (faa.empty()) throw RangeError("loss-of-life series is empty");
    const double t_end = static_cast<double>(faa.size() - 1) * dt;
    const double slack = 1e-9 * std::max(1.0, t_end);
    if (!(t1 >= -slack) || !(t2 >= t1) || !(t2 <= t_end + slack)) {
        throw RangeError("loss-of-life window [" + std::to_string(t1) + ", " + std::to_string(t2) +
                         "] h outside sampled range [0, " + std::to_string(t_end) + "] h");
    }
    t1 = std::clamp(t1, 0.0, t_end);
    t2 = std::clamp(t2, 0.0, t_end);
    if (t2 <= t1) return 0.0;

    const auto n = faa.size();
    auto value_at = [&](double t) {
        double s = t / dt;
        auto i = static_cast<std::size_t>(s);
        if (i >= n - 1) i = n - 2;
        const double frac = s - static_cast<double>(i);
        return faa[i] + frac * (faa[i + 1] - faa[i]);
    };

    auto first_cell = static_cast<std::size_t>(t1 / dt);
    if (first_cell >= n - 1) first_cell = n - 2;
    double integral = 0.0;
    for (std::size_t i = first_cell; i < n - 1; ++i) {
        const double a = std::max(t1, static_cast<double>(i) * dt);
        if (a >= t2) break;
        const double b = std::min(t2, static_cast<double>(i + 1) * dt);
        if (b > a) integral += (b - a) * 0.5 * (value_at(a) + value_at(b));
    }
    return integral / t_ins_hours;
}

LifetimeEstimate transformer_lifetime(double daily_loss, double t_ins_hours) {
    if (daily_loss < 0.0) throw DomainError("daily loss of life must be >= 0");
    if (!(t_ins_hours > 0.0)) throw DomainError("insulation life must be > 0");
    if (daily_loss == 0.0) {
        return {t_ins_hours / 8760.0, true};
    }
    return {1.0 / (365.0 * daily_loss), false};
}

}  // namespace gridsim::thermal
