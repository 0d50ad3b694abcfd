#pragma once

#include "lcadc/lc_core.hpp"

#include <optional>

namespace lcadc {

/// Converter power figures. Defaults are the measured 180 nm values:
/// 2.6 uW with comparators on, 0.2 uW of leakage while gated.
struct PowerParams {
    double p_on = 2.6e-6;
    double p_off = 0.2e-6;
    double e_event = 0.0;  // lumped gate-off/gate-on/REQ energy per event, J
};

/// Per-event overhead at which gating stops paying off at 201 kHz under
/// the mean-off-time rule: 3 * 2.4 uW / (2 * 201 kHz).
inline constexpr double kImpliedEventEnergy = 17.91e-12;

void validate(const PowerParams& params);

struct PowerReport {
    double t_total = 0.0;
    double t_on = 0.0;
    double t_off = 0.0;
    long long n_cross = 0;
    double off_fraction = 0.0;
    double energy = 0.0;
    double p_avg = 0.0;
    /// Closed-form average power at the trace's own crossing rate; empty
    /// when the rate is outside the model's validity region.
    std::optional<double> p_avg_analytic;
    double reduction = 0.0;
};

/// Mean comparator off time per event, 3 * t_clk / 2.
double mean_off_time(double t_clk) noexcept;

/// Energy bookkeeping over a simulated trace.
PowerReport measure(const Trace& trace, const PowerParams& params);

/// p_on * (1 - r*t) + p_off * r*t + r * e_event with t = 3 * t_clk / 2.
/// Throws ModelDomainError when r*t > 1.
double analytic_power(const PowerParams& params, double crossing_rate, double t_clk);

/// Continuous approximation 4*A*f/delta of the level-crossing rate of a
/// sine. The exact count depends on where the levels fall relative to the
/// peaks.
double crossing_rate_sine(double amplitude, double frequency, double delta);

enum class OffTimeBasis {
    Mean,     // average off time, 3T/2
    Minimum,  // guaranteed off time, T
};

/// Clock frequency above which the per-event overhead outweighs the energy
/// saved while gated. Empty when e_event == 0 (gating always saves).
std::optional<double> breakeven_clock(const PowerParams& params,
                                      OffTimeBasis basis = OffTimeBasis::Mean);

}  // namespace lcadc
