#include "lcadc/power_model.hpp"

#include "lcadc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lcadc {

void validate(const PowerParams& p) {
    if (!(p.p_off >= 0.0)) throw ConfigError("power.p_off must be >= 0", "power.p_off");
    // p_on == p_off is accepted: it models a converter without gating.
    if (!(p.p_on > 0.0) || !(p.p_on >= p.p_off)) {
        throw ConfigError("power.p_on must be > 0 and >= power.p_off", "power.p_on");
    }
    if (!(p.e_event >= 0.0)) throw ConfigError("power.e_event must be >= 0", "power.e_event");
}

double mean_off_time(double t_clk) noexcept { return 1.5 * t_clk; }

PowerReport measure(const Trace& trace, const PowerParams& params) {
    if (!(trace.t_end > 0.0)) throw std::invalid_argument("trace span must be > 0");
    PowerReport r;
    r.t_total = trace.t_end;
    for (const auto& ev : trace.events) {
        const double start = std::clamp(ev.t_req, 0.0, trace.t_end);
        const double stop = std::clamp(ev.t_on, 0.0, trace.t_end);
        r.t_off += stop - start;
    }
    r.t_on = r.t_total - r.t_off;
    r.n_cross = static_cast<long long>(trace.events.size());
    r.off_fraction = r.t_off / r.t_total;
    r.energy = params.p_on * r.t_on + params.p_off * r.t_off + static_cast<double>(r.n_cross) * params.e_event;
    r.p_avg = r.energy / r.t_total;
    r.reduction = 1.0 - r.p_avg / params.p_on;
    try {
        r.p_avg_analytic = analytic_power(params, static_cast<double>(r.n_cross) / r.t_total,
                                          trace.config.clock_period());
    } catch (const ModelDomainError&) {
        r.p_avg_analytic.reset();
    }
    return r;
}

double analytic_power(const PowerParams& params, double crossing_rate, double t_clk) {
    if (!(crossing_rate >= 0.0) || !(t_clk > 0.0)) {
        throw std::invalid_argument("analytic_power needs rate >= 0 and t_clk > 0");
    }
    const double duty = crossing_rate * mean_off_time(t_clk);
    if (duty > 1.0) {
        throw ModelDomainError("mean off time per unit time " + std::to_string(duty) +
                               " exceeds 1; the operating point is past the tracking boundary");
    }
    return params.p_on * (1.0 - duty) + params.p_off * duty + crossing_rate * params.e_event;
}

double crossing_rate_sine(double amplitude, double frequency, double delta) {
    if (!(amplitude >= 0.0) || !(frequency >= 0.0) || !(delta > 0.0)) {
        throw std::invalid_argument("crossing_rate_sine needs A >= 0, f >= 0, delta > 0");
    }
    return 4.0 * amplitude * frequency / delta;
}

std::optional<double> breakeven_clock(const PowerParams& params, OffTimeBasis basis) {
    if (params.e_event == 0.0) return std::nullopt;
    const double saved_per_period = (params.p_on - params.p_off) / params.e_event;
    return basis == OffTimeBasis::Mean ? 1.5 * saved_per_period : saved_per_period;
}

}  // namespace lcadc
