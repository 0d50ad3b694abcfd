#include "lcadc/analysis.hpp"

#include "lcadc/errors.hpp"
#include "lcadc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace lcadc {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

}  // namespace

double max_frequency(double amplitude, double delta, double t_clk) {
    require_positive(amplitude, "amplitude");
    require_positive(delta, "delta");
    require_positive(t_clk, "t_clk");
    return delta / (kFourPi * t_clk * amplitude);
}

double optimal_clock(double amplitude, double f_in, double delta) {
    require_positive(amplitude, "amplitude");
    require_positive(f_in, "f_in");
    require_positive(delta, "delta");
    return kFourPi * f_in * amplitude / delta;
}

bool within_tracking_boundary(double amplitude, double f_in, double delta, double t_clk,
                              double margin) {
    // Relative slack absorbs rounding for points placed exactly on the boundary.
    return amplitude * f_in <= margin * delta / (kFourPi * t_clk) * (1.0 + 1e-12);
}

double knee_frequency(double clock_freq, double delta, double a_limit) {
    require_positive(clock_freq, "clock_freq");
    return max_frequency(a_limit, delta, 1.0 / clock_freq);
}

BoundaryCurve boundary_curve(double clock_freq, double delta, double a_limit,
                             std::span<const double> f_grid) {
    require_positive(clock_freq, "clock_freq");
    require_positive(delta, "delta");
    require_positive(a_limit, "a_limit");
    BoundaryCurve curve;
    curve.clock_freq = clock_freq;
    curve.a_limit = a_limit;
    curve.points.reserve(f_grid.size());
    const double t_clk = 1.0 / clock_freq;
    double previous = 0.0;
    for (double f : f_grid) {
        require_positive(f, "grid frequency");
        if (f <= previous) throw std::invalid_argument("frequency grid must be strictly ascending");
        previous = f;
        curve.points.push_back({f, std::min(a_limit, delta / (kFourPi * t_clk * f))});
    }
    return curve;
}

double off_fraction_analytic(double amplitude, double f_in, double delta, double t_clk) {
    if (!(amplitude >= 0.0) || !(f_in >= 0.0)) throw std::invalid_argument("A and f_in must be >= 0");
    require_positive(delta, "delta");
    require_positive(t_clk, "t_clk");
    if (!within_tracking_boundary(amplitude, f_in, delta, t_clk)) {
        throw ModelDomainError("A*f_in is past the tracking boundary; the off-time model does not apply");
    }
    return crossing_rate_sine(amplitude, f_in, delta) * mean_off_time(t_clk);
}

double trial_phase(std::uint64_t seed, std::uint64_t index, double period) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    // 53 random mantissa bits; the standard distributions are not portable.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double phase = u * period;
    return phase < period ? phase : std::nextafter(period, 0.0);
}

OffTimeStats monte_carlo_off_time(const AdcConfig& config, const SignalSpec& spec, double t_end,
                                  std::size_t trials, std::uint64_t seed, unsigned threads,
                                  std::size_t bins) {
    if (trials < 1) throw std::invalid_argument("monte carlo needs at least one trial");
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    validate(config);
    const double t_clk = config.clock_period();

    std::vector<std::vector<double>> per_trial(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        AdcConfig trial = config;
        trial.clock_phase = trial_phase(seed, i, t_clk);
        const Trace trace = simulate(trial, spec, t_end);
        auto& out = per_trial[i];
        out.reserve(trace.events.size());
        for (const auto& ev : trace.events) out.push_back(ev.off_duration);
    });

    OffTimeStats stats;
    stats.trials = trials;
    stats.t_clk = t_clk;
    const double lo = t_clk + config.settle_time;
    const double width = t_clk / static_cast<double>(bins);
    stats.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) stats.bin_edges[b] = lo + width * static_cast<double>(b);
    stats.counts.assign(bins, 0);

    double sum = 0.0;
    for (const auto& samples : per_trial) {
        for (double x : samples) {
            sum += x;
            const double pos = std::floor((x - lo) / width);
            const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
            ++stats.counts[b];
        }
        stats.count += samples.size();
    }
    if (stats.count == 0) return stats;
    stats.mean = sum / static_cast<double>(stats.count);
    double sq = 0.0;
    for (const auto& samples : per_trial) {
        for (double x : samples) sq += (x - stats.mean) * (x - stats.mean);
    }
    stats.std = stats.count > 1 ? std::sqrt(sq / static_cast<double>(stats.count - 1)) : 0.0;
    return stats;
}

std::string_view to_string(SweepKind kind) noexcept {
    switch (kind) {
        case SweepKind::Clock: return "clock";
        case SweepKind::Frequency: return "frequency";
        case SweepKind::Amplitude: return "amplitude";
    }
    return "unknown";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name) noexcept {
    if (name == "clock") return SweepKind::Clock;
    if (name == "frequency") return SweepKind::Frequency;
    if (name == "amplitude") return SweepKind::Amplitude;
    return std::nullopt;
}

std::vector<SweepRow> sweep(const SweepSetup& setup, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    validate(setup.power);
    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), setup.threads, [&](std::size_t i) {
        AdcConfig adc = setup.adc;
        Sine signal = setup.signal;
        const double x = grid[i];
        switch (setup.kind) {
            case SweepKind::Clock: adc.clock_freq = x; break;
            case SweepKind::Frequency: signal.frequency = x; break;
            case SweepKind::Amplitude: signal.amplitude = x; break;
        }
        adc.clock_phase = trial_phase(setup.seed, i, adc.clock_period());
        const double t_end = setup.t_end > 0.0 ? setup.t_end : setup.periods / signal.frequency;

        const Trace trace = simulate(adc, signal, t_end);
        const PowerReport report = measure(trace, setup.power);

        SweepRow& row = rows[i];
        row.x = x;
        row.off_fraction_sim = report.off_fraction;
        row.p_avg_sim = report.p_avg;
        const double t_clk = adc.clock_period();
        const bool inside = within_tracking_boundary(signal.amplitude, signal.frequency, adc.delta, t_clk);
        row.overload = trace.overload || !inside;
        if (inside) {
            row.off_fraction_analytic = off_fraction_analytic(signal.amplitude, signal.frequency, adc.delta, t_clk);
            row.p_avg_analytic = analytic_power(
                setup.power, crossing_rate_sine(signal.amplitude, signal.frequency, adc.delta), t_clk);
        }
    });
    return rows;
}

std::vector<double> make_grid(double start, double stop, std::size_t count, bool logarithmic) {
    if (count == 0) throw std::invalid_argument("grid count must be >= 1");
    if (!std::isfinite(start) || !std::isfinite(stop)) throw std::invalid_argument("grid bounds must be finite");
    if (logarithmic && !(start > 0.0 && stop > 0.0)) {
        throw std::invalid_argument("logarithmic grid needs positive bounds");
    }
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = start;
        return grid;
    }
    const double span = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = static_cast<double>(i) / span;
        grid[i] = logarithmic ? start * std::pow(stop / start, u) : start + (stop - start) * u;
    }
    grid.back() = stop;
    return grid;
}

}  // namespace lcadc
