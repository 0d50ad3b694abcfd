#pragma once

#include "lcadc/lc_core.hpp"
#include "lcadc/power_model.hpp"
#include "lcadc/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lcadc {

/// Highest sine frequency the loop still tracks at amplitude A, with a
/// worst-case loop time of two clock periods: delta / (4*pi*t_clk*A).
double max_frequency(double amplitude, double delta, double t_clk);

/// Slowest clock that still tracks a sine of amplitude A at f_in, which
/// maximizes the comparator off time: 4*pi*f_in*A / delta.
double optimal_clock(double amplitude, double f_in, double delta);

/// True when A*f_in <= margin * delta / (4*pi*t_clk).
bool within_tracking_boundary(double amplitude, double f_in, double delta, double t_clk,
                              double margin = 1.0);

struct BoundaryPoint {
    double f = 0.0;
    double a_max = 0.0;
};

struct BoundaryCurve {
    double clock_freq = 0.0;
    double a_limit = 0.0;
    std::vector<BoundaryPoint> points;
};

/// Frequency where the hyperbolic branch meets the input-limit cap.
double knee_frequency(double clock_freq, double delta, double a_limit);

/// a_max(f) = min(a_limit, delta / (4*pi*T*f)) over an ascending grid.
BoundaryCurve boundary_curve(double clock_freq, double delta, double a_limit,
                             std::span<const double> f_grid);

/// Fraction of time the comparators are gated, from the continuous
/// crossing rate and the mean off time: 6*A*f_in*t_clk / delta. Throws
/// ModelDomainError past the tracking boundary.
double off_fraction_analytic(double amplitude, double f_in, double delta, double t_clk);

/// Uniform draw in [0, period) for trial `index` of a run seeded with
/// `seed`. Depends only on (seed, index), never on execution order.
double trial_phase(std::uint64_t seed, std::uint64_t index, double period);

struct OffTimeStats {
    std::size_t trials = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    double t_clk = 0.0;
};

/// Runs `trials` simulations with independently drawn clock phases and
/// pools every event's off duration. The histogram spans
/// [t_clk, 2*t_clk] shifted by the settle time.
OffTimeStats monte_carlo_off_time(const AdcConfig& config, const SignalSpec& spec, double t_end,
                                  std::size_t trials, std::uint64_t seed, unsigned threads = 1,
                                  std::size_t bins = 10);

enum class SweepKind { Clock, Frequency, Amplitude };

std::string_view to_string(SweepKind kind) noexcept;
std::optional<SweepKind> parse_sweep_kind(std::string_view name) noexcept;

struct SweepSetup {
    SweepKind kind = SweepKind::Frequency;
    AdcConfig adc;
    Sine signal;
    PowerParams power;
    /// Span of each run in input periods; ignored when t_end > 0.
    double periods = 200.0;
    double t_end = 0.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct SweepRow {
    double x = 0.0;
    double off_fraction_sim = 0.0;
    std::optional<double> off_fraction_analytic;
    double p_avg_sim = 0.0;
    std::optional<double> p_avg_analytic;
    bool overload = false;
};

/// One simulate + measure per grid value, each with its own seeded clock
/// phase. Rows past the tracking boundary are flagged as overload and carry
/// no analytic values.
std::vector<SweepRow> sweep(const SweepSetup& setup, std::span<const double> grid);

/// `count` points from start to stop, linear or geometric.
std::vector<double> make_grid(double start, double stop, std::size_t count, bool logarithmic);

}  // namespace lcadc
