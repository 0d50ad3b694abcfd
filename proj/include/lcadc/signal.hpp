#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace lcadc {

enum class Direction { Up, Down };

std::string_view to_string(Direction d) noexcept;

/// offset + amplitude * sin(2*pi*frequency*t + phase). Amplitude is peak.
struct Sine {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    double offset = 0.0;
};

struct Constant {
    double value = 0.0;
};

struct Ramp {
    double start = 0.0;
    double slope = 0.0;
};

struct SineComponent {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

struct SumOfSines {
    std::vector<SineComponent> components;
    double offset = 0.0;
};

/// Uniformly sampled waveform, linearly interpolated. Sample i sits at
/// t = i * sample_period.
struct Sampled {
    double sample_period = 0.0;
    std::vector<double> values;

    double span() const noexcept {
        return values.empty() ? 0.0 : sample_period * static_cast<double>(values.size() - 1);
    }
};

using SignalSpec = std::variant<Sine, Constant, Ramp, SumOfSines, Sampled>;

std::string_view kind_name(const SignalSpec& spec) noexcept;

/// Throws std::invalid_argument when the spec breaks its invariants.
void validate(const SignalSpec& spec);

/// Largest time at which the signal can be evaluated (infinity except for
/// Sampled).
double time_limit(const SignalSpec& spec) noexcept;

/// Exact waveform value. Throws std::out_of_range for a Sampled query
/// outside the sampled span, std::invalid_argument for t < 0.
double eval(const SignalSpec& spec, double t);

/// Upper bound on |dv/dt|. Tight for Sine, Ramp, Sampled and Constant.
double max_slope(const SignalSpec& spec) noexcept;

struct Crossing {
    double time = 0.0;
    Direction direction = Direction::Up;
};

/// Voltage band used by the crossing solver. Either side may be infinite.
struct Band {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Absolute voltage tolerance used to decide whether a value lies beyond
/// a band edge. Touching an edge within this tolerance is not a crossing.
double level_tolerance(const Band& band) noexcept;

/// Time resolution of the bisection near time t.
double time_tolerance(double t) noexcept;

/// Earliest t in (t_from, horizon] at which the signal leaves `band`
/// (rises above hi or falls below lo by more than level_tolerance).
/// Does not check where the signal starts; see next_window_exit.
std::optional<Crossing> first_exit(const SignalSpec& spec, double t_from, const Band& band,
                                   double horizon);

/// Window exit for a signal that starts inside [lo, hi]. Throws
/// ContractError when the signal is already outside the window at t_from,
/// std::invalid_argument when lo >= hi or horizon <= t_from.
std::optional<Crossing> next_window_exit(const SignalSpec& spec, double t_from, double lo,
                                         double hi, double horizon);

}  // namespace lcadc
