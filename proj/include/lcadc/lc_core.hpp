#pragma once

#include "lcadc/signal.hpp"

#include <optional>
#include <vector>

namespace lcadc {

/// Behavioral parameters of the level-crossing converter.
///
/// The conversion range is [v_min, v_min + levels * delta]; the window of
/// code c is [v_min + c*delta, v_min + (c+1)*delta]. Defaults describe the
/// 5-bit normalized converter (delta = 1 V, 32 levels, centered on 0 V)
/// clocked at 201 kHz.
struct AdcConfig {
    double delta = 1.0;
    int levels = 32;
    double v_min = -16.0;
    double clock_freq = 201e3;
    double clock_phase = 0.0;  // first rising edge, in [0, 1/clock_freq)
    double settle_time = 0.0;  // ACK to comparators active

    double clock_period() const noexcept { return 1.0 / clock_freq; }
    double input_limit() const noexcept { return v_min + levels * delta; }
    /// Peak amplitude of a sine that spans the whole range about mid-scale.
    double full_scale_amplitude() const noexcept { return 0.5 * levels * delta; }
    double mid_range() const noexcept { return v_min + 0.5 * levels * delta; }
    double window_lo(int code) const noexcept { return v_min + code * delta; }
    double window_hi(int code) const noexcept { return v_min + (code + 1) * delta; }
};

/// Throws ConfigError when the configuration breaks its invariants.
void validate(const AdcConfig& config);

enum class Mode { Tracking, Converting, Saturated };

struct AdcState {
    int code = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    Mode mode = Mode::Tracking;
    double now = 0.0;
};

struct CrossingEvent {
    double t_req = 0.0;
    Direction direction = Direction::Up;
    int code_before = 0;
    int code_after = 0;
    double t_ack = 0.0;
    double t_on = 0.0;
    double off_duration = 0.0;  // t_on - t_req
    bool immediate = false;     // raised at power-up, input already outside
};

/// Time spent pinned at code 0 or levels-1 with the input beyond the range.
struct SaturationInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    int code = 0;
};

struct Trace {
    AdcConfig config;
    int initial_code = 0;
    std::vector<CrossingEvent> events;
    std::vector<SaturationInterval> saturation;
    /// Set when the input at power-up had already left the updated window,
    /// i.e. it crossed another level while the comparators were gated.
    bool overload = false;
    std::optional<double> first_overload;
    /// Largest number of levels the input was beyond the updated window at
    /// any power-up (0 when tracking never fell behind).
    int max_pending_levels = 0;
    double t_end = 0.0;
};

/// Second rising clock edge strictly after t_req. Edges sit at
/// clock_phase + k / clock_freq for k = 0, 1, 2, ...
double ack_time(double t_req, double clock_freq, double clock_phase);

/// Throws ConfigError when the input at t = 0 is outside the conversion
/// range.
AdcState initial_state(const AdcConfig& config, const SignalSpec& spec);

/// Runs the event-driven converter loop on [0, t_end]. Throws
/// std::invalid_argument for t_end <= 0 and ConfigError for an invalid
/// configuration or an input that starts out of range.
Trace simulate(const AdcConfig& config, const SignalSpec& spec, double t_end);

struct StepPoint {
    double t = 0.0;
    double value = 0.0;
};

/// Piecewise-constant reconstruction; each point holds its value until the
/// next point's time.
class StepWaveform {
public:
    explicit StepWaveform(std::vector<StepPoint> points) : points_(std::move(points)) {}

    const std::vector<StepPoint>& points() const noexcept { return points_; }
    double value_at(double t) const;

private:
    std::vector<StepPoint> points_;
};

/// Mid-level reconstruction v_min + (code + 0.5) * delta, switching at each
/// event's ACK time.
StepWaveform reconstruct(const Trace& trace, const AdcConfig& config);

struct TrackingError {
    double max_abs = 0.0;
    double rms = 0.0;
};

/// Compares the reconstruction with the input on a uniform grid of at
/// least 10^4 points over [0, trace.t_end].
TrackingError tracking_error(const Trace& trace, const SignalSpec& spec, const AdcConfig& config);

}  // namespace lcadc
