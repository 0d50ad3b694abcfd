#include "lcadc/lc_core.hpp"

#include "lcadc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lcadc {

void validate(const AdcConfig& c) {
    if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw ConfigError("adc.delta must be > 0", "adc.delta");
    if (c.levels < 2) throw ConfigError("adc.levels must be >= 2", "adc.levels");
    if (!std::isfinite(c.v_min)) throw ConfigError("adc.v_min must be finite", "adc.v_min");
    if (!(c.clock_freq > 0.0) || !std::isfinite(c.clock_freq)) {
        throw ConfigError("adc.clock_freq must be > 0", "adc.clock_freq");
    }
    if (!(c.clock_phase >= 0.0) || !(c.clock_phase < c.clock_period())) {
        throw ConfigError("adc.clock_phase must lie in [0, 1/clock_freq)", "adc.clock_phase");
    }
    if (!(c.settle_time >= 0.0) || !std::isfinite(c.settle_time)) {
        throw ConfigError("adc.settle_time must be >= 0", "adc.settle_time");
    }
}

double ack_time(double t_req, double clock_freq, double clock_phase) {
    if (!(t_req >= 0.0)) throw std::invalid_argument("ack_time needs t_req >= 0");
    const double period = 1.0 / clock_freq;
    auto edge = [&](double k) { return clock_phase + k * period; };
    double k = std::max(0.0, std::floor((t_req - clock_phase) / period) + 1.0);
    // Correct the division's rounding so edge(k) is the first edge > t_req.
    while (edge(k) <= t_req) k += 1.0;
    while (k > 0.0 && edge(k - 1.0) > t_req) k -= 1.0;
    return edge(k + 1.0);
}

AdcState initial_state(const AdcConfig& config, const SignalSpec& spec) {
    validate(config);
    const double v = eval(spec, 0.0);
    const Band range{config.v_min, config.input_limit()};
    const double tol = level_tolerance(range);
    if (v < range.lo - tol || v > range.hi + tol) {
        throw ConfigError("input value " + std::to_string(v) + " at t=0 lies outside the conversion range [" +
                          std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
    }
    const double level = std::floor((v - config.v_min) / config.delta);
    const int code = static_cast<int>(std::clamp(level, 0.0, static_cast<double>(config.levels - 1)));
    return AdcState{code, config.window_lo(code), config.window_hi(code), Mode::Tracking, 0.0};
}

namespace {

class LoopEngine {
public:
    LoopEngine(const AdcConfig& config, const SignalSpec& spec, double t_end)
        : config_(config), spec_(spec), t_end_(t_end) {
        state_ = initial_state(config, spec);
        trace_.config = config;
        trace_.initial_code = state_.code;
        trace_.t_end = t_end;
    }

    Trace run() {
        while (state_.now < t_end_) {
            const auto exit = first_exit(spec_, state_.now, window(), t_end_);
            if (!exit) break;
            if (!request(exit->time, exit->direction, false)) break;
        }
        state_.now = t_end_;
        return std::move(trace_);
    }

private:
    Band window() const { return {state_.window_lo, state_.window_hi}; }

    void set_code(int code) {
        state_.code = code;
        state_.window_lo = config_.window_lo(code);
        state_.window_hi = config_.window_hi(code);
    }

    // Handles a REQ and any immediate REQs it chains into. Returns false when
    // the run reached t_end.
    bool request(double t_req, Direction dir, bool immediate) {
        for (;;) {
            const bool at_top = dir == Direction::Up && state_.code == config_.levels - 1;
            const bool at_bottom = dir == Direction::Down && state_.code == 0;
            if (at_top || at_bottom) return saturate(t_req, dir);

            state_.mode = Mode::Converting;
            CrossingEvent ev;
            ev.t_req = t_req;
            ev.direction = dir;
            ev.code_before = state_.code;
            ev.code_after = state_.code + (dir == Direction::Up ? 1 : -1);
            ev.t_ack = ack_time(t_req, config_.clock_freq, config_.clock_phase);
            ev.t_on = ev.t_ack + config_.settle_time;
            ev.off_duration = ev.t_on - ev.t_req;
            ev.immediate = immediate;
            trace_.events.push_back(ev);
            set_code(ev.code_after);

            state_.now = ev.t_on;
            state_.mode = Mode::Tracking;
            if (ev.t_on >= t_end_) return false;

            // Power-up: a pending crossing fires straight away.
            const double v = eval(spec_, ev.t_on);
            const double tol = level_tolerance(window());
            double beyond = 0.0;
            if (v > state_.window_hi + tol) {
                dir = Direction::Up;
                beyond = v - state_.window_hi;
            } else if (v < state_.window_lo - tol) {
                dir = Direction::Down;
                beyond = state_.window_lo - v;
            } else {
                return true;
            }
            note_overload(ev.t_on, beyond);
            t_req = ev.t_on;
            immediate = true;
        }
    }

    void note_overload(double t, double beyond) {
        if (!trace_.overload) {
            trace_.overload = true;
            trace_.first_overload = t;
        }
        const int pending = static_cast<int>(std::ceil(beyond / config_.delta));
        trace_.max_pending_levels = std::max(trace_.max_pending_levels, pending);
    }

    // Comparators stay on with the window pinned until the input comes back.
    bool saturate(double t_start, Direction dir) {
        state_.mode = Mode::Saturated;
        const Band outside = dir == Direction::Up ? Band{state_.window_hi, Band{}.hi}
                                                  : Band{Band{}.lo, state_.window_lo};
        const auto back = first_exit(spec_, t_start, outside, t_end_);
        const double t_back = back ? back->time : t_end_;
        trace_.saturation.push_back({t_start, t_back, state_.code});
        state_.now = t_back;
        state_.mode = Mode::Tracking;
        return back.has_value();
    }

    const AdcConfig& config_;
    const SignalSpec& spec_;
    double t_end_;
    AdcState state_;
    Trace trace_;
};

}  // namespace

Trace simulate(const AdcConfig& config, const SignalSpec& spec, double t_end) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be > 0");
    validate(spec);
    if (t_end > time_limit(spec) * (1.0 + 1e-12)) {
        throw std::out_of_range("t_end exceeds the sampled signal span");
    }
    return LoopEngine(config, spec, t_end).run();
}

double StepWaveform::value_at(double t) const {
    if (points_.empty()) throw std::logic_error("empty step waveform");
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const StepPoint& p) { return x < p.t; });
    if (it == points_.begin()) return points_.front().value;
    return std::prev(it)->value;
}

StepWaveform reconstruct(const Trace& trace, const AdcConfig& config) {
    auto mid = [&](int code) { return config.v_min + (code + 0.5) * config.delta; };
    std::vector<StepPoint> points;
    points.reserve(trace.events.size() + 1);
    points.push_back({0.0, mid(trace.initial_code)});
    for (const auto& ev : trace.events) points.push_back({ev.t_ack, mid(ev.code_after)});
    return StepWaveform(std::move(points));
}

TrackingError tracking_error(const Trace& trace, const SignalSpec& spec, const AdcConfig& config) {
    const StepWaveform recon = reconstruct(trace, config);
    const std::size_t n = std::max<std::size_t>(10001, 20 * trace.events.size() + 1);
    TrackingError out;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = trace.t_end * static_cast<double>(i) / static_cast<double>(n - 1);
        const double err = std::abs(eval(spec, t) - recon.value_at(t));
        out.max_abs = std::max(out.max_abs, err);
        sum_sq += err * err;
    }
    out.rms = std::sqrt(sum_sq / static_cast<double>(n));
    return out;
}

}  // namespace lcadc
