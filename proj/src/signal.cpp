#include "lcadc/signal.hpp"

#include "lcadc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lcadc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sampled_value(const Sampled& s, double t) {
    const double span = s.span();
    if (t > span * (1.0 + 1e-12)) {
        throw std::out_of_range("sampled signal queried at t=" + std::to_string(t) +
                                " beyond its span " + std::to_string(span));
    }
    const double u = t / s.sample_period;
    const auto last_segment = static_cast<double>(s.values.size() - 2);
    const double seg = std::min(std::floor(u), last_segment);
    const auto i = static_cast<std::size_t>(seg);
    const double frac = std::min(u - seg, 1.0);
    return s.values[i] + (s.values[i + 1] - s.values[i]) * frac;
}

class ExitSolver {
public:
    ExitSolver(const SignalSpec& spec, const Band& band)
        : spec_(spec), band_(band), tol_(level_tolerance(band)) {}

    std::optional<Direction> classify(double v) const {
        if (!std::isfinite(v)) {
            throw NumericError("signal evaluated to a non-finite value");
        }
        if (v > band_.hi + tol_) return Direction::Up;
        if (v < band_.lo - tol_) return Direction::Down;
        return std::nullopt;
    }

    std::optional<Direction> classify_at(double t) const { return classify(eval(spec_, t)); }

    // `inside` is known to be inside the band, `outside` beyond it.
    Crossing bisect(double inside, double outside, Direction dir) const {
        while (outside - inside > time_tolerance(outside)) {
            const double mid = inside + 0.5 * (outside - inside);
            if (mid <= inside || mid >= outside) break;
            if (auto d = classify_at(mid)) {
                outside = mid;
                dir = *d;
            } else {
                inside = mid;
            }
        }
        return {outside, dir};
    }

    // Steps over consecutive breakpoints produced by `next`, bisecting the
    // first interval whose right end lies outside the band.
    template <class NextBreak>
    std::optional<Crossing> scan(double t_from, double horizon, NextBreak next) const {
        double a = t_from;
        while (a < horizon) {
            const double b = std::min(next(a), horizon);
            if (auto d = classify_at(b)) return bisect(a, b, *d);
            if (b <= a) throw NumericError("crossing scan failed to advance");
            a = b;
        }
        return std::nullopt;
    }

    const Band& band() const { return band_; }
    double tol() const { return tol_; }

private:
    const SignalSpec& spec_;
    Band band_;
    double tol_;
};

std::optional<Crossing> exit_sine(const ExitSolver& solver, const Sine& s, double t_from,
                                  double horizon) {
    if (s.amplitude == 0.0) return std::nullopt;
    // Breakpoints at the extrema: 2*pi*f*t + phase = pi/2 + k*pi. Between
    // them the sine is monotone, so a single end-point test is exact.
    const double omega = kTwoPi * s.frequency;
    auto next_extremum = [&](double t) {
        const double x = omega * t + s.phase;
        double k = std::floor((x - 0.5 * std::numbers::pi) / std::numbers::pi) + 1.0;
        double e = (0.5 * std::numbers::pi + k * std::numbers::pi - s.phase) / omega;
        while (e <= t) {
            k += 1.0;
            e = (0.5 * std::numbers::pi + k * std::numbers::pi - s.phase) / omega;
        }
        return e;
    };
    return solver.scan(t_from, horizon, next_extremum);
}

std::optional<Crossing> exit_grid(const ExitSolver& solver, const SumOfSines& s, double t_from,
                                  double horizon) {
    const double slope = max_slope(s);
    if (slope == 0.0) return std::nullopt;
    double f_hi = 0.0;
    for (const auto& c : s.components) {
        if (c.amplitude > 0.0) f_hi = std::max(f_hi, c.frequency);
    }
    double pitch = 1.0 / (64.0 * f_hi);
    const double width = solver.band().hi - solver.band().lo;
    if (std::isfinite(width)) pitch = std::min(pitch, 0.25 * width / slope);

    // Grid points are t_from + k * pitch, computed directly to avoid drift.
    auto next = [&](double t) {
        double k = std::floor((t - t_from) / pitch) + 1.0;
        double g = t_from + k * pitch;
        while (g <= t) {
            k += 1.0;
            g = t_from + k * pitch;
        }
        return g;
    };
    return solver.scan(t_from, horizon, next);
}

std::optional<Crossing> exit_ramp(const ExitSolver& solver, const Ramp& r, double t_from,
                                  double horizon) {
    const Band& band = solver.band();
    double t_cross = 0.0;
    Direction dir = Direction::Up;
    if (r.slope > 0.0 && std::isfinite(band.hi)) {
        t_cross = (band.hi - r.start) / r.slope;
    } else if (r.slope < 0.0 && std::isfinite(band.lo)) {
        t_cross = (band.lo - r.start) / r.slope;
        dir = Direction::Down;
    } else {
        return std::nullopt;
    }
    t_cross = std::max(t_cross, t_from);
    if (t_cross > horizon) return std::nullopt;
    return Crossing{t_cross, dir};
}

std::optional<Crossing> exit_sampled(const ExitSolver& solver, const Sampled& s, double t_from,
                                     double horizon) {
    if (horizon > s.span() * (1.0 + 1e-12)) {
        throw std::out_of_range("crossing horizon " + std::to_string(horizon) +
                                " exceeds the sampled span " + std::to_string(s.span()));
    }
    horizon = std::min(horizon, s.span());
    const Band& band = solver.band();
    const double tol = solver.tol();
    auto seg = static_cast<std::size_t>(std::floor(t_from / s.sample_period));
    double a = t_from;
    while (a < horizon) {
        const double b = std::min(static_cast<double>(seg + 1) * s.sample_period, horizon);
        if (b > a) {
            const double va = eval(s, a);
            const double vb = eval(s, b);
            // Linear within the segment: solve for the edge directly.
            if (vb > band.hi + tol) {
                const double t = va >= band.hi ? a : a + (band.hi - va) / (vb - va) * (b - a);
                return Crossing{std::clamp(t, a, b), Direction::Up};
            }
            if (vb < band.lo - tol) {
                const double t = va <= band.lo ? a : a + (band.lo - va) / (vb - va) * (b - a);
                return Crossing{std::clamp(t, a, b), Direction::Down};
            }
        }
        a = std::max(a, b);
        ++seg;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::Up ? "up" : "down"; }

std::string_view kind_name(const SignalSpec& spec) noexcept {
    return std::visit(Overloaded{
                          [](const Sine&) { return std::string_view{"sine"}; },
                          [](const Constant&) { return std::string_view{"constant"}; },
                          [](const Ramp&) { return std::string_view{"ramp"}; },
                          [](const SumOfSines&) { return std::string_view{"sum_of_sines"}; },
                          [](const Sampled&) { return std::string_view{"sampled"}; },
                      },
                      spec);
}

void validate(const SignalSpec& spec) {
    auto check_periodic = [](double amplitude, double frequency) {
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
            throw std::invalid_argument("sine amplitude must be finite and >= 0");
        }
        if (!(frequency > 0.0) || !std::isfinite(frequency)) {
            throw std::invalid_argument("sine frequency must be finite and > 0");
        }
    };
    std::visit(Overloaded{
                   [&](const Sine& s) { check_periodic(s.amplitude, s.frequency); },
                   [](const Constant& c) {
                       if (!std::isfinite(c.value)) throw std::invalid_argument("constant must be finite");
                   },
                   [](const Ramp& r) {
                       if (!std::isfinite(r.start) || !std::isfinite(r.slope)) {
                           throw std::invalid_argument("ramp start and slope must be finite");
                       }
                   },
                   [&](const SumOfSines& s) {
                       if (s.components.empty()) {
                           throw std::invalid_argument("sum of sines needs at least one component");
                       }
                       for (const auto& c : s.components) check_periodic(c.amplitude, c.frequency);
                   },
                   [](const Sampled& s) {
                       if (s.values.size() < 2) {
                           throw std::invalid_argument("sampled signal needs at least 2 points");
                       }
                       if (!(s.sample_period > 0.0) || !std::isfinite(s.sample_period)) {
                           throw std::invalid_argument("sample period must be > 0");
                       }
                   },
               },
               spec);
}

double time_limit(const SignalSpec& spec) noexcept {
    if (const auto* s = std::get_if<Sampled>(&spec)) return s->span();
    return std::numeric_limits<double>::infinity();
}

double eval(const SignalSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("signal evaluated at negative time");
    return std::visit(Overloaded{
                          [t](const Sine& s) {
                              return s.offset + s.amplitude * std::sin(kTwoPi * s.frequency * t + s.phase);
                          },
                          [](const Constant& c) { return c.value; },
                          [t](const Ramp& r) { return r.start + r.slope * t; },
                          [t](const SumOfSines& s) {
                              double v = s.offset;
                              for (const auto& c : s.components) {
                                  v += c.amplitude * std::sin(kTwoPi * c.frequency * t + c.phase);
                              }
                              return v;
                          },
                          [t](const Sampled& s) { return sampled_value(s, t); },
                      },
                      spec);
}

double max_slope(const SignalSpec& spec) noexcept {
    return std::visit(Overloaded{
                          [](const Sine& s) { return kTwoPi * s.frequency * s.amplitude; },
                          [](const Constant&) { return 0.0; },
                          [](const Ramp& r) { return std::abs(r.slope); },
                          [](const SumOfSines& s) {
                              double bound = 0.0;
                              for (const auto& c : s.components) bound += kTwoPi * c.frequency * c.amplitude;
                              return bound;
                          },
                          [](const Sampled& s) {
                              double m = 0.0;
                              for (std::size_t i = 1; i < s.values.size(); ++i) {
                                  m = std::max(m, std::abs(s.values[i] - s.values[i - 1]));
                              }
                              return m / s.sample_period;
                          },
                      },
                      spec);
}

double level_tolerance(const Band& band) noexcept {
    double scale = 0.0;
    if (std::isfinite(band.lo)) scale = std::max(scale, std::abs(band.lo));
    if (std::isfinite(band.hi)) scale = std::max(scale, std::abs(band.hi));
    if (std::isfinite(band.hi - band.lo)) scale = std::max(scale, band.hi - band.lo);
    return 1e-12 * scale;
}

double time_tolerance(double t) noexcept { return std::max(1e-12, 1e-9 * std::abs(t)); }

std::optional<Crossing> first_exit(const SignalSpec& spec, double t_from, const Band& band,
                                   double horizon) {
    if (!(horizon > t_from)) return std::nullopt;
    const ExitSolver solver(spec, band);
    if (auto d = solver.classify_at(t_from)) return Crossing{t_from, *d};
    return std::visit(Overloaded{
                          [&](const Sine& s) { return exit_sine(solver, s, t_from, horizon); },
                          [](const Constant&) { return std::optional<Crossing>{}; },
                          [&](const Ramp& r) { return exit_ramp(solver, r, t_from, horizon); },
                          [&](const SumOfSines& s) { return exit_grid(solver, s, t_from, horizon); },
                          [&](const Sampled& s) { return exit_sampled(solver, s, t_from, horizon); },
                      },
                      spec);
}

std::optional<Crossing> next_window_exit(const SignalSpec& spec, double t_from, double lo,
                                         double hi, double horizon) {
    if (!(lo < hi)) throw std::invalid_argument("window needs lo < hi");
    if (!(horizon > t_from)) throw std::invalid_argument("horizon must lie after t_from");
    const Band band{lo, hi};
    const double v = eval(spec, t_from);
    const double tol = level_tolerance(band);
    if (v > hi + tol || v < lo - tol) {
        throw ContractError("signal value " + std::to_string(v) + " at t=" + std::to_string(t_from) +
                            " is already outside the window [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
    return first_exit(spec, t_from, band, horizon);
}

}  // namespace lcadc
