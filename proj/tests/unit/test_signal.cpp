#include "lcadc/errors.hpp"
#include "lcadc/signal.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace lcadc;
using Catch::Approx;

namespace {

// First grid time at which v leaves [lo, hi] strictly; brute force.
std::optional<double> scan_exit(const SignalSpec& spec, double t0, double lo, double hi, double t1, double step) {
    const auto n = static_cast<long>(std::ceil((t1 - t0) / step));
    for (long i = 1; i <= n; ++i) {
        const double t = t0 + static_cast<double>(i) * step;
        const double v = eval(spec, t);
        if (v > hi || v < lo) return t;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("eval matches closed forms", "[signal]") {
    CHECK(eval(Sine{1.0, 1.0, 0.0, 0.0}, 0.25) == Approx(1.0).margin(1e-15));
    CHECK(eval(Constant{0.5}, 123.0) == 0.5);
    CHECK(eval(Ramp{0.0, 2.0}, 0.75) == 1.5);
    CHECK(eval(Sine{2.0, 10.0, 0.0, 3.0}, 0.0) == 3.0);

    const SumOfSines sum{{{1.0, 1.0, 0.0}, {0.5, 2.0, std::numbers::pi / 2}}, 1.0};
    CHECK(eval(sum, 0.0) == Approx(1.5));

    const Sampled samples{0.5, {0.0, 1.0, -1.0}};
    CHECK(eval(samples, 0.25) == Approx(0.5));
    CHECK(eval(samples, 0.75) == Approx(0.0));
    CHECK(eval(samples, 1.0) == Approx(-1.0));
}

TEST_CASE("eval rejects out-of-span sampled queries", "[signal][errors]") {
    const Sampled samples{1.0, {0.0, 3.0, 1.0}};
    CHECK_THROWS_AS(eval(samples, 2.5), std::out_of_range);
    CHECK_THROWS_AS(eval(Constant{1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("validate enforces signal invariants", "[signal][errors]") {
    CHECK_NOTHROW(validate(Sine{0.0, 1.0, 0.0, 0.0}));
    CHECK_THROWS_AS(validate(Sine{-1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Sine{1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SumOfSines{}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Sampled{1.0, {1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Sampled{0.0, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("max_slope bounds", "[signal]") {
    CHECK(max_slope(Sine{16.0, 1000.0, 0.0, 0.0}) == Approx(2.0 * std::numbers::pi * 16000.0));
    CHECK(max_slope(Sine{16.0, 1000.0, 0.0, 0.0}) == Approx(100530.96).epsilon(1e-7));
    CHECK(max_slope(Constant{4.0}) == 0.0);
    CHECK(max_slope(Sampled{1.0, {0.0, 3.0, 1.0}}) == 3.0);
    CHECK(max_slope(Ramp{1.0, -2.5}) == 2.5);
    CHECK(max_slope(SumOfSines{{{1.0, 1.0, 0.0}, {2.0, 3.0, 0.0}}, 0.0}) == Approx(2.0 * std::numbers::pi * 7.0));
}

TEST_CASE("next_window_exit on the documented examples", "[signal]") {
    SECTION("ramp crosses the top edge") {
        const auto c = next_window_exit(Ramp{0.0, 1.0}, 0.0, -0.5, 1.0, 10.0);
        REQUIRE(c);
        CHECK(c->time == Approx(1.0));
        CHECK(c->direction == Direction::Up);
    }
    SECTION("constant never exits") {
        CHECK_FALSE(next_window_exit(Constant{0.0}, 0.0, -1.0, 1.0, 1e6));
    }
    SECTION("sine reaches 0.5 at t = 1/12") {
        const Sine s{1.0, 1.0, 0.0, 0.0};
        const auto brute = scan_exit(s, 0.0, -0.5, 0.5, 1.0, 1e-7);
        REQUIRE(brute);
        CHECK(*brute == Approx(1.0 / 12.0).margin(2e-7));

        const auto c = next_window_exit(s, 0.0, -0.5, 0.5, 1.0);
        REQUIRE(c);
        CHECK(c->direction == Direction::Up);
        CHECK(c->time == Approx(*brute).margin(2e-7));
        CHECK(c->time == Approx(0.0833333333).margin(1e-9));
    }
    SECTION("exit beyond the horizon is empty") {
        CHECK_FALSE(next_window_exit(Ramp{0.0, 1.0}, 0.0, -0.5, 1.0, 0.9));
    }
}

TEST_CASE("next_window_exit contract errors are distinct from no-exit", "[signal][errors]") {
    CHECK_THROWS_AS(next_window_exit(Constant{2.0}, 0.0, -1.0, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(next_window_exit(Constant{0.0}, 0.0, 1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(next_window_exit(Constant{0.0}, 1.0, -1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(next_window_exit(Sampled{1.0, {0.0, 0.1}}, 0.0, -1.0, 1.0, 5.0), std::out_of_range);
}

TEST_CASE("sampled signals solve crossings per segment", "[signal]") {
    const Sampled s{1.0, {0.0, 3.0, 1.0}};
    const auto up = next_window_exit(s, 0.0, -1.0, 2.0, 2.0);
    REQUIRE(up);
    CHECK(up->time == Approx(2.0 / 3.0));
    CHECK(up->direction == Direction::Up);

    const auto down = next_window_exit(s, 1.0, 1.5, 3.0, 2.0);
    REQUIRE(down);
    CHECK(down->time == Approx(1.75));
    CHECK(down->direction == Direction::Down);

    // Touching the edge at a vertex and turning back is not a crossing.
    const Sampled touch{1.0, {0.0, 2.0, 0.0}};
    CHECK_FALSE(next_window_exit(touch, 0.0, -1.0, 2.0, 2.0));
}

TEST_CASE("grazing a window edge is not a crossing", "[signal][tangency]") {
    // Peak of the sine sits exactly on hi; the first real exit is through lo.
    const Sine s{1.0, 1.0, 0.0, 0.0};
    const auto c = next_window_exit(s, 0.0, -0.5, 1.0, 3.0);
    REQUIRE(c);
    CHECK(c->direction == Direction::Down);
    CHECK(c->time == Approx(7.0 / 12.0).margin(1e-9));
    const auto brute = scan_exit(s, 0.0, -0.5, 1.0, 3.0, 1e-6);
    REQUIRE(brute);
    CHECK(c->time == Approx(*brute).margin(2e-6));

    // Over several periods the solver and a grid scan both see no upward
    // traversal of the peak level.
    CHECK_FALSE(first_exit(s, 0.0, Band{-2.0, 1.0}, 5.0));
    CHECK_FALSE(scan_exit(s, 0.0, -2.0, 1.0, 5.0, 1e-5));
}

TEST_CASE("sum of sines agrees with a brute-force scan", "[signal]") {
    const SumOfSines s{{{1.0, 50.0, 0.3}, {0.4, 170.0, 1.1}}, 0.0};
    const double v0 = eval(s, 0.0);
    const auto c = next_window_exit(s, 0.0, v0 - 0.3, v0 + 0.3, 0.1);
    const auto brute = scan_exit(s, 0.0, v0 - 0.3, v0 + 0.3, 0.1, 1e-8);
    REQUIRE(c);
    REQUIRE(brute);
    CHECK(c->time == Approx(*brute).margin(2e-8));
}

TEST_CASE("exit times sit on the boundary and are preceded by inside values", "[signal][property]") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const Sine s{0.5 + 4.0 * u(rng), 10.0 + 990.0 * u(rng), 2.0 * std::numbers::pi * u(rng), 4.0 * u(rng) - 2.0};
        const double t0 = u(rng) / s.frequency;
        const double v0 = eval(s, t0);
        const double lo = v0 - 0.05 - u(rng);
        const double hi = v0 + 0.05 + u(rng);
        const auto c = next_window_exit(s, t0, lo, hi, t0 + 5.0 / s.frequency);
        if (!c) {
            // Only possible when the sine fits inside the window.
            CHECK(s.offset + s.amplitude <= hi + 1e-9);
            CHECK(s.offset - s.amplitude >= lo - 1e-9);
            continue;
        }
        const double edge = c->direction == Direction::Up ? hi : lo;
        const double slope_tol = max_slope(s) * time_tolerance(c->time) + level_tolerance({lo, hi});
        CHECK(std::abs(eval(s, c->time) - edge) <= slope_tol);
        const double before = eval(s, c->time - 4.0 * time_tolerance(c->time));
        CHECK(before <= hi + level_tolerance({lo, hi}));
        CHECK(before >= lo - level_tolerance({lo, hi}));
    }
}

TEST_CASE("shrinking the window never delays the exit", "[signal][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const Sine s{1.0 + 3.0 * u(rng), 1.0 + 100.0 * u(rng), 2.0 * std::numbers::pi * u(rng), 0.0};
        const double v0 = eval(s, 0.0);
        const double lo = v0 - 0.1 - 2.0 * u(rng);
        const double hi = v0 + 0.1 + 2.0 * u(rng);
        const double shrink_lo = lo + (v0 - lo) * u(rng);
        const double shrink_hi = hi - (hi - v0) * u(rng);
        const double horizon = 3.0 / s.frequency;
        const auto wide = next_window_exit(s, 0.0, lo, hi, horizon);
        const auto narrow = next_window_exit(s, 0.0, shrink_lo, shrink_hi, horizon);
        if (wide) {
            REQUIRE(narrow);
            CHECK(narrow->time <= wide->time + time_tolerance(wide->time));
        }
    }
}
