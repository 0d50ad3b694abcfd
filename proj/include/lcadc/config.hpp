#pragma once

#include "lcadc/lc_core.hpp"
#include "lcadc/power_model.hpp"
#include "lcadc/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace lcadc {

enum class OutputFormat { Csv, Json };

struct RunSection {
    std::optional<double> t_end;
    double periods = 200.0;  // run span in input periods when t_end is unset
    std::uint64_t seed = 0;
    std::size_t trials = 20;
    std::string out = "out";
    OutputFormat format = OutputFormat::Csv;
    unsigned threads = 1;
};

/// Everything a CLI command needs, read from a flat `section.key = value`
/// file. `[section]` headers may stand in for the prefix.
///
///     signal.type      = sine          # sine|constant|ramp|sum_of_sines|sampled
///     signal.amplitude = 16
///     signal.frequency = 1k
///     adc.delta        = 1
///     adc.levels       = 32
///     adc.v_min        = -16
///     adc.clock_freq   = optimal       # or a number
///     power.p_on       = 2.6u
///     run.seed         = 42
///
/// Numbers accept the SI suffixes p, n, u, m, k, M, G.
struct RunConfig {
    SignalSpec signal;
    AdcConfig adc;
    PowerParams power;
    RunSection run;
};

/// Parses a decimal number with an optional SI suffix ("2.6u", "201k").
/// Throws std::invalid_argument on malformed input.
double parse_number(std::string_view text);

/// Throws ConfigError naming the offending key and line.
RunConfig parse_run_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Simulated span: run.t_end if given, else run.periods of the slowest
/// periodic component, else the sampled span. Throws ConfigError when no
/// span can be derived.
double run_span(const RunConfig& config);

std::string_view to_string(OutputFormat format) noexcept;

}  // namespace lcadc
