#pragma once

#include "lcadc/analysis.hpp"
#include "lcadc/config.hpp"
#include "lcadc/lc_core.hpp"
#include "lcadc/power_model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lcadc {

using Json = nlohmann::ordered_json;

Json to_json(const AdcConfig& config);
Json to_json(const SignalSpec& spec);
Json to_json(const PowerParams& params);
Json to_json(const RunConfig& config);
Json to_json(const Trace& trace);
Json to_json(const PowerReport& report);
Json to_json(const OffTimeStats& stats);

/// Shortest decimal text that reads back to the same double; "nan" for
/// NaN.
std::string format_number(double v);

/// Header: x,off_fraction_sim,off_fraction_analytic,p_avg_sim,p_avg_analytic,overload
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
/// Header: clock_freq,f,a_max (one block of rows per curve).
void write_boundary_csv(std::ostream& out, std::span<const BoundaryCurve> curves);
/// Header: bin_lo,bin_hi,count,fraction
void write_histogram_csv(std::ostream& out, const OffTimeStats& stats);

/// Minimal reader for the files above: comma-separated, no quoting.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace lcadc
