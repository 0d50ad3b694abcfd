#include "lcadc/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <variant>

namespace lcadc {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const AdcConfig& c) {
    return Json{{"delta", c.delta},
                {"levels", c.levels},
                {"v_min", c.v_min},
                {"input_limit", c.input_limit()},
                {"clock_freq", c.clock_freq},
                {"clock_phase", c.clock_phase},
                {"settle_time", c.settle_time}};
}

Json to_json(const SignalSpec& spec) {
    Json j{{"type", kind_name(spec)}};
    if (const auto* s = std::get_if<Sine>(&spec)) {
        j["amplitude"] = s->amplitude;
        j["frequency"] = s->frequency;
        j["phase"] = s->phase;
        j["offset"] = s->offset;
    } else if (const auto* c = std::get_if<Constant>(&spec)) {
        j["value"] = c->value;
    } else if (const auto* r = std::get_if<Ramp>(&spec)) {
        j["start"] = r->start;
        j["slope"] = r->slope;
    } else if (const auto* sum = std::get_if<SumOfSines>(&spec)) {
        Json comps = Json::array();
        for (const auto& comp : sum->components) {
            comps.push_back({{"amplitude", comp.amplitude}, {"frequency", comp.frequency}, {"phase", comp.phase}});
        }
        j["components"] = std::move(comps);
        j["offset"] = sum->offset;
    } else if (const auto* smp = std::get_if<Sampled>(&spec)) {
        j["sample_period"] = smp->sample_period;
        j["values"] = smp->values;
    }
    return j;
}

Json to_json(const PowerParams& p) {
    return Json{{"p_on", p.p_on}, {"p_off", p.p_off}, {"e_event", p.e_event}};
}

Json to_json(const RunConfig& c) {
    Json run{{"t_end", optional_number(c.run.t_end)},
             {"periods", c.run.periods},
             {"seed", c.run.seed},
             {"trials", c.run.trials},
             {"format", to_string(c.run.format)}};
    return Json{{"signal", to_json(c.signal)}, {"adc", to_json(c.adc)}, {"power", to_json(c.power)}, {"run", run}};
}

Json to_json(const Trace& trace) {
    Json events = Json::array();
    for (const auto& ev : trace.events) {
        events.push_back({{"t_req", ev.t_req},
                          {"dir", to_string(ev.direction)},
                          {"code_before", ev.code_before},
                          {"code_after", ev.code_after},
                          {"t_ack", ev.t_ack},
                          {"t_on", ev.t_on},
                          {"immediate", ev.immediate}});
    }
    Json saturation = Json::array();
    for (const auto& s : trace.saturation) {
        saturation.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}, {"code", s.code}});
    }
    return Json{{"config", to_json(trace.config)},
                {"initial_code", trace.initial_code},
                {"events", std::move(events)},
                {"saturation", std::move(saturation)},
                {"overload", trace.overload},
                {"first_overload", optional_number(trace.first_overload)},
                {"max_pending_levels", trace.max_pending_levels},
                {"t_end", trace.t_end}};
}

Json to_json(const PowerReport& r) {
    return Json{{"t_total", r.t_total},
                {"t_on", r.t_on},
                {"t_off", r.t_off},
                {"n_cross", r.n_cross},
                {"off_fraction", r.off_fraction},
                {"energy", r.energy},
                {"p_avg", r.p_avg},
                {"p_avg_analytic", optional_number(r.p_avg_analytic)},
                {"reduction", r.reduction}};
}

Json to_json(const OffTimeStats& s) {
    return Json{{"trials", s.trials},
                {"count", s.count},
                {"mean", s.mean},
                {"std", s.std},
                {"t_clk", s.t_clk},
                {"mean_over_t_clk", s.count > 0 ? Json(s.mean / s.t_clk) : Json(nullptr)},
                {"bin_edges", s.bin_edges},
                {"counts", s.counts}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "x,off_fraction_sim,off_fraction_analytic,p_avg_sim,p_avg_analytic,overload\n";
    const double nan = std::nan("");
    for (const auto& r : rows) {
        out << format_number(r.x) << ',' << format_number(r.off_fraction_sim) << ','
            << format_number(r.off_fraction_analytic.value_or(nan)) << ',' << format_number(r.p_avg_sim) << ','
            << format_number(r.p_avg_analytic.value_or(nan)) << ',' << (r.overload ? "true" : "false") << '\n';
    }
}

void write_boundary_csv(std::ostream& out, std::span<const BoundaryCurve> curves) {
    out << "clock_freq,f,a_max\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            out << format_number(c.clock_freq) << ',' << format_number(p.f) << ',' << format_number(p.a_max) << '\n';
        }
    }
}

void write_histogram_csv(std::ostream& out, const OffTimeStats& s) {
    out << "bin_lo,bin_hi,count,fraction\n";
    for (std::size_t b = 0; b < s.counts.size(); ++b) {
        const double fraction = s.count > 0 ? static_cast<double>(s.counts[b]) / static_cast<double>(s.count) : 0.0;
        out << format_number(s.bin_edges[b]) << ',' << format_number(s.bin_edges[b + 1]) << ',' << s.counts[b] << ','
            << format_number(fraction) << '\n';
    }
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace lcadc
