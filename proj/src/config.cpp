#include "lcadc/config.hpp"

#include "lcadc/analysis.hpp"
#include "lcadc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lcadc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

class KeyValues {
public:
    KeyValues(std::string_view text, std::string source) : source_(std::move(source)) {
        std::string section;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto eol = text.find('\n', pos);
            std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++line_no;

            if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos) {
                raw = raw.substr(0, hash);
            }
            const std::string_view line = trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) fail("malformed section header", "", line_no);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail("expected 'key = value'", std::string(line), line_no);
            std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) fail("missing key before '='", "", line_no);
            if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
            if (value.empty()) fail("missing value", key, line_no);
            if (const auto it = entries_.find(key); it != entries_.end()) {
                fail("duplicate key (first set on line " + std::to_string(it->second.line) + ")", key, line_no);
            }
            entries_.emplace(key, Entry{std::string(value), line_no, false});
        }
    }

    [[noreturn]] void fail(const std::string& message, const std::string& key, std::size_t line) const {
        std::string what = source_;
        if (line > 0) what += ":" + std::to_string(line);
        what += ": ";
        if (!key.empty()) what += "key '" + key + "': ";
        what += message;
        throw ConfigError(what, key, line);
    }

    const Entry* find(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    const Entry& require(const std::string& key) {
        const Entry* e = find(key);
        if (e == nullptr) fail("missing required key", key, 0);
        return *e;
    }

    double number(const std::string& key, const Entry& e) const {
        try {
            return parse_number(e.value);
        } catch (const std::invalid_argument& ex) {
            fail(ex.what(), key, e.line);
        }
    }

    double number(const std::string& key) { return number(key, require(key)); }

    double number_or(const std::string& key, double fallback) {
        const Entry* e = find(key);
        return e ? number(key, *e) : fallback;
    }

    template <class Int>
    Int integer(const std::string& key, const Entry& e, Int min_value) const {
        const double v = number(key, e);
        if (v != std::floor(v) || v < static_cast<double>(min_value) || v > 9.0e15) {
            fail("expected an integer >= " + std::to_string(min_value), key, e.line);
        }
        return static_cast<Int>(v);
    }

    template <class Int>
    Int integer_or(const std::string& key, Int fallback, Int min_value) {
        const Entry* e = find(key);
        return e ? integer(key, *e, min_value) : fallback;
    }

    std::string string_or(const std::string& key, std::string fallback) {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    std::size_t line_of(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    void reject_unused() const {
        const Entry* first = nullptr;
        std::string first_key;
        for (const auto& [key, e] : entries_) {
            if (!e.used && (first == nullptr || e.line < first->line)) {
                first = &e;
                first_key = key;
            }
        }
        if (first != nullptr) fail("unknown key", first_key, first->line);
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
};

SignalSpec read_signal(KeyValues& kv) {
    const std::string type = kv.require("signal.type").value;
    if (type == "sine") {
        return Sine{kv.number("signal.amplitude"), kv.number("signal.frequency"),
                    kv.number_or("signal.phase", 0.0), kv.number_or("signal.offset", 0.0)};
    }
    if (type == "constant") return Constant{kv.number("signal.value")};
    if (type == "ramp") return Ramp{kv.number("signal.start"), kv.number("signal.slope")};
    if (type == "sum_of_sines") {
        const Entry& e = kv.require("signal.components");
        SumOfSines s;
        s.offset = kv.number_or("signal.offset", 0.0);
        for (const auto item : split(e.value, ',')) {
            const auto fields = split(item, ':');
            if (fields.size() < 2 || fields.size() > 3) {
                kv.fail("expected 'amplitude:frequency[:phase]' items, got '" + std::string(item) + "'",
                        "signal.components", e.line);
            }
            try {
                s.components.push_back({parse_number(fields[0]), parse_number(fields[1]),
                                        fields.size() == 3 ? parse_number(fields[2]) : 0.0});
            } catch (const std::invalid_argument& ex) {
                kv.fail(ex.what(), "signal.components", e.line);
            }
        }
        return s;
    }
    if (type == "sampled") {
        const Entry& e = kv.require("signal.values");
        Sampled s;
        s.sample_period = kv.number("signal.sample_period");
        std::string values = e.value;
        std::replace(values.begin(), values.end(), ',', ' ');
        std::istringstream in(values);
        std::string token;
        try {
            while (in >> token) s.values.push_back(parse_number(token));
        } catch (const std::invalid_argument& ex) {
            kv.fail(ex.what(), "signal.values", e.line);
        }
        return s;
    }
    kv.fail("unknown signal type '" + type + "' (sine, constant, ramp, sum_of_sines, sampled)", "signal.type",
            kv.line_of("signal.type"));
}

}  // namespace

double parse_number(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) {
        throw std::invalid_argument("invalid number '" + std::string(text) + "'");
    }
    const std::string_view suffix(ptr, static_cast<std::size_t>(end - ptr));
    double scale = 1.0;
    if (suffix.empty()) {
    } else if (suffix == "p") {
        scale = 1e-12;
    } else if (suffix == "n") {
        scale = 1e-9;
    } else if (suffix == "u" || suffix == "µ") {
        scale = 1e-6;
    } else if (suffix == "m") {
        scale = 1e-3;
    } else if (suffix == "k") {
        scale = 1e3;
    } else if (suffix == "M") {
        scale = 1e6;
    } else if (suffix == "G") {
        scale = 1e9;
    } else {
        throw std::invalid_argument("unknown suffix '" + std::string(suffix) + "' in '" + std::string(text) + "'");
    }
    if (!std::isfinite(value)) throw std::invalid_argument("number must be finite: '" + std::string(text) + "'");
    return value * scale;
}

RunConfig parse_run_config(std::string_view text, std::string_view source) {
    KeyValues kv(text, std::string(source));
    RunConfig cfg;

    cfg.signal = read_signal(kv);
    try {
        validate(cfg.signal);
    } catch (const std::invalid_argument& ex) {
        kv.fail(ex.what(), "signal.type", kv.line_of("signal.type"));
    }

    cfg.adc.delta = kv.number("adc.delta");
    cfg.adc.levels = kv.integer<int>("adc.levels", kv.require("adc.levels"), 2);
    cfg.adc.v_min = kv.number("adc.v_min");
    const Entry& clock = kv.require("adc.clock_freq");
    if (clock.value == "optimal") {
        const auto* sine = std::get_if<Sine>(&cfg.signal);
        if (sine == nullptr) kv.fail("'optimal' needs a sine signal", "adc.clock_freq", clock.line);
        cfg.adc.clock_freq = optimal_clock(sine->amplitude, sine->frequency, cfg.adc.delta);
    } else {
        cfg.adc.clock_freq = kv.number("adc.clock_freq", clock);
    }
    cfg.adc.clock_phase = kv.number_or("adc.clock_phase", 0.0);
    cfg.adc.settle_time = kv.number_or("adc.settle_time", 0.0);
    try {
        validate(cfg.adc);
    } catch (const ConfigError& ex) {
        kv.fail(ex.what(), ex.key(), kv.line_of(ex.key()));
    }

    cfg.power.p_on = kv.number_or("power.p_on", cfg.power.p_on);
    cfg.power.p_off = kv.number_or("power.p_off", cfg.power.p_off);
    if (const Entry* e = kv.find("power.e_event"); e != nullptr) {
        cfg.power.e_event = e->value == "implied" ? kImpliedEventEnergy : kv.number("power.e_event", *e);
    }
    try {
        validate(cfg.power);
    } catch (const ConfigError& ex) {
        kv.fail(ex.what(), ex.key(), kv.line_of(ex.key()));
    }

    if (const Entry* e = kv.find("run.t_end"); e != nullptr) {
        cfg.run.t_end = kv.number("run.t_end", *e);
        if (!(*cfg.run.t_end > 0.0)) kv.fail("must be > 0", "run.t_end", e->line);
    }
    cfg.run.periods = kv.number_or("run.periods", cfg.run.periods);
    if (!(cfg.run.periods > 0.0)) kv.fail("must be > 0", "run.periods", kv.line_of("run.periods"));
    cfg.run.seed = kv.integer_or<std::uint64_t>("run.seed", 0, 0);
    cfg.run.trials = kv.integer_or<std::size_t>("run.trials", cfg.run.trials, 1);
    cfg.run.threads = kv.integer_or<unsigned>("run.threads", 1, 1);
    cfg.run.out = kv.string_or("run.out", cfg.run.out);
    if (const Entry* e = kv.find("run.format"); e != nullptr) {
        if (e->value == "csv") {
            cfg.run.format = OutputFormat::Csv;
        } else if (e->value == "json") {
            cfg.run.format = OutputFormat::Json;
        } else {
            kv.fail("expected csv or json", "run.format", e->line);
        }
    }

    kv.reject_unused();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.string());
}

double run_span(const RunConfig& config) {
    if (config.run.t_end) return *config.run.t_end;
    if (const auto* s = std::get_if<Sine>(&config.signal)) return config.run.periods / s->frequency;
    if (const auto* s = std::get_if<SumOfSines>(&config.signal)) {
        double f_lo = s->components.front().frequency;
        for (const auto& c : s->components) f_lo = std::min(f_lo, c.frequency);
        return config.run.periods / f_lo;
    }
    if (const auto* s = std::get_if<Sampled>(&config.signal)) return s->span();
    throw ConfigError("run.t_end is required for non-periodic signals", "run.t_end");
}

std::string_view to_string(OutputFormat format) noexcept {
    return format == OutputFormat::Csv ? "csv" : "json";
}

}  // namespace lcadc
