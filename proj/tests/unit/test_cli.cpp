#include "lcadc/cli.hpp"
#include "lcadc/serialize.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace lcadc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("LCADC_TEST_TMP");
    fs::path dir = fs::path(env ? env : fs::temp_directory_path().string()) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kDefault = R"([signal]
type = sine
amplitude = 16
frequency = 1k
[adc]
delta = 1
levels = 32
v_min = -16
clock_freq = optimal
[power]
p_on = 2.6u
p_off = 0.2u
[run]
periods = 50
seed = 42
trials = 4
)";

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path path = dir / "run.cfg";
    std::ofstream(path) << text;
    return path;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json load_json(const fs::path& path) { return Json::parse(slurp(path)); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

}  // namespace

TEST_CASE("simulate writes trace and power reports", "[cli]") {
    const fs::path dir = scratch("simulate");
    const fs::path cfg = write_config(dir, kDefault);
    const Run r = run({"--config", cfg.string(), "--out", (dir / "out").string(), "simulate"});
    REQUIRE(r.code == kExitOk);
    const Json power = load_json(dir / "out" / "power.json");
    CHECK(power["off_fraction"].get<double>() >= 0.44);
    CHECK(power["off_fraction"].get<double>() <= 0.49);
    const Json trace = load_json(dir / "out" / "trace.json");
    CHECK(trace["events"].size() == power["n_cross"].get<std::size_t>());
    CHECK_FALSE(trace["overload"].get<bool>());
    const Json first = trace["events"][0];
    for (const char* key : {"t_req", "dir", "code_before", "code_after", "t_ack", "t_on"}) CHECK(first.contains(key));
}

TEST_CASE("a constant input never turns the comparators off", "[cli]") {
    const fs::path dir = scratch("constant");
    std::string text = replace(kDefault, "type = sine\namplitude = 16\nfrequency = 1k\n", "type = constant\nvalue = 0.3\n");
    text = replace(text, "clock_freq = optimal", "clock_freq = 201k");
    text = replace(text, "periods = 50", "t_end = 10m");
    const fs::path cfg = write_config(dir, text);
    REQUIRE(run({"-c", cfg.string(), "-o", (dir / "out").string(), "simulate"}).code == kExitOk);
    const Json power = load_json(dir / "out" / "power.json");
    CHECK(power["off_fraction"].get<double>() == 0.0);
    CHECK(power["p_avg"].get<double>() == Approx(2.6e-6));
}

TEST_CASE("exit codes", "[cli]") {
    const fs::path dir = scratch("exit_codes");
    const std::string out = (dir / "out").string();

    SECTION("overload only fails under the flag") {
        std::string text = replace(kDefault, "clock_freq = optimal", "clock_freq = 201k");
        text = replace(text, "frequency = 1k", "frequency = 2k");
        const fs::path path = write_config(dir, text);
        const Run plain = run({"-c", path.string(), "-o", out, "simulate"});
        CHECK(plain.code == kExitOk);
        CHECK_THAT(plain.out, Catch::Matchers::ContainsSubstring("overload"));
        CHECK(run({"-c", path.string(), "-o", out, "--fail-on-overload", "simulate"}).code == kExitOverload);
    }
    SECTION("config errors") {
        const fs::path bad = write_config(dir, kDefault + "bogus = 1\n");
        const Run r = run({"-c", bad.string(), "-o", out, "simulate"});
        CHECK(r.code == kExitConfigError);
        CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("run.bogus"));
        CHECK(run({"-c", (dir / "missing.cfg").string(), "simulate"}).code == kExitConfigError);
        CHECK(run({"simulate"}).code == kExitConfigError);
        const fs::path good = write_config(dir, kDefault);
        CHECK(run({"-c", good.string(), "-o", out, "sweep", "voltage", "--grid", "1:2:2"}).code == kExitConfigError);
        CHECK(run({"-c", good.string(), "-o", out, "sweep", "clock", "--grid", "1:2"}).code == kExitConfigError);
        CHECK(run({"-c", good.string(), "-o", out, "--format", "xml", "simulate"}).code == kExitConfigError);
    }
    SECTION("input starting outside the range") {
        const fs::path path = write_config(dir, replace(kDefault, "amplitude = 16\n", "amplitude = 16\noffset = 20\n"));
        CHECK(run({"-c", path.string(), "-o", out, "simulate"}).code == kExitConfigError);
    }
    SECTION("numeric failure") {
        std::string text = replace(kDefault, "type = sine\namplitude = 16\nfrequency = 1k\n",
                                   "type = sum_of_sines\ncomponents = 1e308:1k, 1e308:1k\n");
        text = replace(text, "clock_freq = optimal", "clock_freq = 201k");
        const fs::path path = write_config(dir, text);
        const Run r = run({"-c", path.string(), "-o", out, "simulate"});
        CHECK(r.code == kExitNumericFailure);
    }
    SECTION("help and version") {
        const Run help = run({"--help"});
        CHECK(help.code == kExitOk);
        CHECK_THAT(help.out, Catch::Matchers::ContainsSubstring("montecarlo"));
        const Run version = run({"--version"});
        CHECK(version.code == kExitOk);
        CHECK(version.out == std::string(version_string()) + "\n");
    }
}

TEST_CASE("fixed seed gives byte-identical outputs", "[cli][determinism]") {
    const fs::path dir = scratch("determinism");
    const fs::path cfg = write_config(dir, kDefault);
    for (const char* sub : {"a", "b"}) {
        const std::string out = (dir / sub).string();
        REQUIRE(run({"-c", cfg.string(), "-o", out, "--seed", "7", "simulate"}).code == kExitOk);
        REQUIRE(run({"-c", cfg.string(), "-o", out, "--seed", "7", "sweep", "frequency", "--grid", "100:900:3"}).code ==
                kExitOk);
        REQUIRE(run({"-c", cfg.string(), "-o", out, "--seed", "7", "montecarlo"}).code == kExitOk);
    }
    for (const char* file : {"trace.json", "power.json", "sweep_frequency.csv", "sweep_frequency.meta.json",
                             "montecarlo.csv", "montecarlo.meta.json"}) {
        INFO(file);
        const std::string a = slurp(dir / "a" / file);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b" / file));
    }
    REQUIRE(run({"-c", cfg.string(), "-o", (dir / "c").string(), "--seed", "8", "sweep", "frequency", "--grid",
                 "100:900:3"})
                .code == kExitOk);
    CHECK(slurp(dir / "a" / "sweep_frequency.csv") != slurp(dir / "c" / "sweep_frequency.csv"));
}

TEST_CASE("sweep CSV round-trips", "[cli][sweep]") {
    const fs::path dir = scratch("sweep_csv");
    const fs::path cfg = write_config(dir, kDefault);
    REQUIRE(run({"-c", cfg.string(), "-o", dir.string(), "sweep", "clock", "--grid", "150k:300k:4"}).code == kExitOk);
    std::ifstream in(dir / "sweep_clock.csv");
    const auto table = read_csv(in);
    REQUIRE(table.size() == 5);
    CHECK(table[0] == std::vector<std::string>{"x", "off_fraction_sim", "off_fraction_analytic", "p_avg_sim",
                                               "p_avg_analytic", "overload"});
    const double xs[] = {150e3, 200e3, 250e3, 300e3};
    for (std::size_t i = 1; i < table.size(); ++i) {
        REQUIRE(table[i].size() == 6);
        CHECK(std::abs(std::stod(table[i][0]) - xs[i - 1]) <= 1e-12 * xs[i - 1]);
        const double off = std::stod(table[i][1]);
        CHECK(format_number(off) == table[i][1]);
        CHECK(off >= 0.0);
        CHECK(off < 1.0);
    }
    CHECK(table[1][5] == "true");
    CHECK(table[1][2] == "nan");
    CHECK(table[4][5] == "false");
    CHECK(load_json(dir / "sweep_clock.meta.json")["seed"].get<int>() == 42);

    REQUIRE(run({"-c", cfg.string(), "-o", dir.string(), "sweep", "amplitude", "--grid", "8:8:1"}).code == kExitOk);
    std::ifstream one(dir / "sweep_amplitude.csv");
    CHECK(read_csv(one).size() == 2);

    REQUIRE(run({"-c", cfg.string(), "-o", dir.string(), "--format", "json", "sweep", "frequency", "--grid",
                 "100:1k:3:log"})
                .code == kExitOk);
    const Json j = load_json(dir / "sweep_frequency.json");
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][1]["x"].get<double>() == Approx(std::sqrt(1e5)));
}

TEST_CASE("table1 summarises the operating point", "[cli][table1]") {
    const fs::path dir = scratch("table1");
    const fs::path cfg = write_config(dir, kDefault);
    const Run r = run({"-c", cfg.string(), "-o", dir.string(), "table1"});
    REQUIRE(r.code == kExitOk);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("| P_ADC^ON | 2.60 uW |"));
    CHECK(slurp(dir / "table1.md") == r.out);
    std::ifstream in(dir / "table1.csv");
    const auto rows = read_csv(in);
    REQUIRE(rows.size() == 6);
    CHECK(rows[3][0] == "p_avg");
    CHECK(std::stod(rows[3][1]) == Approx(1.5e-6).margin(0.1e-6));
    CHECK(std::stod(rows[4][1]) == Approx(0.42).margin(0.02));
    CHECK(std::stod(rows[5][1]) == Approx(1000.0).epsilon(1e-12));

    const fs::path same = write_config(dir, replace(kDefault, "p_off = 0.2u", "p_off = 2.6u"));
    REQUIRE(run({"-c", same.string(), "-o", dir.string(), "--format", "json", "table1"}).code == kExitOk);
    const Json j = load_json(dir / "table1.json");
    CHECK(j["table"]["reduction"].get<double>() == Approx(0.0).margin(1e-15));
}

TEST_CASE("boundary lists capped hyperbolas per clock", "[cli][boundary]") {
    const fs::path dir = scratch("boundary");
    const fs::path cfg = write_config(dir, kDefault);
    const Run r = run({"-c", cfg.string(), "-o", dir.string(), "boundary", "--clocks", "50k,201k", "--grid",
                       "10:100k:41:log"});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(dir / "boundary.csv");
    const auto rows = read_csv(in);
    REQUIRE(rows.size() == 1 + 2 * 41);
    CHECK(rows[0] == std::vector<std::string>{"clock_freq", "f", "a_max"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double clock = std::stod(rows[i][0]);
        const double f = std::stod(rows[i][1]);
        const double a = std::stod(rows[i][2]);
        const double knee = clock / (4.0 * 3.141592653589793 * 16.0);
        if (f <= knee) {
            CHECK(a == 16.0);
        } else {
            CHECK(a * f == Approx(clock / (4.0 * 3.141592653589793)).epsilon(1e-12));
        }
    }
    const Json meta = load_json(dir / "boundary.meta.json");
    CHECK(meta["knees"][1]["knee_frequency"].get<double>() == Approx(999.69).epsilon(1e-4));
}
