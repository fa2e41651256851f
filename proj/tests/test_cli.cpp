#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "zice/app/commands.hpp"
#include "zice/app/config.hpp"
#include "zice/app/csv.hpp"
#include "zice/errors.hpp"

using namespace zice;
using namespace zice::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("zice-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json minimal() {
    return json::parse(R"({
        "system": {"gamma": 1, "omega_level": 100},
        "train": {"mode": "continuous", "amplitude": 5},
        "trace": {"t_max": 1, "samples": 11}
    })");
}

std::string config_error(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ZICE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("every shipped preset parses") {
    const auto names = preset_names();
    CHECK(names.size() == 12);
    for (const auto& name : names) {
        CAPTURE(name);
        const RunConfig config = parse_config(load_preset(name));
        CHECK(config.name == name);
        CHECK(config.regime.has_value());
    }
    CHECK_THROWS_AS(load_preset("fig9"), ConfigError);
}

TEST_CASE("preset values come from the figure captions") {
    const auto pm2 = parse_config(load_preset("fig2a-pm2"));
    CHECK(pm2.train->amplitude() == 5.0);
    CHECK(pm2.train->duty() == doctest::Approx(0.4));
    CHECK(pm2.train->tau_on() == 0.1);
    CHECK(*pm2.regime == RegimeKind::Resonance);
    const auto fig3 = parse_config(load_preset("fig3c"));
    CHECK(fig3.train->amplitude() == 16.0);
    CHECK(fig3.system->detuning() == 50.0);
    CHECK(*fig3.regime == RegimeKind::LargeDetuning);
    CHECK(fig3.sweep->t_eval == 20.0);
    CHECK(parse_config(load_preset("fig2b")).train->amplitude() == 3.0);
    CHECK(parse_config(load_preset("fig3b")).sweep->plot == SweepPlot::Sigma);
}

TEST_CASE("unknown keys and bad values name the field") {
    json doc = minimal();
    doc["trace"]["tmax"] = 3;
    CHECK(config_error(doc).find("trace.tmax") != std::string::npos);

    doc = minimal();
    doc["colour"] = "red";
    CHECK(config_error(doc).find("colour") != std::string::npos);

    doc = minimal();
    doc["system"]["gamma"] = "fast";
    CHECK(config_error(doc).find("system.gamma") != std::string::npos);

    doc = minimal();
    doc["system"].erase("omega_level");
    CHECK(config_error(doc).find("system.omega_level") != std::string::npos);

    doc = minimal();
    doc["train"] = json::parse(R"({"amplitude": 5, "tau_on": 0.1})");
    CHECK(config_error(doc).find("duty or period") != std::string::npos);

    doc = minimal();
    doc["regime"] = "detuning";
    CHECK(config_error(doc).find("regime") != std::string::npos);

    doc = minimal();
    doc["system"]["omega_drive"] = 110;
    doc["train"]["amplitude"] = 16;
    CHECK(config_error(doc).find("regime") != std::string::npos);

    doc = minimal();
    doc["output"] = json::parse(R"({"formats": ["png"]})");
    CHECK(config_error(doc).find("png") != std::string::npos);

    CHECK(config_error(json::parse(R"({"train": {"amplitude": 1}})")).find("system") != std::string::npos);
}

TEST_CASE("rates and times are normalized to gamma = 1") {
    json doc = minimal();
    doc["system"]["gamma"] = 2.0;
    doc["train"] = json::parse(R"({"amplitude": 10, "tau_on": 0.01, "duty": 0.5})");
    doc["trace"]["t_max"] = 3.0;
    doc["sweep"] = json::parse(R"({"d_axis": [0.5], "tau_axis": [0.01, 0.02], "t_eval": 10, "eps_z": 0.1})");
    const RunConfig c = parse_config(doc);
    CHECK(c.system->gamma() == 1.0);
    CHECK(c.system->omega_level() == 50.0);
    CHECK(c.train->amplitude() == 5.0);
    CHECK(c.train->tau_on() == doctest::Approx(0.02));
    CHECK(c.trace->t_max == 6.0);
    CHECK(c.sweep->t_eval == 20.0);
    CHECK(c.sweep->tau_axis[1] == doctest::Approx(0.04));
    CHECK(*c.sweep->eps_z == doctest::Approx(0.05));
    // pulse count covers the trace horizon
    CHECK(c.train->pulse_start(c.train->count() - 1) >= 6.0);
}

TEST_CASE("CSV values round-trip exactly") {
    const double values[] = {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0, 1e-320,
                             std::nextafter(1.0, 2.0)};
    CsvTable table{{"x"}, {}};
    for (double v : values) table.add_row({format_double(v)});
    const CsvTable back = parse_csv(to_csv(table));
    const auto parsed = back.numbers("x");
    REQUIRE(parsed.size() == std::size(values));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(std::memcmp(&parsed[i], &values[i], sizeof(double)) == 0);
    }
    CHECK_THROWS_AS(table.add_row({"1", "2"}), ConfigError);
}

TEST_CASE("trace of the continuous resonance preset") {
    RunConfig c = parse_config(load_preset("fig2a-cm"));
    const CsvTable t = trace_table(c);
    CHECK(t.header == std::vector<std::string>{"t", "Re1", "Sigma1", "Re0", "Sigma0"});
    const auto re1 = t.numbers("Re1");
    CHECK(re1.front() == 1.0);
    CHECK(re1.back() == doctest::Approx(0.0099).epsilon(0.01));
    for (double s : t.numbers("Sigma1")) CHECK(s == 0.0);
    for (double r : t.numbers("Re0")) CHECK(r == 0.0);

    c.trace->t_max = 0.0;
    const CsvTable empty = trace_table(c);
    CHECK(empty.rows.empty());
    CHECK(to_csv(empty) == "t,Re1,Sigma1,Re0,Sigma0\n");
}

TEST_CASE("sweep table layout") {
    json doc = load_preset("fig2c");
    doc["sweep"]["d_axis"] = json::array({0.5});
    doc["sweep"]["tau_axis"] = json::array({0.05});
    const SweepGrid g = compute_sweep(parse_config(doc));
    const CsvTable t = sweep_table(g);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.header == std::vector<std::string>{"D", "tau_on", "Re1", "Sigma1", "region"});
    CHECK(t.rows[0][0] == "0.5");
    CHECK(t.rows[0][4] == to_string(g.region[0]));
}

TEST_CASE("sweep CSV is identical across thread counts") {
    json doc = load_preset("fig3c");
    doc["sweep"]["d_axis"] = json::parse(R"({"min": 0.3, "max": 1.0, "count": 5})");
    doc["sweep"]["tau_axis"] = json::parse(R"({"min": 0.01, "max": 0.2, "count": 7})");
    doc["threads"] = 1;
    const std::string one = to_csv(sweep_table(compute_sweep(parse_config(doc))));
    doc["threads"] = 6;
    const std::string six = to_csv(sweep_table(compute_sweep(parse_config(doc))));
    CHECK(one == six);
}

TEST_CASE("baseline table") {
    json doc = json::parse(R"({"baseline": {"h": [[0, 1], [1, 0]], "tau": 0.01, "n": [1, 100]}})");
    const CsvTable t = baseline_table(parse_config(doc));
    CHECK(t.header == std::vector<std::string>{"N", "tau", "p"});
    const auto p = t.numbers("p");
    CHECK(p[0] == doctest::Approx(std::pow(std::cos(0.01), 2)).epsilon(1e-14));
    CHECK(std::abs(p[1] - 0.990049) < 1e-6);

    doc = json::parse(R"({"baseline": {"h": [[[0, -0.5], 0], [0, 0]], "t_total": 1, "n": [1, 3, 50]}})");
    for (double v : baseline_table(parse_config(doc)).numbers("p")) {
        CHECK(v == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
}

TEST_CASE("validate suite: presets pass, corruption fails, empty suite refused") {
    for (const char* name : {"fig2a-cm", "fig2a-pm1", "fig3a-cm", "fig3c"}) {
        CAPTURE(name);
        const auto report = validate_suite(parse_config(load_preset(name)));
        CHECK(report.cases.size() > 100);
        CHECK(report.failures() == 0);
    }
    json doc = load_preset("fig2a-cm");
    doc["validate"] = json::parse(R"({"inject_kernel_scale": 1.000001, "random_cases": 10})");
    RunConfig bad = parse_config(doc);
    bad.output.formats.clear();
    CHECK(run_validate(bad).exit_code == kExitNumerical);

    doc = json::parse(R"({"validate": {"random_cases": 0}})");
    CHECK_THROWS_AS(validate_suite(parse_config(doc)), ConfigError);
}

TEST_CASE("second-order check runs for short resonant pulses") {
    json doc = load_preset("fig2a-pm1");
    doc["train"]["tau_on"] = 0.002;
    doc["validate"] = json::parse(R"({"random_cases": 0})");
    const auto report = validate_suite(parse_config(doc));
    CHECK(report.skipped.empty());
    std::size_t second = 0;
    for (const auto& c : report.cases) second += c.kind == "second_order";
    CHECK(second == 3);
    CHECK(report.failures() == 0);
}

TEST_CASE("run_* writes the requested formats") {
    const fs::path dir = scratch("formats");
    json doc = load_preset("fig2a-pm1");
    doc["trace"]["t_max"] = 1.0;
    doc["trace"]["samples"] = 101;
    doc["output"] = {{"path", dir.string()}, {"formats", {"csv", "json", "svg"}}};
    const auto outcome = run_trace(parse_config(doc));
    CHECK(outcome.files.size() == 3);
    for (const auto& f : outcome.files) CHECK(fs::file_size(f) > 0);
    const json written = json::parse(slurp(dir / "fig2a-pm1-trace.json"));
    CHECK(written["columns"]["t"].size() == 101);
    CHECK(slurp(dir / "fig2a-pm1-trace.svg").find("<polyline") != std::string::npos);
}

TEST_CASE("unwritable output raises IoError") {
    const fs::path dir = scratch("io");
    std::ofstream(dir / "blocker") << "x";
    CHECK_THROWS_AS(write_text(dir / "blocker" / "sub" / "a.csv", "x"), IoError);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("exit");
    const std::string out = " --out " + (dir / "o").string();
    CHECK(run_cli("trace --preset fig2a-pm1" + out) == 0);
    CHECK(fs::exists(dir / "o" / "fig2a-pm1-trace.csv"));
    CHECK(run_cli("trace --preset nonesuch" + out) == 1);
    CHECK(run_cli("launch --preset fig2a-cm" + out) == 1);
    CHECK(run_cli("trace" + out) == 1);
    CHECK(run_cli("trace --preset fig2a-cm --config " + (dir / "missing.json").string() + out) == 3);

    std::ofstream(dir / "bad.json") << R"({"validate": {"inject_kernel_scale": 2, "random_cases": 4}})";
    CHECK(run_cli("validate --preset fig2a-cm --config " + (dir / "bad.json").string() + out) == 2);

    std::ofstream(dir / "blocker") << "x";
    CHECK(run_cli("trace --preset fig2a-cm --out " + (dir / "blocker" / "sub").string()) == 3);

    std::ofstream(dir / "base.json") << R"({"baseline": {"h": [[0, 1], [1, 0]], "tau": 0.01, "n": [100]}})";
    CHECK(run_cli("baseline --config " + (dir / "base.json").string() + out) == 0);
    const CsvTable t = parse_csv(slurp(dir / "o" / "run-baseline.csv"));
    CHECK(std::abs(t.numbers("p")[0] - std::pow(std::cos(0.01), 200)) < 1e-12);
}
