#include "zice/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "zice/errors.hpp"

namespace zice::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field + ": " + message);
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

const json& require_object(const json& node, const std::string& field) {
    if (!node.is_object()) {
        fail(field, "expected an object");
    }
    return node;
}

void reject_unknown(const json& node, const std::string& field,
                    std::initializer_list<const char*> allowed) {
    for (const auto& item : node.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* key) { return item.key() == key; });
        if (!known) {
            fail(join(field, item.key()), "unknown key");
        }
    }
}

double to_number(const json& node, const std::string& field) {
    if (!node.is_number()) {
        fail(field, "expected a number");
    }
    const double value = node.get<double>();
    if (!std::isfinite(value)) {
        fail(field, "must be finite");
    }
    return value;
}

double number(const json& node, const std::string& parent, const char* key) {
    if (!node.contains(key)) {
        fail(join(parent, key), "required");
    }
    return to_number(node.at(key), join(parent, key));
}

double number_or(const json& node, const std::string& parent, const char* key, double fallback) {
    return node.contains(key) ? to_number(node.at(key), join(parent, key)) : fallback;
}

double positive(const json& node, const std::string& parent, const char* key) {
    const double value = number(node, parent, key);
    if (!(value > 0.0)) {
        fail(join(parent, key), "must be positive");
    }
    return value;
}

std::size_t count_or(const json& node, const std::string& parent, const char* key,
                     std::size_t fallback) {
    if (!node.contains(key)) {
        return fallback;
    }
    const json& value = node.at(key);
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        fail(join(parent, key), "expected a non-negative integer");
    }
    return value.get<std::size_t>();
}

bool flag_or(const json& node, const std::string& parent, const char* key, bool fallback) {
    if (!node.contains(key)) {
        return fallback;
    }
    if (!node.at(key).is_boolean()) {
        fail(join(parent, key), "expected true or false");
    }
    return node.at(key).get<bool>();
}

std::string text_or(const json& node, const std::string& parent, const char* key,
                    const std::string& fallback) {
    if (!node.contains(key)) {
        return fallback;
    }
    if (!node.at(key).is_string()) {
        fail(join(parent, key), "expected a string");
    }
    return node.at(key).get<std::string>();
}

complex to_complex(const json& node, const std::string& field) {
    if (node.is_number()) {
        return {to_number(node, field), 0.0};
    }
    if (node.is_array() && node.size() == 2) {
        return {to_number(node[0], field + "[0]"), to_number(node[1], field + "[1]")};
    }
    fail(field, "expected a number or [re, im]");
}

/// Either an explicit array or {"min", "max", "count"}.
std::vector<double> axis(const json& node, const std::string& field) {
    std::vector<double> values;
    if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) {
            values.push_back(to_number(node[i], field + "[" + std::to_string(i) + "]"));
        }
    } else if (node.is_object()) {
        reject_unknown(node, field, {"min", "max", "count"});
        const double lo = number(node, field, "min");
        const double hi = number(node, field, "max");
        const std::size_t n = count_or(node, field, "count", 0);
        if (n == 0) {
            fail(join(field, "count"), "must be >= 1");
        }
        if (n > 1 && !(hi > lo)) {
            fail(join(field, "max"), "must exceed min");
        }
        values = linspace(lo, n == 1 ? lo : hi, n);
    } else {
        fail(field, "expected an array or {min, max, count}");
    }
    if (values.empty()) {
        fail(field, "must not be empty");
    }
    return values;
}

SystemParams parse_system(const json& node) {
    const std::string field = "system";
    require_object(node, field);
    reject_unknown(node, field, {"gamma", "omega_level", "omega_drive", "occupancy", "temperature"});
    if (node.contains("occupancy") && node.contains("temperature")) {
        fail(field, "give occupancy or temperature, not both");
    }
    const double gamma = positive(node, field, "gamma");
    const double omega_level = positive(node, field, "omega_level");
    const double omega_drive = number_or(node, field, "omega_drive", omega_level);
    double occupancy = number_or(node, field, "occupancy", 0.0);
    if (node.contains("temperature")) {
        const double temperature = number(node, field, "temperature");
        if (temperature < 0.0) {
            fail(join(field, "temperature"), "must be >= 0");
        }
        occupancy = bose_einstein_occupancy(omega_level, temperature);
    }
    if (occupancy < 0.0) {
        fail(join(field, "occupancy"), "must be >= 0");
    }
    return SystemParams(gamma, omega_level, omega_drive, occupancy);
}

/// Pulse count left open in the config: enough pulses to cover `horizon`.
PulseTrain parse_train(const json& node, double horizon) {
    const std::string field = "train";
    require_object(node, field);
    const std::string mode = text_or(node, field, "mode", "pulsed");
    const double amplitude = number(node, field, "amplitude");
    if (amplitude < 0.0) {
        fail(join(field, "amplitude"), "must be >= 0");
    }
    const double start = number_or(node, field, "start", 0.0);
    if (mode == "continuous") {
        reject_unknown(node, field, {"mode", "amplitude", "start"});
        return PulseTrain::continuous(amplitude, start);
    }
    if (mode != "pulsed") {
        fail(join(field, "mode"), "expected \"pulsed\" or \"continuous\"");
    }
    reject_unknown(node, field, {"mode", "amplitude", "start", "tau_on", "duty", "period", "count"});
    const double tau_on = positive(node, field, "tau_on");
    if (node.contains("duty") == node.contains("period")) {
        fail(field, "give exactly one of duty or period");
    }
    double period = 0.0;
    if (node.contains("duty")) {
        const double duty = number(node, field, "duty");
        if (!(duty > 0.0 && duty <= 1.0)) {
            fail(join(field, "duty"), "must be in (0, 1]");
        }
        period = tau_on / duty;
    } else {
        period = number(node, field, "period");
        if (!(period >= tau_on)) {
            fail(join(field, "period"), "must be >= tau_on");
        }
    }
    std::size_t count = count_or(node, field, "count", 0);
    if (node.contains("count") && count == 0) {
        fail(join(field, "count"), "must be >= 1");
    }
    if (count == 0) {
        const double needed = std::ceil(std::max(horizon - start, 0.0) / period) + 1.0;
        if (needed > 1e8) {
            fail(join(field, "count"), "horizon needs more than 1e8 pulses; give count");
        }
        count = static_cast<std::size_t>(needed);
    }
    return PulseTrain::pulsed(amplitude, tau_on, period, count, start);
}

TraceBlock parse_trace(const json& node) {
    const std::string field = "trace";
    require_object(node, field);
    reject_unknown(node, field, {"t_max", "samples"});
    TraceBlock block;
    block.t_max = number_or(node, field, "t_max", block.t_max);
    block.samples = count_or(node, field, "samples", block.samples);
    if (block.t_max < 0.0) {
        fail(join(field, "t_max"), "must be >= 0");
    }
    if (block.t_max > 0.0 && block.samples < 2) {
        fail(join(field, "samples"), "must be >= 2");
    }
    return block;
}

SweepBlock parse_sweep(const json& node) {
    const std::string field = "sweep";
    require_object(node, field);
    reject_unknown(node, field, {"d_axis", "tau_axis", "t_eval", "phase", "eps_z", "plot"});
    SweepBlock block;
    if (!node.contains("d_axis")) {
        fail(join(field, "d_axis"), "required");
    }
    if (!node.contains("tau_axis")) {
        fail(join(field, "tau_axis"), "required");
    }
    block.d_axis = axis(node.at("d_axis"), join(field, "d_axis"));
    block.tau_axis = axis(node.at("tau_axis"), join(field, "tau_axis"));
    for (double d : block.d_axis) {
        if (!(d > 0.0 && d <= 1.0)) {
            fail(join(field, "d_axis"), "values must lie in (0, 1]");
        }
    }
    for (double tau : block.tau_axis) {
        if (!(tau > 0.0)) {
            fail(join(field, "tau_axis"), "values must be positive");
        }
    }
    block.t_eval = number_or(node, field, "t_eval", block.t_eval);
    if (!(block.t_eval > 0.0)) {
        fail(join(field, "t_eval"), "must be positive");
    }
    const std::string phase = text_or(node, field, "phase", "in_window");
    if (phase == "in_window") {
        block.phase = SamplePhase::InWindow;
    } else if (phase == "average") {
        block.phase = SamplePhase::Average;
    } else {
        fail(join(field, "phase"), "expected \"in_window\" or \"average\"");
    }
    if (node.contains("eps_z")) {
        block.eps_z = number(node, field, "eps_z");
        if (*block.eps_z < 0.0) {
            fail(join(field, "eps_z"), "must be >= 0");
        }
    }
    const std::string plot = text_or(node, field, "plot", "rate");
    if (plot == "rate") {
        block.plot = SweepPlot::Rate;
    } else if (plot == "sigma") {
        block.plot = SweepPlot::Sigma;
    } else {
        fail(join(field, "plot"), "expected \"rate\" or \"sigma\"");
    }
    return block;
}

EvolveBlock parse_evolve(const json& node) {
    const std::string field = "evolve";
    require_object(node, field);
    reject_unknown(node, field,
                   {"initial", "t_end", "dt", "ice", "offdiag", "allow_norm_growth", "stride"});
    EvolveBlock block;
    if (node.contains("initial")) {
        const std::string sub = join(field, "initial");
        const json& initial = require_object(node.at("initial"), sub);
        reject_unknown(initial, sub, {"c0", "c1"});
        block.initial.c0 = initial.contains("c0") ? to_complex(initial.at("c0"), join(sub, "c0"))
                                                  : complex{0.0, 0.0};
        block.initial.c1 = initial.contains("c1") ? to_complex(initial.at("c1"), join(sub, "c1"))
                                                  : complex{0.0, 0.0};
        if (std::abs(block.initial.norm() - 1.0) > 1e-12) {
            fail(sub, "state must be normalized");
        }
    }
    block.t_end = number_or(node, field, "t_end", block.t_end);
    if (block.t_end < 0.0) {
        fail(join(field, "t_end"), "must be >= 0");
    }
    block.dt = number_or(node, field, "dt", block.dt);
    if (!(block.dt > 0.0)) {
        fail(join(field, "dt"), "must be positive");
    }
    block.options.ice = flag_or(node, field, "ice", true);
    block.options.include_offdiag = flag_or(node, field, "offdiag", false);
    block.options.allow_norm_growth = flag_or(node, field, "allow_norm_growth", false);
    block.stride = count_or(node, field, "stride", 1);
    if (block.stride == 0) {
        fail(join(field, "stride"), "must be >= 1");
    }
    return block;
}

ValidateBlock parse_validate(const json& node) {
    const std::string field = "validate";
    require_object(node, field);
    reject_unknown(node, field,
                   {"rel_tol", "abs_tol", "max_depth", "random_cases", "seed", "kernel_tolerance",
                    "taus", "include_configured", "second_order", "second_order_tolerance",
                    "inject_kernel_scale"});
    ValidateBlock block;
    block.quadrature.rel_tol = number_or(node, field, "rel_tol", block.quadrature.rel_tol);
    block.quadrature.abs_tol = number_or(node, field, "abs_tol", block.quadrature.abs_tol);
    block.quadrature.max_depth =
        static_cast<int>(count_or(node, field, "max_depth", block.quadrature.max_depth));
    try {
        block.quadrature.validate();
    } catch (const ConfigError& e) {
        fail(field, e.what());
    }
    block.random_cases = count_or(node, field, "random_cases", block.random_cases);
    block.seed = count_or(node, field, "seed", block.seed);
    block.kernel_tolerance = number_or(node, field, "kernel_tolerance", block.kernel_tolerance);
    if (!(block.kernel_tolerance > 0.0)) {
        fail(join(field, "kernel_tolerance"), "must be positive");
    }
    if (node.contains("taus")) {
        block.taus = axis(node.at("taus"), join(field, "taus"));
        for (double tau : block.taus) {
            if (tau < 0.0) {
                fail(join(field, "taus"), "values must be >= 0");
            }
        }
    }
    block.include_configured = flag_or(node, field, "include_configured", true);
    block.second_order = flag_or(node, field, "second_order", true);
    block.second_order_tolerance =
        number_or(node, field, "second_order_tolerance", block.second_order_tolerance);
    if (!(block.second_order_tolerance > 0.0)) {
        fail(join(field, "second_order_tolerance"), "must be positive");
    }
    block.inject_kernel_scale =
        number_or(node, field, "inject_kernel_scale", block.inject_kernel_scale);
    return block;
}

BaselineBlock parse_baseline(const json& node) {
    const std::string field = "baseline";
    require_object(node, field);
    reject_unknown(node, field, {"h", "psi0", "tau", "t_total", "n"});
    if (node.contains("tau") && node.contains("t_total")) {
        fail(field, "give tau or t_total, not both");
    }
    BaselineBlock block;
    const std::string hfield = join(field, "h");
    if (!node.contains("h")) {
        fail(hfield, "required");
    }
    const json& h = node.at("h");
    if (!h.is_array() || h.size() != 2) {
        fail(hfield, "expected a 2x2 array");
    }
    for (std::size_t r = 0; r < 2; ++r) {
        if (!h[r].is_array() || h[r].size() != 2) {
            fail(hfield, "expected a 2x2 array");
        }
        for (std::size_t c = 0; c < 2; ++c) {
            block.hamiltonian[r][c] = to_complex(
                h[r][c], hfield + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    if (node.contains("psi0")) {
        const std::string pfield = join(field, "psi0");
        const json& psi = node.at("psi0");
        if (!psi.is_array() || psi.size() != 2) {
            fail(pfield, "expected two amplitudes");
        }
        block.psi0 = {to_complex(psi[0], pfield + "[0]"), to_complex(psi[1], pfield + "[1]")};
        if (std::abs(std::norm(block.psi0[0]) + std::norm(block.psi0[1]) - 1.0) > 1e-12) {
            fail(pfield, "state must be normalized");
        }
    }
    block.tau = number_or(node, field, "tau", block.tau);
    if (block.tau < 0.0) {
        fail(join(field, "tau"), "must be >= 0");
    }
    if (node.contains("t_total")) {
        block.total_time = number(node, field, "t_total");
        if (*block.total_time < 0.0) {
            fail(join(field, "t_total"), "must be >= 0");
        }
    }
    if (node.contains("n")) {
        const std::string nfield = join(field, "n");
        const json& counts = node.at("n");
        if (!counts.is_array() || counts.empty()) {
            fail(nfield, "expected a non-empty array of integers");
        }
        block.counts.clear();
        for (const json& n : counts) {
            if (!n.is_number_integer() || n.get<long long>() < (block.total_time ? 1 : 0)) {
                fail(nfield, block.total_time ? "entries must be positive integers"
                                              : "entries must be non-negative integers");
            }
            block.counts.push_back(n.get<long>());
        }
    }
    return block;
}

OutputBlock parse_output(const json& node) {
    const std::string field = "output";
    require_object(node, field);
    reject_unknown(node, field, {"path", "formats"});
    OutputBlock block;
    block.path = text_or(node, field, "path", block.path.string());
    if (node.contains("formats")) {
        const json& formats = node.at("formats");
        if (!formats.is_array()) {
            fail(join(field, "formats"), "expected an array");
        }
        block.formats.clear();
        for (const json& f : formats) {
            if (!f.is_string()) {
                fail(join(field, "formats"), "entries must be strings");
            }
            const std::string name = f.get<std::string>();
            if (name != "csv" && name != "json" && name != "svg") {
                fail(join(field, "formats"), "unknown format \"" + name + "\"");
            }
            block.formats.push_back(name);
        }
    }
    return block;
}

RegimeKind resolve_regime(const std::string& choice, const SystemParams& system,
                          const PulseTrain& train) {
    const Regime found = classify_regime(system, train);
    if (choice == "auto") {
        if (found.kind == RegimeKind::Unsupported) {
            fail("regime", found.diagnostic);
        }
        return found.kind;
    }
    if (choice == "resonance") {
        if (found.kind != RegimeKind::Resonance) {
            fail("regime", "resonance requires omega_drive == omega_level");
        }
        return found.kind;
    }
    if (choice == "detuning") {
        if (found.kind != RegimeKind::LargeDetuning) {
            fail("regime", found.kind == RegimeKind::Resonance ? "system is on resonance"
                                                               : found.diagnostic);
        }
        return found.kind;
    }
    fail("regime", "expected \"auto\", \"resonance\" or \"detuning\"");
}

} // namespace

Command parse_command(const std::string& name) {
    if (name == "trace") return Command::Trace;
    if (name == "sweep") return Command::Sweep;
    if (name == "evolve") return Command::Evolve;
    if (name == "validate") return Command::Validate;
    if (name == "baseline") return Command::Baseline;
    throw ConfigError("unknown command \"" + name + "\"");
}

std::string to_string(Command command) {
    switch (command) {
    case Command::Trace: return "trace";
    case Command::Sweep: return "sweep";
    case Command::Evolve: return "evolve";
    case Command::Validate: return "validate";
    case Command::Baseline: return "baseline";
    }
    return "?";
}

bool OutputBlock::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(const json& doc) {
    require_object(doc, "config");
    reject_unknown(doc, "", {"name", "system", "train", "regime", "trace", "sweep", "evolve",
                             "validate", "baseline", "output", "threads"});
    RunConfig config;
    config.name = text_or(doc, "", "name", config.name);

    if (doc.contains("trace")) config.trace = parse_trace(doc.at("trace"));
    if (doc.contains("sweep")) config.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("evolve")) config.evolve = parse_evolve(doc.at("evolve"));
    if (doc.contains("validate")) config.validate = parse_validate(doc.at("validate"));
    if (doc.contains("baseline")) config.baseline = parse_baseline(doc.at("baseline"));
    if (doc.contains("output")) config.output = parse_output(doc.at("output"));
    if (doc.contains("threads")) {
        const std::size_t threads = count_or(doc, "", "threads", 1);
        if (threads == 0 || threads > 1024) {
            fail("threads", "must be in [1, 1024]");
        }
        config.threads = static_cast<unsigned>(threads);
    }

    if (doc.contains("train") && !doc.contains("system")) {
        fail("system", "required when train is given");
    }
    if (doc.contains("system")) {
        const SystemParams raw = parse_system(doc.at("system"));
        const double gamma = raw.gamma();
        config.system = raw.normalized();
        if (config.trace) config.trace->t_max *= gamma;
        if (config.evolve) {
            config.evolve->t_end *= gamma;
            config.evolve->dt *= gamma;
        }
        if (config.sweep) {
            config.sweep->t_eval *= gamma;
            for (double& tau : config.sweep->tau_axis) tau *= gamma;
            if (config.sweep->eps_z) *config.sweep->eps_z /= gamma;
        }
        if (config.validate) {
            for (double& tau : config.validate->taus) tau *= gamma;
        }
        if (doc.contains("train")) {
            double horizon = 0.0;
            if (config.trace) horizon = std::max(horizon, config.trace->t_max / gamma);
            if (config.evolve) horizon = std::max(horizon, config.evolve->t_end / gamma);
            config.train = parse_train(doc.at("train"), horizon).normalized(gamma);
            const std::string choice = text_or(doc, "", "regime", "auto");
            config.regime = resolve_regime(choice, *config.system, *config.train);
        }
    }
    if (doc.contains("regime") && !config.regime) {
        fail("regime", "needs both system and train");
    }
    return config;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    try {
        return json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::filesystem::path preset_directory() {
    if (const char* env = std::getenv("ZICE_PRESET_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ZICE_PRESET_DIR;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec)) {
        if (entry.path().extension() == ".json") {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

json load_preset(const std::string& name) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::ostringstream msg;
        msg << "unknown preset \"" << name << "\"";
        if (!names.empty()) {
            msg << " (available:";
            for (const auto& n : names) msg << ' ' << n;
            msg << ')';
        }
        throw ConfigError(msg.str());
    }
    return load_json(preset_directory() / (name + ".json"));
}

} // namespace zice::app
