#include "zice/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "zice/app/svg.hpp"
#include "zice/dynamics.hpp"
#include "zice/errors.hpp"
#include "zice/kernels.hpp"
#include "zice/oracle.hpp"

namespace zice::app {

using nlohmann::json;

namespace {

/// lambda tau_on above which the second-order comparison is not meaningful.
constexpr double kSecondOrderMaxPhase = 0.02;

template <class T>
const T& require(const std::optional<T>& block, const char* name, Command command) {
    if (!block) {
        throw ConfigError(std::string(name) + ": block required for the " + to_string(command) +
                          " command");
    }
    return *block;
}

RegimeKind require_regime(const RunConfig& config, Command command) {
    require(config.system, "system", command);
    require(config.train, "train", command);
    return *config.regime;
}

std::filesystem::path output_file(const RunConfig& config, const std::string& suffix) {
    return config.output.path / (config.name + "-" + suffix);
}

json table_json(const CsvTable& table) {
    json columns = json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        json values = json::array();
        for (const auto& row : table.rows) {
            const std::string& field = row[c];
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() && *end == '\0') {
                values.push_back(v);
            } else {
                values.push_back(field);
            }
        }
        columns[table.header[c]] = std::move(values);
    }
    return columns;
}

/// Writes the CSV/JSON forms requested in the output block.
void emit_table(CommandOutcome& outcome, const RunConfig& config, const std::string& kind,
                const CsvTable& table, json extra = json::object()) {
    if (config.output.wants("csv")) {
        const auto path = output_file(config, kind + ".csv");
        write_text(path, to_csv(table));
        outcome.files.push_back(path);
    }
    if (config.output.wants("json")) {
        json doc = {{"name", config.name}, {"kind", kind}, {"columns", table_json(table)}};
        for (auto& item : extra.items()) {
            doc[item.key()] = item.value();
        }
        const auto path = output_file(config, kind + ".json");
        write_text(path, doc.dump(1) + "\n");
        outcome.files.push_back(path);
    }
}

void emit_svg(CommandOutcome& outcome, const RunConfig& config, const std::string& kind,
              const std::string& svg) {
    if (config.output.wants("svg")) {
        const auto path = output_file(config, kind + ".svg");
        write_text(path, svg);
        outcome.files.push_back(path);
    }
}

Series horizontal(const std::string& label, double x0, double x1, double y, const char* color) {
    return {label, {x0, x1}, {y, y}, color, true};
}

std::string system_caption(const RunConfig& config) {
    std::ostringstream s;
    s << config.name << ": lambda = " << config.train->amplitude();
    if (config.system->detuning() != 0.0) {
        s << ", detuning = " << config.system->detuning();
    }
    if (!config.train->is_continuous()) {
        s << ", D = " << config.train->duty() << ", tau_on = " << config.train->tau_on();
    }
    return s.str();
}

void add_case(ValidationReport& report, ValidationCase c, double scale) {
    c.closed *= scale;
    c.rel_err = relative_error(c.closed, c.oracle);
    report.cases.push_back(std::move(c));
}

void resonance_cases(ValidationReport& report, const std::string& source, Level j, double amplitude,
                     double gamma_j, double tau, const ValidateBlock& spec) {
    const ResummedBrackets b = quad_resummed(tau, amplitude, gamma_j, spec.quadrature);
    ValidationCase base{"", source, j, amplitude, gamma_j, 0.0, tau, {}, {}, 0.0,
                        spec.kernel_tolerance};
    ValidationCase d = base;
    d.kind = "kd";
    d.closed = kd(tau, tau, amplitude, gamma_j);
    d.oracle = -b.vd;
    add_case(report, d, spec.inject_kernel_scale);
    ValidationCase o = base;
    o.kind = "ko";
    o.closed = ko(tau, tau, amplitude, gamma_j);
    o.oracle = b.vod;
    add_case(report, o, spec.inject_kernel_scale);
}

void detuned_case(ValidationReport& report, const std::string& source, Level j, double amplitude,
                  double gamma_j, double detuning, double tau, const ValidateBlock& spec) {
    ValidationCase c{"xi", source, j, amplitude, gamma_j, detuning, tau, {}, {}, 0.0,
                     spec.kernel_tolerance};
    c.closed = xi(j, tau, tau, amplitude, gamma_j, detuning);
    c.oracle = quad_resummed_detuned(j, tau, amplitude, gamma_j, detuning, spec.quadrature);
    add_case(report, c, spec.inject_kernel_scale);
}

void configured_cases(ValidationReport& report, const RunConfig& config, const ValidateBlock& spec) {
    const SystemParams& system = *config.system;
    const PulseTrain& train = *config.train;
    const LevelRates rates = level_rates(system);
    std::vector<double> taus;
    for (double tau : spec.taus) {
        if (tau <= train.tau_on()) taus.push_back(tau);
    }
    if (!train.is_continuous()) taus.push_back(train.tau_on());
    for (Level j : {Level::Excited, Level::Ground}) {
        for (double tau : taus) {
            if (*config.regime == RegimeKind::Resonance) {
                resonance_cases(report, "configured", j, train.amplitude(), rates.of(j), tau, spec);
            } else {
                detuned_case(report, "configured", j, train.amplitude(), rates.of(j),
                             system.detuning(), tau, spec);
            }
        }
    }
}

/// Single-pulse comparison of the resummed potential against the second-order double integral.
void second_order_cases(ValidationReport& report, const RunConfig& config,
                        const ValidateBlock& spec) {
    const PulseTrain& train = *config.train;
    if (*config.regime != RegimeKind::Resonance || train.is_continuous() ||
        train.amplitude() * train.tau_on() > kSecondOrderMaxPhase || train.amplitude() == 0.0) {
        report.skipped.push_back(
            "second-order check needs a resonant pulsed train with lambda tau_on <= 0.02");
        return;
    }
    const PulseTrain single =
        PulseTrain::pulsed(train.amplitude(), train.tau_on(), train.period(), 1, train.start());
    const LevelRates rates = level_rates(*config.system);
    const double t0 = single.start();
    for (double t : {t0 + 0.5 * single.tau_on(), t0 + single.tau_on(), t0 + 2.0 * single.tau_on()}) {
        const PotentialSample sample = diag_potential(*config.system, single, t, RegimeKind::Resonance);
        const auto reference = vd_second_order(*config.system, single, t, spec.quadrature);
        for (Level j : {Level::Excited, Level::Ground}) {
            if (rates.of(j) == 0.0) continue;
            ValidationCase c{"second_order", "configured", j, single.amplitude(), rates.of(j), 0.0,
                             t - t0, {}, {}, 0.0, spec.second_order_tolerance};
            c.closed = sample.diagonal(j) + complex{0.0, rates.of(j)};
            c.oracle = reference[index(j)];
            add_case(report, c, spec.inject_kernel_scale);
        }
    }
}

} // namespace

double relative_error(complex value, complex reference) {
    const double diff = std::abs(value - reference);
    if (diff == 0.0) {
        return 0.0;
    }
    const double scale = std::abs(reference);
    return scale == 0.0 ? std::numeric_limits<double>::infinity() : diff / scale;
}

std::size_t ValidationReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const ValidationCase& c) { return !c.pass(); }));
}

double ValidationReport::worst_rel_err() const {
    double worst = 0.0;
    for (const auto& c : cases) worst = std::max(worst, c.rel_err);
    return worst;
}

CsvTable trace_table(const RunConfig& config) {
    const RegimeKind regime = require_regime(config, Command::Trace);
    const TraceBlock& block = require(config.trace, "trace", Command::Trace);
    CsvTable table{{"t", "Re1", "Sigma1", "Re0", "Sigma0"}, {}};
    if (block.t_max == 0.0) {
        return table;
    }
    const std::size_t n = block.samples;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = k + 1 == n ? block.t_max
                                    : block.t_max * static_cast<double>(k) / static_cast<double>(n - 1);
        const PotentialSample s = diag_potential(*config.system, *config.train, t, regime);
        table.add_row({format_double(t), format_double(s.rate[1]), format_double(s.sigma[1]),
                       format_double(s.rate[0]), format_double(s.sigma[0])});
    }
    return table;
}

SweepGrid compute_sweep(const RunConfig& config) {
    require_regime(config, Command::Sweep);
    const SweepBlock& block = require(config.sweep, "sweep", Command::Sweep);
    SweepRequest request;
    request.amplitude = config.train->amplitude();
    request.d_axis = block.d_axis;
    request.tau_axis = block.tau_axis;
    request.t_eval = block.t_eval;
    request.phase = block.phase;
    request.eps_z = block.eps_z;
    request.threads = config.threads;
    return run_sweep(*config.system, request);
}

CsvTable sweep_table(const SweepGrid& grid) {
    CsvTable table{{"D", "tau_on", "Re1", "Sigma1", "region"}, {}};
    for (std::size_t d = 0; d < grid.d_axis.size(); ++d) {
        for (std::size_t k = 0; k < grid.tau_axis.size(); ++k) {
            table.add_row({format_double(grid.d_axis[d]), format_double(grid.tau_axis[k]),
                           format_double(grid.rate_at(d, k)), format_double(grid.sigma_at(d, k)),
                           to_string(grid.region_at(d, k))});
        }
    }
    return table;
}

CsvTable evolve_table(const RunConfig& config) {
    require_regime(config, Command::Evolve);
    const EvolveBlock& block = require(config.evolve, "evolve", Command::Evolve);
    const auto series =
        evolve(*config.system, *config.train, block.initial, block.t_end, block.dt, block.options);
    CsvTable table{{"t", "p0", "p1", "norm"}, {}};
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (k % block.stride != 0 && k + 1 != series.size()) continue;
        const TwoLevelState& s = series.values[k];
        table.add_row({format_double(series.times[k]), format_double(s.p0()), format_double(s.p1()),
                       format_double(s.norm())});
    }
    return table;
}

CsvTable baseline_table(const RunConfig& config) {
    const BaselineBlock& block = require(config.baseline, "baseline", Command::Baseline);
    CsvTable table{{"N", "tau", "p"}, {}};
    for (long n : block.counts) {
        const double tau = block.total_time ? *block.total_time / static_cast<double>(n) : block.tau;
        const double p = zeno_baseline(block.hamiltonian, block.psi0, tau, n);
        table.add_row({std::to_string(n), format_double(tau), format_double(p)});
    }
    return table;
}

ValidationReport validate_suite(const RunConfig& config) {
    const ValidateBlock spec = config.validate.value_or(ValidateBlock{});
    const bool configured = spec.include_configured && config.regime.has_value();
    if (spec.random_cases == 0 && !configured) {
        throw ConfigError("validate: empty suite (random_cases is 0 and no configured system/train)");
    }
    ValidationReport report;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> gamma_draw(0.1, 2.0);
    std::uniform_real_distribution<double> amplitude_draw(0.5, 20.0);
    std::uniform_real_distribution<double> tau_draw(0.0, 5.0);
    std::uniform_real_distribution<double> ratio_draw(3.0, 30.0);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < spec.random_cases; ++i) {
        const double gamma_j = gamma_draw(rng);
        const double amplitude = amplitude_draw(rng);
        const double tau = tau_draw(rng);
        const Level j = coin(rng) ? Level::Excited : Level::Ground;
        if (i % 2 == 0) {
            resonance_cases(report, "random", j, amplitude, gamma_j, tau, spec);
        } else {
            const double detuning = (coin(rng) ? 1.0 : -1.0) * ratio_draw(rng) * amplitude;
            detuned_case(report, "random", j, amplitude, gamma_j, detuning, tau, spec);
        }
    }
    if (configured) {
        configured_cases(report, config, spec);
        if (spec.second_order) {
            second_order_cases(report, config, spec);
        }
    }
    return report;
}

CsvTable validation_table(const ValidationReport& report) {
    CsvTable table{{"kind", "source", "level", "lambda", "gamma_j", "detuning", "tau", "closed_re",
                    "closed_im", "oracle_re", "oracle_im", "rel_err", "tolerance", "pass"},
                   {}};
    for (const auto& c : report.cases) {
        table.add_row({c.kind, c.source, std::to_string(index(c.level)), format_double(c.amplitude),
                       format_double(c.gamma_j), format_double(c.detuning), format_double(c.tau),
                       format_double(c.closed.real()), format_double(c.closed.imag()),
                       format_double(c.oracle.real()), format_double(c.oracle.imag()),
                       format_double(c.rel_err), format_double(c.tolerance),
                       c.pass() ? "1" : "0"});
    }
    return table;
}

CommandOutcome run_trace(const RunConfig& config) {
    const CsvTable table = trace_table(config);
    CommandOutcome outcome;
    json extra = {{"regime", to_string(*config.regime)}};
    std::optional<double> reference;
    std::string reference_label;
    if (config.train->is_continuous()) {
        const Asymptote a = cm_asymptote(*config.system, *config.train, *config.regime);
        extra["asymptote"] = {{"Re1", a.rate1}, {"Sigma1", a.sigma1}};
        reference = a.rate1;
        reference_label = "Re1 asymptote";
    } else if (config.train->amplitude() > 0.0) {
        const SaturationEstimate s = saturation_estimate(*config.system, *config.train, *config.regime);
        extra["saturation"] = s.rate1;
        reference = s.rate1;
        reference_label = "saturation estimate";
        if (s.warning) {
            outcome.messages.push_back("warning: " + *s.warning);
        }
    }
    emit_table(outcome, config, "trace", table, extra);
    if (config.output.wants("svg")) {
        LinePlot plot{system_caption(config), "t [1/gamma]", "rate, shift [gamma]", {}};
        const auto t = table.numbers("t");
        plot.series.push_back({"Re1", t, table.numbers("Re1"), "#1f3b73", false});
        plot.series.push_back({"Sigma1", t, table.numbers("Sigma1"), "#c0392b", false});
        if (config.system->occupancy() > 0.0) {
            plot.series.push_back({"Re0", t, table.numbers("Re0"), "#27ae60", false});
            plot.series.push_back({"Sigma0", t, table.numbers("Sigma0"), "#8e44ad", false});
        }
        if (reference && !t.empty()) {
            plot.series.push_back(horizontal(reference_label, t.front(), t.back(), *reference, "#555555"));
        }
        emit_svg(outcome, config, "trace", render_line_plot(plot));
    }
    return outcome;
}

CommandOutcome run_sweep(const RunConfig& config) {
    const SweepGrid grid = compute_sweep(config);
    const SweepBlock& block = *config.sweep;
    CommandOutcome outcome;
    for (const auto& w : grid.warnings) {
        outcome.messages.push_back("warning: " + w);
    }
    const auto empirical = extract_boundary(grid);
    json extra = {{"regime", to_string(*config.regime)},
                  {"t_eval", grid.t_eval},
                  {"eps_z", grid.eps_z},
                  {"phase", to_string(block.phase)},
                  {"warnings", grid.warnings}};
    json boundary = json::array();
    for (const auto& p : empirical) {
        boundary.push_back({{"D", p.duty}, {"tau_on", p.tau_on}});
    }
    extra["boundary"] = boundary;
    json analytic = json::array();
    for (double d : grid.d_axis) {
        const auto tau = qze_boundary(*config.system, config.train->amplitude(), *config.regime, d);
        analytic.push_back({{"D", d}, {"tau_on", tau ? json(*tau) : json(nullptr)}});
    }
    extra["analytic_boundary"] = analytic;
    emit_table(outcome, config, "sweep", sweep_table(grid), extra);

    if (config.output.wants("svg")) {
        const bool sigma = block.plot == SweepPlot::Sigma;
        Heatmap map{system_caption(config), "D", "tau_on [1/gamma]", sigma ? "Sigma1" : "Re1",
                    grid.d_axis, grid.tau_axis, sigma ? grid.sigma : grid.rate, {}};
        Series curve{"QZE condition", {}, {}, "#111111", true};
        const double lo = grid.d_axis.front();
        const double hi = grid.d_axis.back();
        constexpr int kCurvePoints = 200;
        for (int i = 0; i <= kCurvePoints; ++i) {
            const double d = lo + (hi - lo) * i / kCurvePoints;
            if (const auto tau = qze_boundary(*config.system, config.train->amplitude(), *config.regime, d)) {
                curve.x.push_back(d);
                curve.y.push_back(*tau);
            }
        }
        map.overlays.push_back(std::move(curve));
        Series found{"Re1 = 0", {}, {}, "#2e7d32", false};
        for (const auto& p : empirical) {
            found.x.push_back(p.duty);
            found.y.push_back(p.tau_on);
        }
        map.overlays.push_back(std::move(found));
        emit_svg(outcome, config, "sweep", render_heatmap(map));
    }
    outcome.messages.push_back("sweep: " + std::to_string(grid.rate.size()) + " cells, " +
                               std::to_string(empirical.size()) + " boundary points");
    return outcome;
}

CommandOutcome run_evolve(const RunConfig& config) {
    const CsvTable table = evolve_table(config);
    CommandOutcome outcome;
    emit_table(outcome, config, "evolve", table,
               {{"ice", config.evolve->options.ice}, {"dt", config.evolve->dt}});
    if (config.output.wants("svg")) {
        LinePlot plot{system_caption(config), "t [1/gamma]", "population", {}};
        const auto t = table.numbers("t");
        plot.series.push_back({"p1", t, table.numbers("p1"), "#1f3b73", false});
        plot.series.push_back({"p0", t, table.numbers("p0"), "#c0392b", false});
        plot.series.push_back({"norm", t, table.numbers("norm"), "#777777", true});
        emit_svg(outcome, config, "evolve", render_line_plot(plot));
    }
    return outcome;
}

CommandOutcome run_validate(const RunConfig& config) {
    const ValidationReport report = validate_suite(config);
    CommandOutcome outcome;
    emit_table(outcome, config, "validate", validation_table(report),
               {{"failures", report.failures()}, {"skipped", report.skipped}});
    for (const auto& s : report.skipped) {
        outcome.messages.push_back("skipped: " + s);
    }
    std::ostringstream line;
    line << "validate: " << report.cases.size() << " cases, " << report.failures()
         << " failures, worst relative error " << report.worst_rel_err();
    outcome.messages.push_back(line.str());
    if (report.failures() > 0) {
        outcome.exit_code = kExitNumerical;
    }
    return outcome;
}

CommandOutcome run_baseline(const RunConfig& config) {
    const CsvTable table = baseline_table(config);
    CommandOutcome outcome;
    emit_table(outcome, config, "baseline", table);
    if (config.output.wants("svg")) {
        LinePlot plot{config.name + ": survival after N measurements", "N", "p", {}};
        plot.series.push_back({"p(N)", table.numbers("N"), table.numbers("p"), "#1f3b73", false});
        emit_svg(outcome, config, "baseline", render_line_plot(plot));
    }
    return outcome;
}

CommandOutcome run_command(Command command, const RunConfig& config) {
    switch (command) {
    case Command::Trace: return run_trace(config);
    case Command::Sweep: return run_sweep(config);
    case Command::Evolve: return run_evolve(config);
    case Command::Validate: return run_validate(config);
    case Command::Baseline: return run_baseline(config);
    }
    throw ConfigError("unknown command");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into " + path.string());
    }
}

} // namespace zice::app
