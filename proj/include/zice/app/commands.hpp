#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "zice/app/config.hpp"
#include "zice/app/csv.hpp"
#include "zice/sweep.hpp"

namespace zice::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

struct CommandOutcome {
    std::vector<std::filesystem::path> files;
    int exit_code = kExitOk;
    /// Human-readable lines for the terminal (warnings included).
    std::vector<std::string> messages;
};

/// One oracle comparison of the validate suite.
struct ValidationCase {
    std::string kind;
    std::string source;
    Level level = Level::Excited;
    double amplitude = 0.0;
    double gamma_j = 0.0;
    double detuning = 0.0;
    double tau = 0.0;
    complex closed;
    complex oracle;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool pass() const { return rel_err <= tolerance; }
};

struct ValidationReport {
    std::vector<ValidationCase> cases;
    std::vector<std::string> skipped;
    std::size_t failures() const;
    double worst_rel_err() const;
};

/// Relative error |a - b| / |b|; zero when both vanish.
double relative_error(complex value, complex reference);

// Table builders; the run_* functions write their output with these.
CsvTable trace_table(const RunConfig& config);
SweepGrid compute_sweep(const RunConfig& config);
CsvTable sweep_table(const SweepGrid& grid);
CsvTable evolve_table(const RunConfig& config);
CsvTable baseline_table(const RunConfig& config);
/// Throws ConfigError when the suite would contain no case.
ValidationReport validate_suite(const RunConfig& config);
CsvTable validation_table(const ValidationReport& report);

CommandOutcome run_trace(const RunConfig& config);
CommandOutcome run_sweep(const RunConfig& config);
CommandOutcome run_evolve(const RunConfig& config);
/// exit_code is kExitNumerical on any tolerance breach.
CommandOutcome run_validate(const RunConfig& config);
CommandOutcome run_baseline(const RunConfig& config);
CommandOutcome run_command(Command command, const RunConfig& config);

/// Writes through a temporary file in the same directory; throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace zice::app
