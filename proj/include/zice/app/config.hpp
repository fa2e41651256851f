#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zice/dynamics.hpp"
#include "zice/model.hpp"
#include "zice/oracle.hpp"
#include "zice/sweep.hpp"

namespace zice::app {

enum class Command { Trace, Sweep, Evolve, Validate, Baseline };

Command parse_command(const std::string& name);
std::string to_string(Command command);

struct TraceBlock {
    double t_max = 20.0;
    std::size_t samples = 2001;
};

enum class SweepPlot { Rate, Sigma };

struct SweepBlock {
    std::vector<double> d_axis;
    std::vector<double> tau_axis;
    double t_eval = 20.0;
    SamplePhase phase = SamplePhase::InWindow;
    std::optional<double> eps_z;
    SweepPlot plot = SweepPlot::Rate;
};

struct EvolveBlock {
    TwoLevelState initial{1.0, 0.0};
    double t_end = 10.0;
    double dt = 1e-3;
    EvolveOptions options;
    /// Keep every stride-th step in the output (the final step is always kept).
    std::size_t stride = 1;
};

struct ValidateBlock {
    QuadratureSpec quadrature;
    std::size_t random_cases = 100;
    std::uint64_t seed = 20240611;
    double kernel_tolerance = 1e-8;
    /// In-window times checked for the configured system/train.
    std::vector<double> taus{0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
    bool include_configured = true;
    bool second_order = true;
    double second_order_tolerance = 1e-3;
    /// Multiplies every closed-form value before comparison (fault injection).
    double inject_kernel_scale = 1.0;
};

struct BaselineBlock {
    Matrix2 hamiltonian{};
    Vector2 psi0{1.0, 0.0};
    double tau = 0.01;
    /// When set, each row uses tau = total_time / N instead of the fixed tau.
    std::optional<double> total_time;
    std::vector<long> counts{1, 10, 100};
};

struct OutputBlock {
    std::filesystem::path path = "out";
    std::vector<std::string> formats{"csv"};

    bool wants(const std::string& format) const;
};

/// Validated run configuration. Rates and times are normalized so that gamma = 1 whenever
/// a system block is present; baseline entries are taken as given.
struct RunConfig {
    std::string name = "run";
    std::optional<SystemParams> system;
    std::optional<PulseTrain> train;
    /// Resolved regime when both system and train are present.
    std::optional<RegimeKind> regime;
    std::optional<TraceBlock> trace;
    std::optional<SweepBlock> sweep;
    std::optional<EvolveBlock> evolve;
    std::optional<ValidateBlock> validate;
    std::optional<BaselineBlock> baseline;
    OutputBlock output;
    unsigned threads = 1;
};

/// Unknown keys, wrong types and failed invariants throw ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);

/// Throws IoError when unreadable, ConfigError when not JSON.
nlohmann::json load_json(const std::filesystem::path& path);

/// Directory holding the shipped figure presets (ZICE_PRESET_DIR overrides).
std::filesystem::path preset_directory();
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
nlohmann::json load_preset(const std::string& name);

} // namespace zice::app
