#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zice/kernels.hpp"
#include "zice/model.hpp"

namespace zice {

enum class SamplePhase {
    /// Evaluate at the midpoint of the pulse window nearest t_eval.
    InWindow,
    /// Mean over one full period centred on t_eval.
    Average,
};

enum class Region { Decay, Zeno, Reactivation };

std::string to_string(SamplePhase phase);
std::string to_string(Region region);

/// Default half-width of the Zeno band, as a fraction of 2 gamma1.
inline constexpr double kZenoBandFraction = 0.02;

/// Decay iff rate > eps, Reactivation iff rate < -eps, Zeno otherwise.
Region classify_region(double rate1, double eps_z);

struct SweepRequest {
    double amplitude = 0.0;
    std::vector<double> d_axis;
    std::vector<double> tau_axis;
    double t_eval = 20.0;
    SamplePhase phase = SamplePhase::InWindow;
    /// Defaults to kZenoBandFraction * 2 gamma1.
    std::optional<double> eps_z;
    /// Worker threads; results do not depend on it.
    unsigned threads = 1;
};

/// Row-major |d_axis| x |tau_axis| grid of rate/sigma of level |1> at t_eval.
struct SweepGrid {
    std::vector<double> d_axis;
    std::vector<double> tau_axis;
    std::vector<double> rate;
    std::vector<double> sigma;
    std::vector<Region> region;
    double t_eval = 0.0;
    double eps_z = 0.0;
    std::vector<std::string> warnings;

    std::size_t cell(std::size_t d, std::size_t tau) const { return d * tau_axis.size() + tau; }
    double rate_at(std::size_t d, std::size_t tau) const { return rate[cell(d, tau)]; }
    double sigma_at(std::size_t d, std::size_t tau) const { return sigma[cell(d, tau)]; }
    Region region_at(std::size_t d, std::size_t tau) const { return region[cell(d, tau)]; }
};

/// Pulse train used for one grid cell: period tau_on/D, count ceil(t_eval/period) + 1, start 0.
PulseTrain sweep_cell_train(double amplitude, double duty, double tau_on, double t_eval);

/// Evaluation time of the InWindow policy for one cell.
double in_window_time(const PulseTrain& train, double t_eval);

/// Throws ConfigError on non-increasing or out-of-range axes, RegimeError outside the
/// closed-form regimes. Cells with fewer than 10 periods before t_eval add a warning.
SweepGrid run_sweep(const SystemParams& params, const SweepRequest& request);

struct BoundaryPoint {
    double duty;
    double tau_on;
};

/// First positive-to-non-positive crossing of rate along tau_on in each duty row,
/// linearly interpolated. Rows without a crossing contribute nothing.
std::vector<BoundaryPoint> extract_boundary(const SweepGrid& grid);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace zice
