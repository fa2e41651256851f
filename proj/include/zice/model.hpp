#pragma once

#include <cstddef>
#include <string>

namespace zice {

/// Two-level system index: |0> is the lower level, |1> the measured level.
enum class Level : int { Ground = 0, Excited = 1 };

constexpr int index(Level j) { return static_cast<int>(j); }

/// (-1)^j for the level-dependent signs of the detuned kernels.
constexpr double parity(Level j) { return j == Level::Ground ? 1.0 : -1.0; }

/// Bose-Einstein occupancy 1/(exp(omega/T) - 1); zero at T = 0.
double bose_einstein_occupancy(double omega, double temperature);

/// Physical constants of the system coupled to its reservoir. Rates and
/// frequencies share one time unit; the CLI normalizes to gamma = 1.
class SystemParams {
public:
    SystemParams(double gamma, double omega_level, double omega_drive, double occupancy = 0.0);

    double gamma() const { return gamma_; }
    double omega_level() const { return omega_level_; }
    double omega_drive() const { return omega_drive_; }
    double occupancy() const { return occupancy_; }

    /// delta omega = omega_drive - omega_level.
    double detuning() const { return omega_drive_ - omega_level_; }

    /// Copy with every rate divided by gamma (times scale by gamma).
    SystemParams normalized() const;

private:
    double gamma_;
    double omega_level_;
    double omega_drive_;
    double occupancy_;
};

struct LevelRates {
    double gamma1;
    double gamma0;

    double of(Level j) const { return j == Level::Excited ? gamma1 : gamma0; }
};

/// gamma1 = (gamma/2)(1 + N_B), gamma0 = (gamma/2) N_B.
LevelRates level_rates(const SystemParams& params);

enum class MeasurementMode { Pulsed, Continuous };

/// Square-pulse measurement schedule g(t) = lambda * sum_n [theta(t - t_n) - theta(t - t_n - tau_on)].
///
/// Windows are closed on both ends: Theta_{n,1} = 1 for t_n <= t <= t_n + tau_on and
/// Theta_{n,0} = 1 for t > t_n + tau_on. A continuous train is one pulse of unbounded
/// width starting at `start`; it reports duty 1 and has count 1.
class PulseTrain {
public:
    static PulseTrain pulsed(double amplitude, double tau_on, double period, std::size_t count,
                             double start = 0.0);
    static PulseTrain continuous(double amplitude, double start = 0.0);
    /// Pulsed train from duty D = tau_on / period.
    static PulseTrain with_duty(double amplitude, double tau_on, double duty, std::size_t count,
                                double start = 0.0);

    MeasurementMode mode() const { return mode_; }
    bool is_continuous() const { return mode_ == MeasurementMode::Continuous; }
    double amplitude() const { return amplitude_; }
    /// Infinite for continuous trains.
    double tau_on() const { return tau_on_; }
    double period() const { return period_; }
    std::size_t count() const { return count_; }
    double start() const { return start_; }
    double duty() const;

    /// t_n = start + n * period.
    double pulse_start(std::size_t n) const;
    /// g(t).
    double envelope(double t) const;
    /// Theta_{n,m}(t) for m in {0, 1}.
    int window_indicator(std::size_t n, int m, double t) const;

    /// Copy with times multiplied and the amplitude divided by `gamma`.
    PulseTrain normalized(double gamma) const;

private:
    PulseTrain(MeasurementMode mode, double amplitude, double tau_on, double period,
               std::size_t count, double start);

    MeasurementMode mode_;
    double amplitude_;
    double tau_on_;
    double period_;
    std::size_t count_;
    double start_;
};

enum class RegimeKind { Resonance, LargeDetuning, Unsupported };

struct Regime {
    RegimeKind kind;
    /// Names the violated ratio when kind is Unsupported.
    std::string diagnostic;
};

std::string to_string(RegimeKind kind);

/// Minimum |delta omega| / lambda for the large-detuning forms.
inline constexpr double kDetuningPerAmplitude = 3.0;
/// Minimum |delta omega| / max(gamma1, gamma0) for the large-detuning forms.
inline constexpr double kDetuningPerRate = 20.0;

/// Resonance iff delta omega == 0 exactly; large detuning iff
/// |delta omega| >= 3 lambda and |delta omega| >= 20 max(gamma1, gamma0).
Regime classify_regime(const SystemParams& params, double amplitude);
Regime classify_regime(const SystemParams& params, const PulseTrain& train);

} // namespace zice
