#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "zice/model.hpp"

namespace zice {

using complex = std::complex<double>;

/// Diagonal reduced potential of both levels at one instant:
/// <j|V_d(t)|j> = sigma[j] - i rate[j] / 2.
struct PotentialSample {
    double t = 0.0;
    std::array<double, 2> sigma{};
    std::array<double, 2> rate{};

    complex diagonal(Level j) const { return {sigma[index(j)], -0.5 * rate[index(j)]}; }
};

/// Resonant in-window/post-window diagonal kernel K_{d,j}(x, y).
///
/// K_d(x, y) = lambda e^{-gamma y} / (gamma^2 + lambda^2)
///             * [lambda cos(lambda x) + gamma sin(lambda x) - lambda e^{gamma x}] theta(y),
/// with theta(0) = 1. Evaluated in a cancellation-free form so that gamma = 0 and
/// x -> 0 keep full relative precision.
double kd(double x, double y, double amplitude, double gamma_j);

/// Resonant off-diagonal kernel
/// K_o(x, y) = lambda e^{-gamma y} / (gamma^2 + lambda^2)
///             * [gamma e^{gamma x} + lambda sin(lambda x) - gamma cos(lambda x)] theta(y).
double ko(double x, double y, double amplitude, double gamma_j);

/// Large-detuning kernel
/// Xi_j(x, y) = lambda^2 e^{-gamma y} / (lambda^2 + (-1)^j i gamma delta)
///              * (e^{(-1)^j i lambda^2 x / delta} - e^{gamma x}) theta(y).
/// Throws RegimeError for delta == 0.
complex xi(Level j, double x, double y, double amplitude, double gamma_j, double detuning);

/// Measurement-corrected diagonal potential summed over every pulse that has started.
/// Throws RegimeError when the parameters fall outside both closed forms.
PotentialSample diag_potential(const SystemParams& params, const PulseTrain& train, double t);

/// Same, with the regime already resolved by the caller (must be Resonance or LargeDetuning).
PotentialSample diag_potential(const SystemParams& params, const PulseTrain& train, double t,
                               RegimeKind regime);

/// Resonant off-diagonal correction: first = <0|V|1> (prefactor gamma1),
/// second = <1|V|0> (prefactor gamma0), each gamma_j e^{(-1)^j i Omega t} sum_n K_{o,j}.
/// Not part of the default dynamics. Throws RegimeError off resonance.
std::pair<complex, complex> offdiag_correction(const SystemParams& params, const PulseTrain& train,
                                               double t);

struct Asymptote {
    double rate1;
    double sigma1;
};

/// Long-time limit of rate/sigma of level |1> under continuous measurement.
/// Throws ConfigError for pulsed trains.
Asymptote cm_asymptote(const SystemParams& params, const PulseTrain& train, RegimeKind regime);

/// lambda' = lambda at resonance, lambda^2 / |delta omega| in large detuning.
double effective_strength(const SystemParams& params, double amplitude, RegimeKind regime);

/// lambda' tau_on above which the saturation estimate is flagged.
inline constexpr double kSaturationValidity = 0.3;

struct SaturationEstimate {
    double rate1;
    std::optional<std::string> warning;
};

/// Many-pulse saturated decay rate 2 gamma1 - lambda'^2 tau_on D.
SaturationEstimate saturation_estimate(const SystemParams& params, const PulseTrain& train,
                                       RegimeKind regime);

/// QZE onset tau_on* = 2 gamma1 / (lambda'^2 D); empty when D == 0 or lambda' == 0.
std::optional<double> qze_boundary(const SystemParams& params, double amplitude, RegimeKind regime,
                                   double duty);

} // namespace zice
