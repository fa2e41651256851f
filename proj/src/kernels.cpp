#include "zice/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zice/errors.hpp"

namespace zice {

namespace {

constexpr complex kI{0.0, 1.0};

/// phi(w) = (e^w - 1) / w, accurate for small |w|; phi(0) = 1.
complex phi(complex w) {
    if (std::abs(w) < 0.5) {
        complex term = 1.0;
        complex sum = 1.0;
        for (int n = 2; n < 40; ++n) {
            term *= w / static_cast<double>(n);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    const double a = w.real();
    const double b = w.imag();
    const double half_sin = std::sin(0.5 * b);
    const complex em1{std::expm1(a) * std::cos(b) - 2.0 * half_sin * half_sin,
                      std::exp(a) * std::sin(b)};
    return em1 / w;
}

/// Shared closed form behind K_d, K_o and Xi:
/// s i k x e^{gamma (x - y)} phi((s i k - gamma) x), zero for y < 0.
///
/// Resonance uses s = +1, k = lambda (K_d = Re, K_o = Im); large detuning uses
/// s = (-1)^j, k = lambda^2 / delta.
complex rotating_kernel(double x, double y, double sign, double k, double gamma) {
    if (y < 0.0 || k == 0.0) {
        return 0.0;
    }
    const complex rate = sign * k * kI;
    return rate * x * std::exp(gamma * (x - y)) * phi((rate - gamma) * x);
}

void check_kernel_args(double amplitude, double gamma_j) {
    if (!(amplitude >= 0.0) || !(gamma_j >= 0.0)) {
        throw ConfigError("kernel arguments require lambda >= 0 and gamma_j >= 0");
    }
}

/// sum_{k=0}^{n-1} e^{-a k}
double geometric_weight(double a, std::size_t n) {
    if (a == 0.0) {
        return static_cast<double>(n);
    }
    return std::expm1(-a * static_cast<double>(n)) / std::expm1(-a);
}

/// Sum over pulses n of KERNEL(tau_n, tau_n) Theta_{n,1} + KERNEL(tau_on, tau_n) Theta_{n,0}.
///
/// Pulses that have not started contribute nothing. Completed pulses share the factor
/// KERNEL(tau_on, y) = e^{-gamma (y - y')} KERNEL(tau_on, y'), so they collapse into one
/// geometric series anchored at the most recent one.
template <class Kernel>
complex accumulate(const PulseTrain& train, double t, double gamma_j, Kernel&& kernel) {
    const double u = t - train.start();
    if (u < 0.0) {
        return 0.0;
    }
    if (train.is_continuous()) {
        return kernel(u, u);
    }
    const double period = train.period();
    const double tau_on = train.tau_on();
    const double k = std::floor(u / period);
    const std::size_t last =
        k >= static_cast<double>(train.count() - 1) ? train.count() - 1 : static_cast<std::size_t>(k);
    const double tau_last = u - static_cast<double>(last) * period;

    complex sum = 0.0;
    std::size_t completed = last + 1;
    if (tau_last <= tau_on) {
        sum += kernel(tau_last, tau_last);
        completed = last;
    }
    if (completed > 0) {
        const double y_recent = u - static_cast<double>(completed - 1) * period;
        sum += kernel(tau_on, y_recent) * geometric_weight(gamma_j * period, completed);
    }
    return sum;
}

RegimeKind resolve(const SystemParams& params, const PulseTrain& train) {
    const Regime regime = classify_regime(params, train);
    if (regime.kind == RegimeKind::Unsupported) {
        throw RegimeError("parameters outside resonance/large-detuning forms: " + regime.diagnostic);
    }
    return regime.kind;
}

} // namespace

double kd(double x, double y, double amplitude, double gamma_j) {
    check_kernel_args(amplitude, gamma_j);
    return rotating_kernel(x, y, 1.0, amplitude, gamma_j).real();
}

double ko(double x, double y, double amplitude, double gamma_j) {
    check_kernel_args(amplitude, gamma_j);
    return rotating_kernel(x, y, 1.0, amplitude, gamma_j).imag();
}

complex xi(Level j, double x, double y, double amplitude, double gamma_j, double detuning) {
    check_kernel_args(amplitude, gamma_j);
    if (detuning == 0.0 || !std::isfinite(detuning)) {
        throw RegimeError("xi: large-detuning kernel needs a nonzero detuning");
    }
    return rotating_kernel(x, y, parity(j), amplitude * amplitude / detuning, gamma_j);
}

PotentialSample diag_potential(const SystemParams& params, const PulseTrain& train, double t) {
    return diag_potential(params, train, t, resolve(params, train));
}

PotentialSample diag_potential(const SystemParams& params, const PulseTrain& train, double t,
                               RegimeKind regime) {
    if (regime == RegimeKind::Unsupported) {
        throw RegimeError("diag_potential: unsupported regime");
    }
    const LevelRates rates = level_rates(params);
    const double lambda = train.amplitude();
    const double detuning = params.detuning();

    PotentialSample sample;
    sample.t = t;
    for (Level j : {Level::Ground, Level::Excited}) {
        const double gamma_j = rates.of(j);
        const int idx = index(j);
        if (gamma_j == 0.0) {
            sample.sigma[idx] = 0.0;
            sample.rate[idx] = 0.0;
            continue;
        }
        complex sum;
        if (regime == RegimeKind::Resonance) {
            sum = accumulate(train, t, gamma_j, [&](double x, double y) {
                return complex(rotating_kernel(x, y, 1.0, lambda, gamma_j).real(), 0.0);
            });
        } else {
            const double k = lambda * lambda / detuning;
            sum = accumulate(train, t, gamma_j, [&](double x, double y) {
                return rotating_kernel(x, y, parity(j), k, gamma_j);
            });
        }
        // -i gamma_j (1 + S) = gamma_j Im S - i gamma_j (1 + Re S)
        sample.sigma[idx] = regime == RegimeKind::Resonance ? 0.0 : gamma_j * sum.imag();
        sample.rate[idx] = 2.0 * gamma_j * (1.0 + sum.real());
    }
    return sample;
}

std::pair<complex, complex> offdiag_correction(const SystemParams& params, const PulseTrain& train,
                                               double t) {
    if (params.detuning() != 0.0) {
        throw RegimeError("offdiag_correction: closed form exists only at resonance");
    }
    const LevelRates rates = level_rates(params);
    const double lambda = train.amplitude();
    std::array<complex, 2> element{};
    for (Level j : {Level::Ground, Level::Excited}) {
        const double gamma_j = rates.of(j);
        if (gamma_j == 0.0) {
            continue;
        }
        const double sum = accumulate(train, t, gamma_j, [&](double x, double y) {
                               return complex(rotating_kernel(x, y, 1.0, lambda, gamma_j).imag(), 0.0);
                           }).real();
        if (sum == 0.0) {
            continue;
        }
        const complex phase = std::polar(1.0, parity(j) * params.omega_level() * t);
        element[index(j)] = gamma_j * phase * sum;
    }
    // gamma1 term sits on |0><1|, gamma0 term on |1><0|
    return {element[1], element[0]};
}

double effective_strength(const SystemParams& params, double amplitude, RegimeKind regime) {
    switch (regime) {
    case RegimeKind::Resonance:
        return amplitude;
    case RegimeKind::LargeDetuning:
        return amplitude * amplitude / std::abs(params.detuning());
    case RegimeKind::Unsupported:
        break;
    }
    throw RegimeError("effective_strength: unsupported regime");
}

Asymptote cm_asymptote(const SystemParams& params, const PulseTrain& train, RegimeKind regime) {
    if (!train.is_continuous()) {
        throw ConfigError("cm_asymptote requires a continuous measurement train");
    }
    const double gamma1 = level_rates(params).gamma1;
    const double lambda = train.amplitude();
    if (regime == RegimeKind::Resonance) {
        const double g2 = gamma1 * gamma1;
        return {2.0 * gamma1 * g2 / (g2 + lambda * lambda), 0.0};
    }
    if (regime == RegimeKind::LargeDetuning) {
        const double l2 = lambda * lambda;
        const complex v =
            -kI * gamma1 * (1.0 - l2 / complex(l2, -gamma1 * params.detuning()));
        return {-2.0 * v.imag(), v.real()};
    }
    throw RegimeError("cm_asymptote: unsupported regime");
}

SaturationEstimate saturation_estimate(const SystemParams& params, const PulseTrain& train,
                                       RegimeKind regime) {
    if (train.is_continuous()) {
        throw ConfigError("saturation_estimate requires a pulsed train");
    }
    const double gamma1 = level_rates(params).gamma1;
    const double strength = effective_strength(params, train.amplitude(), regime);
    SaturationEstimate out{2.0 * gamma1 - strength * strength * train.tau_on() * train.duty(), {}};
    const double product = strength * train.tau_on();
    if (product > kSaturationValidity) {
        std::ostringstream msg;
        msg << "lambda' tau_on = " << product << " exceeds " << kSaturationValidity
            << "; saturation law is a small-pulse estimate";
        out.warning = msg.str();
    }
    return out;
}

std::optional<double> qze_boundary(const SystemParams& params, double amplitude, RegimeKind regime,
                                   double duty) {
    if (!(duty >= 0.0 && duty <= 1.0)) {
        throw ConfigError("qze_boundary: duty must lie in [0, 1]");
    }
    const double strength = effective_strength(params, amplitude, regime);
    if (duty == 0.0 || strength == 0.0) {
        return std::nullopt;
    }
    return 2.0 * level_rates(params).gamma1 / (strength * strength * duty);
}

} // namespace zice
