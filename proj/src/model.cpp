#include "zice/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "zice/errors.hpp"

namespace zice {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

} // namespace

double bose_einstein_occupancy(double omega, double temperature) {
    require(std::isfinite(omega) && omega > 0.0, "occupancy: omega must be positive");
    require(std::isfinite(temperature) && temperature >= 0.0,
            "occupancy: temperature must be non-negative");
    if (temperature == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(omega / temperature);
}

SystemParams::SystemParams(double gamma, double omega_level, double omega_drive, double occupancy)
    : gamma_(gamma), omega_level_(omega_level), omega_drive_(omega_drive), occupancy_(occupancy) {
    require(std::isfinite(gamma) && gamma > 0.0, "system.gamma must be positive");
    require(std::isfinite(omega_level) && omega_level > 0.0, "system.omega_level must be positive");
    require(std::isfinite(omega_drive), "system.omega_drive must be finite");
    require(std::isfinite(occupancy) && occupancy >= 0.0, "system.occupancy must be >= 0");
    require(std::isfinite(detuning()), "system detuning must be finite");
}

SystemParams SystemParams::normalized() const {
    return SystemParams(1.0, omega_level_ / gamma_, omega_drive_ / gamma_, occupancy_);
}

LevelRates level_rates(const SystemParams& params) {
    const double half = 0.5 * params.gamma();
    return {half * (1.0 + params.occupancy()), half * params.occupancy()};
}

PulseTrain::PulseTrain(MeasurementMode mode, double amplitude, double tau_on, double period,
                       std::size_t count, double start)
    : mode_(mode), amplitude_(amplitude), tau_on_(tau_on), period_(period), count_(count),
      start_(start) {
    require(std::isfinite(amplitude) && amplitude >= 0.0, "train.amplitude must be >= 0");
    require(std::isfinite(start), "train.start must be finite");
    if (mode == MeasurementMode::Pulsed) {
        require(std::isfinite(tau_on) && tau_on > 0.0, "train.tau_on must be positive");
        require(std::isfinite(period) && period >= tau_on, "train.period must be >= tau_on");
        require(count >= 1, "train.count must be >= 1");
    }
}

PulseTrain PulseTrain::pulsed(double amplitude, double tau_on, double period, std::size_t count,
                              double start) {
    return PulseTrain(MeasurementMode::Pulsed, amplitude, tau_on, period, count, start);
}

PulseTrain PulseTrain::continuous(double amplitude, double start) {
    const double inf = std::numeric_limits<double>::infinity();
    return PulseTrain(MeasurementMode::Continuous, amplitude, inf, inf, 1, start);
}

PulseTrain PulseTrain::with_duty(double amplitude, double tau_on, double duty, std::size_t count,
                                 double start) {
    require(std::isfinite(duty) && duty > 0.0 && duty <= 1.0, "train.duty must be in (0, 1]");
    return pulsed(amplitude, tau_on, tau_on / duty, count, start);
}

double PulseTrain::duty() const {
    return is_continuous() ? 1.0 : tau_on_ / period_;
}

double PulseTrain::pulse_start(std::size_t n) const {
    return start_ + static_cast<double>(n) * (is_continuous() ? 0.0 : period_);
}

int PulseTrain::window_indicator(std::size_t n, int m, double t) const {
    if (n >= count_) {
        throw std::out_of_range("window_indicator: pulse index out of range");
    }
    if (m != 0 && m != 1) {
        throw std::invalid_argument("window_indicator: m must be 0 or 1");
    }
    const double tn = pulse_start(n);
    if (is_continuous()) {
        return m == 1 && t >= tn ? 1 : 0;
    }
    const double t_off = tn + tau_on_;
    if (m == 1) {
        return (tn <= t && t <= t_off) ? 1 : 0;
    }
    return t > t_off ? 1 : 0;
}

double PulseTrain::envelope(double t) const {
    if (t < start_) {
        return 0.0;
    }
    if (is_continuous()) {
        return amplitude_;
    }
    const double k = std::floor((t - start_) / period_);
    const double last = static_cast<double>(count_ - 1);
    // floor() may land one window late right at a shared edge (tau_on == period)
    for (double n = std::min(k, last); n >= std::max(0.0, k - 1.0); n -= 1.0) {
        if (window_indicator(static_cast<std::size_t>(n), 1, t) == 1) {
            return amplitude_;
        }
    }
    return 0.0;
}

PulseTrain PulseTrain::normalized(double gamma) const {
    require(std::isfinite(gamma) && gamma > 0.0, "normalization rate must be positive");
    if (is_continuous()) {
        return continuous(amplitude_ / gamma, start_ * gamma);
    }
    return pulsed(amplitude_ / gamma, tau_on_ * gamma, period_ * gamma, count_, start_ * gamma);
}

std::string to_string(RegimeKind kind) {
    switch (kind) {
    case RegimeKind::Resonance:
        return "resonance";
    case RegimeKind::LargeDetuning:
        return "detuning";
    case RegimeKind::Unsupported:
        return "unsupported";
    }
    return "unknown";
}

Regime classify_regime(const SystemParams& params, double amplitude) {
    const double detuning = params.detuning();
    if (detuning == 0.0) {
        return {RegimeKind::Resonance, {}};
    }
    const LevelRates rates = level_rates(params);
    const double abs_detuning = std::abs(detuning);
    const double max_rate = std::max(rates.gamma1, rates.gamma0);
    std::ostringstream why;
    if (abs_detuning < kDetuningPerAmplitude * amplitude) {
        why << "|delta omega|/lambda = " << abs_detuning / amplitude << " < "
            << kDetuningPerAmplitude;
        return {RegimeKind::Unsupported, why.str()};
    }
    if (abs_detuning < kDetuningPerRate * max_rate) {
        why << "|delta omega|/max(gamma1, gamma0) = " << abs_detuning / max_rate << " < "
            << kDetuningPerRate;
        return {RegimeKind::Unsupported, why.str()};
    }
    return {RegimeKind::LargeDetuning, {}};
}

Regime classify_regime(const SystemParams& params, const PulseTrain& train) {
    return classify_regime(params, train.amplitude());
}

} // namespace zice
