#include "zice/oracle.hpp"

#include <numbers>

namespace zice {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

/// (e^w - 1) / w. Kept separate from the kernel code on purpose.
cplx expm1_over(cplx w) {
    if (std::abs(w) < 0.1) {
        cplx term = 1.0;
        cplx sum = 1.0;
        for (int n = 2; n <= 14; ++n) {
            term *= w / static_cast<double>(n);
            sum += term;
        }
        return sum;
    }
    return (std::exp(w) - 1.0) / w;
}

double oscillation_panel(double angular_rate) {
    return angular_rate == 0.0 ? std::numeric_limits<double>::infinity()
                               : 0.5 * std::numbers::pi / std::abs(angular_rate);
}

struct Segment {
    double a;
    double b;
};

/// Support of g(t') on [start, t], clipped at t.
std::vector<Segment> segments_until(const PulseTrain& train, double t) {
    std::vector<Segment> out;
    if (t <= train.start()) {
        return out;
    }
    if (train.is_continuous()) {
        out.push_back({train.start(), t});
        return out;
    }
    for (std::size_t n = 0; n < train.count(); ++n) {
        const double a = train.pulse_start(n);
        if (a >= t) {
            break;
        }
        out.push_back({a, std::min(a + train.tau_on(), t)});
    }
    return out;
}

enum class Pairing { AllPulses, SamePulse };

std::array<cplx, 2> second_order(const SystemParams& params, const PulseTrain& train, double t,
                                 const QuadratureSpec& spec, Pairing pairing) {
    spec.validate();
    std::array<cplx, 2> out{};
    const double lambda = train.amplitude();
    const auto segments = segments_until(train, t);
    if (lambda == 0.0 || segments.empty()) {
        return out;
    }
    const LevelRates rates = level_rates(params);
    const double delta = params.detuning();

    for (Level j : {Level::Ground, Level::Excited}) {
        const double gamma = rates.of(j);
        if (gamma == 0.0) {
            continue;
        }
        // e^{+i delta (t1 - t2)} for |1>, e^{-i delta (t1 - t2)} for |0>
        const double sign = j == Level::Excited ? 1.0 : -1.0;
        const cplx kappa{gamma, -sign * delta};

        // lambda * int_a^b e^{-i sign delta t2} e^{gamma (t2 - t)} dt2, with the phase
        // referred to `a`; the caller multiplies by e^{i sign delta (t1 - a)}.
        auto inner = [&](double a, double b) {
            const double len = b - a;
            return lambda * std::exp(gamma * (a - t)) * len * expm1_over(kappa * len);
        };

        cplx total = 0.0;
        cplx earlier = 0.0;  // sum over completed earlier segments, phase referred to 0
        for (const Segment& seg : segments) {
            const cplx carried = earlier;
            auto integrand = [&](double t1) -> cplx {
                cplx value = lambda * std::polar(1.0, sign * delta * (t1 - seg.a)) * inner(seg.a, t1);
                if (pairing == Pairing::AllPulses) {
                    value += lambda * std::polar(1.0, sign * delta * t1) * carried;
                }
                return value;
            };
            total += adaptive_simpson(integrand, seg.a, seg.b, spec, {}, oscillation_panel(delta)).value;
            earlier += std::polar(1.0, -sign * delta * seg.a) * inner(seg.a, seg.b);
        }
        out[index(j)] = kI * gamma * total;
    }
    return out;
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_depth < 10) {
        throw ConfigError("quadrature spec needs rel_tol > 0, abs_tol > 0, max_depth >= 10");
    }
}

ResummedBrackets quad_resummed(double tau, double amplitude, double gamma_j,
                               const QuadratureSpec& spec) {
    spec.validate();
    if (!(tau >= 0.0) || !(amplitude >= 0.0) || !(gamma_j >= 0.0)) {
        throw ConfigError("quad_resummed: tau, lambda, gamma_j must be >= 0");
    }
    if (tau == 0.0 || amplitude == 0.0) {
        return {0.0, 0.0};
    }
    cplx value;
    if (gamma_j > 0.0) {
        const double freq = amplitude / gamma_j;
        auto f = [&](double y) { return std::exp(-y) * std::polar(1.0, freq * y); };
        value = freq * adaptive_simpson(f, 0.0, gamma_j * tau, spec, {}, oscillation_panel(freq)).value;
    } else {
        auto f = [&](double u) { return std::polar(1.0, amplitude * u); };
        value = amplitude * adaptive_simpson(f, 0.0, tau, spec, {}, oscillation_panel(amplitude)).value;
    }
    return {value.imag(), value.real()};
}

std::complex<double> quad_resummed_detuned(Level j, double tau, double amplitude, double gamma_j,
                                           double detuning, const QuadratureSpec& spec) {
    spec.validate();
    if (detuning == 0.0) {
        throw RegimeError("quad_resummed_detuned: detuning must be nonzero");
    }
    if (!(tau >= 0.0) || !(amplitude >= 0.0) || !(gamma_j >= 0.0)) {
        throw ConfigError("quad_resummed_detuned: tau, lambda, gamma_j must be >= 0");
    }
    if (tau == 0.0 || amplitude == 0.0) {
        return 0.0;
    }
    const double s = parity(j);
    const double shift = amplitude * amplitude / detuning;
    if (gamma_j > 0.0) {
        const double freq = s * shift / gamma_j;
        auto f = [&](double y) { return std::exp(-y) * std::polar(1.0, freq * y); };
        return kI * freq * adaptive_simpson(f, 0.0, gamma_j * tau, spec, {}, oscillation_panel(freq)).value;
    }
    auto f = [&](double u) { return std::polar(1.0, s * shift * u); };
    return kI * s * shift * adaptive_simpson(f, 0.0, tau, spec, {}, oscillation_panel(shift)).value;
}

std::array<std::complex<double>, 2> vd_second_order(const SystemParams& params,
                                                    const PulseTrain& train, double t,
                                                    const QuadratureSpec& spec) {
    return second_order(params, train, t, spec, Pairing::AllPulses);
}

std::array<std::complex<double>, 2> vd_second_order_pulsewise(const SystemParams& params,
                                                              const PulseTrain& train, double t,
                                                              const QuadratureSpec& spec) {
    return second_order(params, train, t, spec, Pairing::SamePulse);
}

} // namespace zice
