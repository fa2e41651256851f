#include "zice/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zice/errors.hpp"

namespace zice {

namespace {

constexpr complex kI{0.0, 1.0};

struct Hamiltonian {
    complex h00, h01, h10, h11;

    TwoLevelState derivative(const TwoLevelState& c) const {
        return {-kI * (h00 * c.c0 + h01 * c.c1), -kI * (h10 * c.c0 + h11 * c.c1)};
    }
};

TwoLevelState axpy(const TwoLevelState& c, double h, const TwoLevelState& k) {
    return {c.c0 + h * k.c0, c.c1 + h * k.c1};
}

class RotatingFrameModel {
public:
    RotatingFrameModel(const SystemParams& params, const PulseTrain& train, const EvolveOptions& opt)
        : params_(params), train_(train), options_(opt), rates_(level_rates(params)) {
        if (options_.ice) {
            const Regime regime = classify_regime(params, train);
            if (regime.kind == RegimeKind::Unsupported) {
                throw RegimeError("evolve: measurement-corrected potential unavailable: " +
                                  regime.diagnostic);
            }
            regime_ = regime.kind;
        }
        if (options_.include_offdiag && params.detuning() != 0.0) {
            throw RegimeError("evolve: off-diagonal correction exists only at resonance");
        }
    }

    /// `drive` is g(t) for the current constant-envelope segment.
    Hamiltonian at(double t, double drive) const {
        complex v0{0.0, -rates_.gamma0};
        complex v1{0.0, -rates_.gamma1};
        if (options_.ice) {
            const PotentialSample s = diag_potential(params_, train_, t, regime_);
            v0 = s.diagonal(Level::Ground);
            v1 = s.diagonal(Level::Excited);
        }
        Hamiltonian h{v0, -drive, -drive, -params_.detuning() + v1};
        if (options_.include_offdiag) {
            const auto [e01, e10] = offdiag_correction(params_, train_, t);
            const double wt = params_.omega_drive() * t;
            h.h01 += e01 * std::polar(1.0, -wt);
            h.h10 += e10 * std::polar(1.0, wt);
        }
        return h;
    }

private:
    const SystemParams& params_;
    const PulseTrain& train_;
    EvolveOptions options_;
    LevelRates rates_;
    RegimeKind regime_ = RegimeKind::Resonance;
};

std::vector<double> segment_edges(const PulseTrain& train, double t_end) {
    std::vector<double> edges{0.0, t_end};
    auto add = [&](double e) {
        if (e > 0.0 && e < t_end) {
            edges.push_back(e);
        }
    };
    if (train.is_continuous()) {
        add(train.start());
    } else {
        for (std::size_t n = 0; n < train.count(); ++n) {
            const double tn = train.pulse_start(n);
            if (tn >= t_end) {
                break;
            }
            add(tn);
            add(tn + train.tau_on());
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

} // namespace

double max_stable_step(const SystemParams& params, const PulseTrain& train,
                       const EvolveOptions& options) {
    double limit = std::numeric_limits<double>::infinity();
    const double fastest = std::max(train.amplitude(), std::abs(params.detuning()));
    if (fastest > 0.0) {
        limit = std::min(limit, 0.01 / fastest);
    }
    limit = std::min(limit, 0.01 / level_rates(params).gamma1);
    if (!train.is_continuous()) {
        limit = std::min(limit, 0.05 * train.tau_on());
    }
    if (options.include_offdiag) {
        limit = std::min(limit, 0.01 / (params.omega_level() + std::abs(params.omega_drive())));
    }
    return limit;
}

TraceSeries<TwoLevelState> evolve(const SystemParams& params, const PulseTrain& train,
                                  const TwoLevelState& initial, double t_end, double dt,
                                  const EvolveOptions& options) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw ConfigError("evolve: t_end must be finite and >= 0");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("evolve: dt must be positive");
    }
    const double limit = max_stable_step(params, train, options);
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "evolve: dt = " << dt << " exceeds the stable step " << limit;
        throw ConfigError(msg.str());
    }
    const double norm0 = initial.norm();
    if (std::abs(norm0 - 1.0) > kNormTolerance) {
        throw ConfigError("evolve: initial state must be normalized");
    }

    const RotatingFrameModel model(params, train, options);
    TraceSeries<TwoLevelState> trace;
    TwoLevelState c = initial;
    trace.push(0.0, c);

    const std::vector<double> edges = segment_edges(train, t_end);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e];
        const double b = edges[e + 1];
        const double drive = train.envelope(0.5 * (a + b));
        const auto steps = static_cast<long>(std::ceil((b - a) / dt - 1e-9));
        const double h = (b - a) / static_cast<double>(steps);
        Hamiltonian h_start = model.at(a, drive);
        for (long k = 0; k < steps; ++k) {
            const double t = a + static_cast<double>(k) * h;
            const double t_next = k + 1 == steps ? b : a + static_cast<double>(k + 1) * h;
            const Hamiltonian h_mid = model.at(t + 0.5 * h, drive);
            const Hamiltonian h_end = model.at(t_next, drive);

            const TwoLevelState k1 = h_start.derivative(c);
            const TwoLevelState k2 = h_mid.derivative(axpy(c, 0.5 * h, k1));
            const TwoLevelState k3 = h_mid.derivative(axpy(c, 0.5 * h, k2));
            const TwoLevelState k4 = h_end.derivative(axpy(c, h, k3));
            c.c0 += (h / 6.0) * (k1.c0 + 2.0 * k2.c0 + 2.0 * k3.c0 + k4.c0);
            c.c1 += (h / 6.0) * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1);

            const double norm = c.norm();
            if (!std::isfinite(norm)) {
                std::ostringstream msg;
                msg << "evolve: non-finite amplitude at t = " << t_next;
                throw NumericalError(msg.str());
            }
            if (!options.allow_norm_growth && norm > norm0 + kNormTolerance) {
                std::ostringstream msg;
                msg << "evolve: norm grew to " << norm << " at t = " << t_next
                    << " (set allow_norm_growth for reactivation runs)";
                throw NumericalError(msg.str());
            }
            trace.push(t_next, c);
            h_start = h_end;
        }
    }
    return trace;
}

Matrix2 propagator(const Matrix2& hamiltonian, double t) {
    const complex mean = 0.5 * (hamiltonian[0][0] + hamiltonian[1][1]);
    const Matrix2 b{{{hamiltonian[0][0] - mean, hamiltonian[0][1]},
                     {hamiltonian[1][0], hamiltonian[1][1] - mean}}};
    // B^2 = s I for traceless B
    const complex s = b[0][0] * b[0][0] + b[0][1] * b[1][0];
    const complex mu = std::sqrt(-t * t * s);
    complex cosh_mu;
    complex sinhc_mu;
    if (std::abs(mu) < 1e-4) {
        const complex mu2 = mu * mu;
        cosh_mu = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
        sinhc_mu = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
    } else {
        cosh_mu = std::cosh(mu);
        sinhc_mu = std::sinh(mu) / mu;
    }
    const complex phase = std::exp(-kI * mean * t);
    const complex coeff = -kI * t * sinhc_mu;
    Matrix2 u{};
    for (int r = 0; r < 2; ++r) {
        for (int col = 0; col < 2; ++col) {
            u[r][col] = phase * ((r == col ? cosh_mu : complex{}) + coeff * b[r][col]);
        }
    }
    return u;
}

namespace {

void require_normalized(const Vector2& psi) {
    const double n = std::norm(psi[0]) + std::norm(psi[1]);
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw ConfigError("psi0 must be normalized");
    }
}

complex expectation(const Matrix2& m, const Vector2& psi) {
    complex out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out += std::conj(psi[r]) * m[r][c] * psi[c];
        }
    }
    return out;
}

Matrix2 multiply(const Matrix2& x, const Matrix2& y) {
    Matrix2 out{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    return out;
}

} // namespace

double zeno_baseline(const Matrix2& hamiltonian, const Vector2& psi0, double tau, long count) {
    require_normalized(psi0);
    if (!(tau > 0.0)) {
        throw ConfigError("zeno_baseline: tau must be positive");
    }
    if (count < 0) {
        throw ConfigError("zeno_baseline: N must be >= 0");
    }
    const complex amplitude = expectation(propagator(hamiltonian, tau), psi0);
    return std::pow(std::norm(amplitude), static_cast<double>(count));
}

HamiltonianMoments hamiltonian_moments(const Matrix2& hamiltonian, const Vector2& psi0) {
    require_normalized(psi0);
    Matrix2 herm{};
    Matrix2 anti{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            herm[r][c] = 0.5 * (hamiltonian[r][c] + std::conj(hamiltonian[c][r]));
            anti[r][c] = 0.5 * (hamiltonian[r][c] - std::conj(hamiltonian[c][r]));
        }
    }
    const complex h1 = expectation(herm, psi0);
    const complex a1 = expectation(anti, psi0);
    HamiltonianMoments m;
    m.va = 2.0 * a1;
    m.vh2 = expectation(multiply(herm, herm), psi0) - h1 * h1;
    m.va2 = expectation(multiply(anti, anti), psi0) + a1 * a1;
    m.v2 = m.vh2 + m.va2;
    return m;
}

} // namespace zice
