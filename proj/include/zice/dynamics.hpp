#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "zice/kernels.hpp"
#include "zice/model.hpp"

namespace zice {

/// Amplitudes of |0> and |1> in the frame rotating at the drive frequency.
struct TwoLevelState {
    complex c0;
    complex c1;

    double p0() const { return std::norm(c0); }
    double p1() const { return std::norm(c1); }
    double norm() const { return p0() + p1(); }
};

/// Time-ordered samples; `times` is strictly increasing and parallel to `values`.
template <class Record>
struct TraceSeries {
    std::vector<double> times;
    std::vector<Record> values;

    void push(double t, Record value) {
        if (!times.empty() && !(t > times.back())) {
            throw std::logic_error("TraceSeries: times must be strictly increasing");
        }
        times.push_back(t);
        values.push_back(std::move(value));
    }

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

struct EvolveOptions {
    /// false: bare -i gamma_j diagonal; true: measurement-corrected diag_potential.
    bool ice = true;
    /// Add the resonant off-diagonal correction to the drive (resonance only).
    bool include_offdiag = false;
    /// Waive the norm <= 1 check for runs driven into reactivation.
    bool allow_norm_growth = false;
};

inline constexpr double kNormTolerance = 1e-9;

/// Largest step accepted by evolve(): min(0.01/max(lambda, |delta|), 0.01/gamma1, 0.05 tau_on),
/// ignoring terms whose rate is zero; with the off-diagonal correction also 0.01/(Omega + omega).
double max_stable_step(const SystemParams& params, const PulseTrain& train,
                       const EvolveOptions& options = {});

/// Integrates i dc/dt = H(t) c over [0, t_end] with classical fixed-step RK4,
///   H(t) = [[V_0(t), -g(t)], [-g(t), -delta + V_1(t)]],
/// shortening steps so none straddles a pulse edge. Every step is recorded.
/// Throws ConfigError on a step above max_stable_step or an unnormalized start,
/// NumericalError on NaN or unexpected norm growth.
TraceSeries<TwoLevelState> evolve(const SystemParams& params, const PulseTrain& train,
                                  const TwoLevelState& initial, double t_end, double dt,
                                  const EvolveOptions& options = {});

using Matrix2 = std::array<std::array<complex, 2>, 2>;
using Vector2 = std::array<complex, 2>;

/// exp(-i H t) for a general (non-Hermitian) 2x2 H.
Matrix2 propagator(const Matrix2& hamiltonian, double t);

/// Survival after N ideal projective measurements spaced tau:
/// (|<psi0| e^{-i H tau} |psi0>|^2)^N.
double zeno_baseline(const Matrix2& hamiltonian, const Vector2& psi0, double tau, long count);

/// Moments of H in psi0 with H = H_h + H_a (Hermitian + anti-Hermitian):
/// va = 2<H_a>, vh2 = <H_h^2> - <H_h>^2, va2 = <H_a^2> + <H_a>^2, v2 = vh2 + va2.
struct HamiltonianMoments {
    complex va;
    complex vh2;
    complex va2;
    complex v2;
};

HamiltonianMoments hamiltonian_moments(const Matrix2& hamiltonian, const Vector2& psi0);

} // namespace zice
