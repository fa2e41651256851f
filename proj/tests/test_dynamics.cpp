#include <doctest.h>

#include <cmath>
#include <random>

#include "zice/dynamics.hpp"
#include "zice/errors.hpp"

using namespace zice;

namespace {

Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
    Matrix2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// Taylor series of exp(-i H t) with scaling and squaring.
Matrix2 series_exp(const Matrix2& h, double t) {
    const int squarings = 8;
    const double dt = t / std::pow(2.0, squarings);
    Matrix2 a{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a[i][j] = complex(0.0, -dt) * h[i][j];
    Matrix2 result{{{1.0, 0.0}, {0.0, 1.0}}};
    Matrix2 term = result;
    for (int n = 1; n < 30; ++n) {
        term = multiply(term, a);
        for (auto& row : term)
            for (auto& x : row) x /= static_cast<double>(n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

double max_diff(const Matrix2& a, const Matrix2& b) {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

const TwoLevelState excited{0.0, 1.0};

} // namespace

TEST_CASE("drive off: the excited level decays at the bare rate") {
    const SystemParams p(1.0, 100.0, 100.0, 0.2);
    const auto g1 = level_rates(p).gamma1;
    for (bool ice : {true, false}) {
        const auto series = evolve(p, PulseTrain::continuous(0.0), excited, 2.0, 1e-3, {ice, false, false});
        for (std::size_t k = 0; k < series.size(); k += 250) {
            CHECK(series.values[k].p1() ==
                  doctest::Approx(std::exp(-2.0 * g1 * series.times[k])).epsilon(1e-10));
            CHECK(series.values[k].p0() == 0.0);
        }
        CHECK(series.times.back() == 2.0);
    }
}

TEST_CASE("RK4 agrees with the exact propagator for a constant Hamiltonian") {
    const SystemParams p(1.0, 100.0, 100.0, 0.4);
    const auto r = level_rates(p);
    const double l = 3.0;
    const auto series = evolve(p, PulseTrain::continuous(l), excited, 1.5, 1e-3, {false, false, false});
    const Matrix2 h{{{complex(0.0, -r.gamma0), -l}, {-l, complex(0.0, -r.gamma1)}}};
    for (std::size_t k = 0; k < series.size(); k += 300) {
        const Matrix2 u = propagator(h, series.times[k]);
        CHECK(std::abs(series.values[k].c0 - u[0][1]) < 1e-9);
        CHECK(std::abs(series.values[k].c1 - u[1][1]) < 1e-9);
    }
}

TEST_CASE("steps land on every pulse edge") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto train = PulseTrain::pulsed(2.0, 0.0105, 0.0333, 10, 0.0017);
    const auto series = evolve(p, train, excited, 0.3, 5e-4);
    auto has = [&](double t) {
        for (double s : series.times)
            if (std::abs(s - t) < 1e-13) return true;
        return false;
    };
    for (std::size_t n = 0; n < train.count(); ++n) {
        if (train.pulse_start(n) > 0.3) break;
        CHECK(has(train.pulse_start(n)));
        if (train.pulse_start(n) + train.tau_on() < 0.3) CHECK(has(train.pulse_start(n) + train.tau_on()));
    }
    for (std::size_t k = 1; k < series.size(); ++k) CHECK(series.times[k] > series.times[k - 1]);
}

TEST_CASE("norm never grows while every rate is positive") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto train = PulseTrain::with_duty(5.0, 0.02, 0.1, 600);
    const auto series = evolve(p, train, excited, 10.0, 1e-3);
    for (std::size_t k = 1; k < series.size(); ++k) {
        CHECK(series.values[k].norm() <= series.values[k - 1].norm() + 1e-12);
    }
}

TEST_CASE("measurement correction changes the dynamics") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto train = PulseTrain::continuous(5.0);
    const auto on = evolve(p, train, excited, 4.0, 1e-3, {true, false, true});
    const auto off = evolve(p, train, excited, 4.0, 1e-3, {false, false, false});
    // late-time decay is suppressed towards the small asymptote
    CHECK(on.values.back().norm() > off.values.back().norm());
}

TEST_CASE("off-diagonal correction is opt-in and resonance-only") {
    const SystemParams p(1.0, 20.0, 20.0);
    const auto train = PulseTrain::continuous(1.0);
    const auto plain = evolve(p, train, excited, 0.5, 1e-4);
    const auto full = evolve(p, train, excited, 0.5, 1e-4, {true, true, true});
    CHECK(std::abs(plain.values.back().c1 - full.values.back().c1) > 1e-8);
    CHECK_THROWS_AS(evolve(SystemParams(1.0, 20.0, 50.0), PulseTrain::continuous(1.0), excited, 0.5,
                           1e-4, {true, true, false}),
                    RegimeError);
}

TEST_CASE("invalid integration requests") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto train = PulseTrain::continuous(5.0);
    CHECK(max_stable_step(p, train) == doctest::Approx(0.002));
    CHECK_THROWS_AS(evolve(p, train, excited, 1.0, 0.01), ConfigError);
    CHECK_THROWS_AS(evolve(p, train, TwoLevelState{1.0, 1.0}, 1.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(evolve(p, train, excited, -1.0, 1e-3), ConfigError);
    const auto empty = evolve(p, train, excited, 0.0, 1e-3);
    CHECK(empty.size() == 1);
}

TEST_CASE("reactivation growth must be allowed explicitly") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto train = PulseTrain::with_duty(5.0, 0.15, 0.8, 200);
    CHECK_THROWS_AS(evolve(p, train, excited, 5.0, 5e-4), NumericalError);
    const auto grown = evolve(p, train, excited, 5.0, 5e-4, {true, false, true});
    CHECK(grown.values.back().norm() > 1.0);
}

TEST_CASE("trace series keeps time strictly increasing") {
    TraceSeries<double> s;
    s.push(0.0, 1.0);
    s.push(0.5, 2.0);
    CHECK_THROWS_AS(s.push(0.5, 3.0), std::logic_error);
    CHECK(s.size() == 2);
}

TEST_CASE("closed-form propagator") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix2 h{};
        for (auto& row : h)
            for (auto& x : row) x = complex(u(rng), u(rng));
        const double t = 0.5 + 0.5 * std::abs(u(rng));
        CHECK(max_diff(propagator(h, t), series_exp(h, t)) < 1e-10);
    }
    const Matrix2 sx{{{0.0, 1.0}, {1.0, 0.0}}};
    const Matrix2 u0 = propagator(sx, 0.0);
    CHECK(max_diff(u0, Matrix2{{{1.0, 0.0}, {0.0, 1.0}}}) == 0.0);
    CHECK(max_diff(multiply(propagator(sx, 0.3), propagator(sx, 0.4)), propagator(sx, 0.7)) < 1e-15);
    // degenerate eigenvalues (nilpotent part)
    const Matrix2 jordan{{{1.0, 1.0}, {0.0, 1.0}}};
    CHECK(max_diff(propagator(jordan, 0.8), series_exp(jordan, 0.8)) < 1e-12);
}

TEST_CASE("Zeno baseline survival") {
    const Matrix2 sx{{{0.0, 1.0}, {1.0, 0.0}}};
    const Vector2 ground{1.0, 0.0};
    CHECK(zeno_baseline(sx, ground, 0.01, 100) ==
          doctest::Approx(std::pow(std::cos(0.01), 200)).epsilon(1e-13));
    CHECK(zeno_baseline(sx, ground, 0.3, 1) == doctest::Approx(std::pow(std::cos(0.3), 2)).epsilon(1e-14));
    CHECK(zeno_baseline(sx, ground, 0.3, 0) == 1.0);
    double previous = 0.0;
    for (long n = 10; n <= 2000; n *= 2) {
        const double p = zeno_baseline(sx, ground, 1.0 / static_cast<double>(n), n);
        CHECK(p > previous);
        previous = p;
    }
    const Matrix2 decay{{{complex(0.0, -0.35), 0.0}, {0.0, 0.0}}};
    for (long n : {1L, 7L, 100L, 1000L}) {
        CHECK(zeno_baseline(decay, ground, 2.0 / static_cast<double>(n), n) ==
              doctest::Approx(std::exp(-1.4)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(zeno_baseline(sx, ground, 0.1, -1), ConfigError);
}

TEST_CASE("Hamiltonian moments split Hermitian and anti-Hermitian parts") {
    const Vector2 ground{1.0, 0.0};
    const Matrix2 sx{{{0.0, 1.0}, {1.0, 0.0}}};
    const auto m = hamiltonian_moments(sx, ground);
    CHECK(std::abs(m.va) < 1e-15);
    CHECK(std::abs(m.vh2 - 1.0) < 1e-15);
    CHECK(std::abs(m.va2) < 1e-15);
    const Matrix2 decay{{{complex(0.0, -0.5), 0.0}, {0.0, 0.0}}};
    const auto d = hamiltonian_moments(decay, ground);
    CHECK(std::abs(d.va - complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(d.vh2) < 1e-15);
    CHECK(std::abs(d.va2 - (-0.5)) < 1e-15);
    CHECK(std::abs(d.v2 - d.vh2 - d.va2) < 1e-15);
}
