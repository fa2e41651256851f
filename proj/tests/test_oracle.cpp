#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "zice/errors.hpp"
#include "zice/kernels.hpp"
#include "zice/oracle.hpp"

using namespace zice;

namespace {

/// (lambda/gamma) int_0^{gamma tau} e^{-y} (sin, cos)(a y) dy by antiderivative, a = lambda/gamma.
ResummedBrackets antiderivative(double tau, double l, double g) {
    const double a = l / g;
    const double y = g * tau;
    const double e = std::exp(-y);
    const double s = (a - e * (a * std::cos(a * y) + std::sin(a * y))) / (1.0 + a * a);
    const double c = (1.0 - e * (std::cos(a * y) - a * std::sin(a * y))) / (1.0 + a * a);
    return {a * s, a * c};
}

/// Plain nested adaptive Simpson of the second-order double integral.
std::array<complex, 2> brute_second_order(const SystemParams& params, const PulseTrain& train,
                                          double t) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    std::vector<double> edges;
    for (std::size_t n = 0; n < train.count(); ++n) {
        edges.push_back(train.pulse_start(n));
        edges.push_back(train.pulse_start(n) + train.tau_on());
    }
    const auto rates = level_rates(params);
    std::array<complex, 2> out{};
    for (Level j : {Level::Ground, Level::Excited}) {
        const double g = rates.of(j);
        const double sign = j == Level::Excited ? 1.0 : -1.0;
        auto outer = [&](double t1) -> complex {
            const double g1 = train.envelope(t1);
            if (g1 == 0.0) return 0.0;
            auto inner = [&](double t2) -> complex {
                return g1 * train.envelope(t2) *
                       std::polar(std::exp(g * (t2 - t)), sign * params.detuning() * (t1 - t2));
            };
            return adaptive_simpson(inner, train.start(), t1, spec, edges).value;
        };
        out[index(j)] = complex(0.0, g) * adaptive_simpson(outer, train.start(), t, spec, edges).value;
    }
    return out;
}

} // namespace

TEST_CASE("quadrature spec validation") {
    QuadratureSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.rel_tol = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.max_depth = 5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("adaptive Simpson integrates cubics exactly and smooth functions tightly") {
    const QuadratureSpec spec;
    auto cubic = [](double x) { return 2.0 * x * x * x - x + 1.0; };
    CHECK(adaptive_simpson(cubic, -1.0, 2.0, spec).value == doctest::Approx(9.0).epsilon(1e-14));
    auto e = [](double x) { return std::exp(x); };
    const auto r = adaptive_simpson(e, 0.0, 3.0, spec);
    CHECK(std::abs(r.value - std::expm1(3.0)) < 1e-10 * std::expm1(3.0));
    CHECK(r.error <= 1e-10 * std::expm1(3.0));
    CHECK(r.evaluations > 0);
    CHECK(adaptive_simpson(e, 1.0, 1.0, spec).value == 0.0);
}

TEST_CASE("tightening the tolerance shrinks the actual error") {
    auto f = [](double x) { return std::sin(7.0 * x) * std::exp(-x); };
    const double exact = (7.0 - std::exp(-4.0) * (7.0 * std::cos(28.0) + std::sin(28.0))) / 50.0;
    double previous = 1.0;
    for (double tol : {1e-4, 1e-7, 1e-10}) {
        QuadratureSpec spec;
        spec.rel_tol = tol;
        const auto r = adaptive_simpson(f, 0.0, 4.0, spec);
        const double err = std::abs(r.value - exact);
        CHECK(err <= 10.0 * tol * std::abs(exact));
        CHECK(err <= previous);
        previous = err;
    }
}

TEST_CASE("breakpoints resolve jumps") {
    auto step = [](double x) { return x <= 0.3 ? 1.0 : 0.0; };
    const double cut[] = {0.3};
    const auto r = adaptive_simpson(step, 0.0, 1.0, QuadratureSpec{}, cut);
    CHECK(r.value == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("unresolvable integrands raise QuadratureError") {
    QuadratureSpec spec;
    spec.max_depth = 10;
    auto spike = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.37)); };
    CHECK_THROWS_AS(adaptive_simpson(spike, 0.0, 1.0, spec), QuadratureError);
}

TEST_CASE("resummed brackets agree with the antiderivative") {
    for (double l : {0.5, 5.0, 20.0}) {
        for (double g : {0.1, 1.0, 2.0}) {
            for (double tau : {1e-3, 0.2, 1.5, 5.0}) {
                const auto q = quad_resummed(tau, l, g);
                const auto a = antiderivative(tau, l, g);
                CHECK(q.vd == doctest::Approx(a.vd).epsilon(1e-9));
                CHECK(q.vod == doctest::Approx(a.vod).epsilon(1e-9));
            }
        }
    }
    const auto zero = quad_resummed(0.0, 5.0, 0.5);
    CHECK(zero.vd == 0.0);
    CHECK(zero.vod == 0.0);
    const auto flat = quad_resummed(0.7, 5.0, 0.0);
    CHECK(flat.vd == doctest::Approx(1.0 - std::cos(3.5)).epsilon(1e-10));
    CHECK(flat.vod == doctest::Approx(std::sin(3.5)).epsilon(1e-10));
    CHECK_THROWS_AS(quad_resummed(-1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("detuned bracket agrees with its antiderivative") {
    const double l = 16.0;
    const double g = 0.5;
    const double dw = 50.0;
    for (Level j : {Level::Ground, Level::Excited}) {
        const double w = parity(j) * l * l / dw;
        for (double tau : {0.05, 1.0, 4.0}) {
            const complex z{-g, w};
            const complex expected = complex(0.0, w) * (std::exp(z * tau) - 1.0) / z;
            const complex q = quad_resummed_detuned(j, tau, l, g, dw);
            CHECK(std::abs(q - expected) < 1e-9 * std::abs(expected));
        }
    }
    CHECK_THROWS_AS(quad_resummed_detuned(Level::Excited, 1.0, 1.0, 1.0, 0.0), RegimeError);
}

TEST_CASE("second-order potential matches plain nested quadrature") {
    const SystemParams res(1.0, 100.0, 100.0, 0.3);
    const SystemParams det(1.0, 100.0, 140.0, 0.3);
    const auto train = PulseTrain::pulsed(0.7, 0.05, 0.12, 3, 0.01);
    for (const SystemParams* p : {&res, &det}) {
        for (double t : {0.035, 0.06, 0.2, 0.29, 0.5}) {
            const auto fast = vd_second_order(*p, train, t);
            const auto slow = brute_second_order(*p, train, t);
            for (int j = 0; j < 2; ++j) {
                CHECK(std::abs(fast[j] - slow[j]) < 1e-7 * std::abs(slow[j]));
            }
        }
    }
}

TEST_CASE("second order with continuous measurement and gamma -> small") {
    // I = lambda^2 t^2 / 2 when delta = 0 and gamma t << 1
    const SystemParams p(1e-6, 100.0, 100.0);
    const auto c = vd_second_order(p, PulseTrain::continuous(3.0), 0.4);
    const double g1 = 0.5e-6;
    CHECK(c[1].imag() == doctest::Approx(g1 * 9.0 * 0.08).epsilon(1e-5));
    CHECK(std::abs(c[1].real()) < 1e-12);
    CHECK(c[0] == complex(0.0, 0.0));
}

TEST_CASE("pulse-wise pairing drops cross-pulse terms only") {
    const SystemParams p(1.0, 100.0, 100.0);
    const auto single = PulseTrain::pulsed(2.0, 0.05, 0.2, 1);
    for (double t : {0.03, 0.05, 0.4}) {
        const auto a = vd_second_order(p, single, t);
        const auto b = vd_second_order_pulsewise(p, single, t);
        CHECK(std::abs(a[1] - b[1]) < 1e-14 * std::abs(a[1]));
    }
    const auto pair = PulseTrain::pulsed(2.0, 0.05, 0.2, 2);
    const auto a = vd_second_order(p, pair, 0.25);
    const auto b = vd_second_order_pulsewise(p, pair, 0.25);
    CHECK(std::abs(a[1]) > std::abs(b[1]));
    // for a short second pulse the pulse-wise value approaches the resummed kernel sum
    const PotentialSample s = diag_potential(p, pair, 0.25);
    const complex resummed = s.diagonal(Level::Excited) + complex(0.0, 0.5);
    CHECK(std::abs(resummed - b[1]) < 1e-2 * std::abs(b[1]));
}
