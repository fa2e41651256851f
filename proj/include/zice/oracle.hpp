#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "zice/errors.hpp"
#include "zice/model.hpp"

namespace zice {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 50;

    /// Throws ConfigError unless rel_tol, abs_tol > 0 and max_depth >= 10.
    void validate() const;
};

template <class T>
struct QuadResult {
    T value{};
    /// Sum of the per-panel Richardson error estimates.
    double error = 0.0;
    long evaluations = 0;
};

namespace detail {

template <class T, class F>
class SimpsonIntegrator {
public:
    SimpsonIntegrator(F& f, const QuadratureSpec& spec, double tol_density)
        : f_(f), spec_(spec), tol_density_(tol_density) {}

    T panel(double a, double b, T fa, T fm, T fb, T whole, int depth) {
        const double m = 0.5 * (a + b);
        const T flm = eval(0.5 * (a + m));
        const T frm = eval(0.5 * (m + b));
        const T left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
        const T right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
        const T delta = left + right - whole;
        const double err = std::abs(delta) / 15.0;
        if (err <= tol_density_ * (b - a) || (b - a) <= 1e-15 * std::max(1.0, std::abs(a))) {
            error_ += err;
            return left + right + delta / 15.0;
        }
        if (depth >= spec_.max_depth) {
            throw QuadratureError("adaptive Simpson: tolerance not reached within max_depth");
        }
        return panel(a, m, fa, flm, fm, left, depth + 1) + panel(m, b, fm, frm, fb, right, depth + 1);
    }

    T eval(double x) {
        ++evaluations_;
        return f_(x);
    }

    double error() const { return error_; }
    long evaluations() const { return evaluations_; }

private:
    F& f_;
    const QuadratureSpec& spec_;
    double tol_density_;
    double error_ = 0.0;
    long evaluations_ = 0;
};

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b], splitting first at every breakpoint
/// inside the interval (kinks and jumps of piecewise-smooth integrands).
///
/// The tolerance max(abs_tol, rel_tol |I|) is spread over the interval in proportion to
/// panel length; |I| comes from a composite pass of at least 16 panels per piece, and of
/// panels no wider than `max_panel_width` (set it below the period of oscillatory
/// integrands so the first pass cannot alias).
template <class F>
auto adaptive_simpson(F&& f, double a, double b, const QuadratureSpec& spec,
                      std::span<const double> breakpoints = {},
                      double max_panel_width = std::numeric_limits<double>::infinity()) {
    using T = std::decay_t<decltype(f(a))>;
    spec.validate();
    QuadResult<T> result;
    if (!(b > a)) {
        return result;
    }

    std::vector<double> edges{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            edges.push_back(p);
        }
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    constexpr long kMinPanels = 16;
    struct Panel {
        double a, b;
        T fa, fm, fb, whole;
    };
    std::vector<Panel> panels;
    T coarse{};
    long evaluations = 0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double lo = edges[e];
        const double width = edges[e + 1] - lo;
        const long n_panels = std::max(kMinPanels, static_cast<long>(std::ceil(width / max_panel_width)));
        const double h = width / static_cast<double>(n_panels);
        // one-sided samples at the piece ends keep jumps out of the panels
        T f_left = f(lo);
        ++evaluations;
        for (long k = 0; k < n_panels; ++k) {
            const double pa = lo + static_cast<double>(k) * h;
            const double pb = k + 1 == n_panels ? edges[e + 1] : lo + static_cast<double>(k + 1) * h;
            const T fm = f(0.5 * (pa + pb));
            const T fb = f(pb);
            evaluations += 2;
            const T whole = (f_left + 4.0 * fm + fb) * ((pb - pa) / 6.0);
            panels.push_back({pa, pb, f_left, fm, fb, whole});
            coarse += whole;
            f_left = fb;
        }
    }

    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(coarse));
    detail::SimpsonIntegrator<T, std::remove_reference_t<F>> integrator(f, spec, tol / (b - a));
    for (const Panel& p : panels) {
        result.value += integrator.panel(p.a, p.b, p.fa, p.fm, p.fb, p.whole, 0);
    }
    result.error = integrator.error();
    result.evaluations = evaluations + integrator.evaluations();
    return result;
}

/// In-window resummed brackets of the resonant kernels by direct quadrature:
///   vd  = (lambda/gamma) int_0^{gamma tau} e^{-y} sin(lambda y / gamma) dy  (kd(tau, tau) = -vd)
///   vod = (lambda/gamma) int_0^{gamma tau} e^{-y} cos(lambda y / gamma) dy  (ko(tau, tau) = vod)
/// For gamma = 0 the limit lambda int_0^tau sin/cos(lambda u) du is integrated instead.
struct ResummedBrackets {
    double vd;
    double vod;
};

ResummedBrackets quad_resummed(double tau, double amplitude, double gamma_j,
                               const QuadratureSpec& spec = {});

/// In-window large-detuning bracket by direct quadrature, to compare with xi(j, tau, tau):
///   ((-1)^j i lambda^2 / (gamma delta)) int_0^{gamma tau} e^{-y} e^{(-1)^j i lambda^2 y / (gamma delta)} dy
std::complex<double> quad_resummed_detuned(Level j, double tau, double amplitude, double gamma_j,
                                           double detuning, const QuadratureSpec& spec = {});

/// Second-order (in g) correction <j|V_d|j> + i gamma_j = i gamma_j I_j(t) with
///   I_j(t) = int_{t2 <= t1 <= t} g(t1) g(t2) e^{+-i delta (t1 - t2)} e^{gamma_j (t2 - t)},
/// '+' for |1>, '-' for |0>. The outer integral is adaptive Simpson split at pulse edges;
/// the inner one is exact on each constant-g segment. Pairs (t1, t2) from different
/// pulses are included.
std::array<std::complex<double>, 2> vd_second_order(const SystemParams& params,
                                                    const PulseTrain& train, double t,
                                                    const QuadratureSpec& spec = {});

/// Same double integral restricted to pairs inside one pulse, summed over pulses.
std::array<std::complex<double>, 2> vd_second_order_pulsewise(const SystemParams& params,
                                                              const PulseTrain& train, double t,
                                                              const QuadratureSpec& spec = {});

} // namespace zice
