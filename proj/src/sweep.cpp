#include "zice/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "zice/errors.hpp"
#include "zice/oracle.hpp"

namespace zice {

namespace {

void check_axis(const std::vector<double>& axis, const char* name, double lo, double hi) {
    if (axis.empty()) {
        throw ConfigError(std::string("sweep: ") + name + " is empty");
    }
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!(axis[i] > lo && axis[i] <= hi)) {
            throw ConfigError(std::string("sweep: ") + name + " value out of range");
        }
        if (i > 0 && !(axis[i] > axis[i - 1])) {
            throw ConfigError(std::string("sweep: ") + name + " must be strictly increasing");
        }
    }
}

struct CellValue {
    double rate;
    double sigma;
};

CellValue evaluate_cell(const SystemParams& params, RegimeKind regime, const SweepRequest& req,
                        double duty, double tau_on) {
    const PulseTrain train = sweep_cell_train(req.amplitude, duty, tau_on, req.t_eval);
    if (req.phase == SamplePhase::InWindow) {
        const PotentialSample s = diag_potential(params, train, in_window_time(train, req.t_eval), regime);
        return {s.rate[1], s.sigma[1]};
    }
    const double period = train.period();
    const double lo = req.t_eval - 0.5 * period;
    const double hi = req.t_eval + 0.5 * period;
    std::vector<double> edges;
    for (std::size_t n = 0; n < train.count(); ++n) {
        const double tn = train.pulse_start(n);
        if (tn > hi) {
            break;
        }
        if (tn + tau_on >= lo) {
            edges.push_back(tn);
            edges.push_back(tn + tau_on);
        }
    }
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    spec.abs_tol = 1e-13;
    auto f = [&](double t) {
        const PotentialSample s = diag_potential(params, train, t, regime);
        return std::complex<double>(s.rate[1], s.sigma[1]);
    };
    const auto mean = adaptive_simpson(f, lo, hi, spec, edges).value / period;
    return {mean.real(), mean.imag()};
}

} // namespace

std::string to_string(SamplePhase phase) {
    return phase == SamplePhase::InWindow ? "in_window" : "average";
}

std::string to_string(Region region) {
    switch (region) {
    case Region::Decay:
        return "decay";
    case Region::Zeno:
        return "zeno";
    case Region::Reactivation:
        return "reactivation";
    }
    return "unknown";
}

Region classify_region(double rate1, double eps_z) {
    if (rate1 > eps_z) {
        return Region::Decay;
    }
    if (rate1 < -eps_z) {
        return Region::Reactivation;
    }
    return Region::Zeno;
}

PulseTrain sweep_cell_train(double amplitude, double duty, double tau_on, double t_eval) {
    const double period = tau_on / duty;
    const auto count = static_cast<std::size_t>(std::ceil(t_eval / period)) + 1;
    return PulseTrain::pulsed(amplitude, tau_on, period, count, 0.0);
}

double in_window_time(const PulseTrain& train, double t_eval) {
    const double half = 0.5 * train.tau_on();
    double n = std::round((t_eval - train.start() - half) / train.period());
    n = std::clamp(n, 0.0, static_cast<double>(train.count() - 1));
    return train.pulse_start(static_cast<std::size_t>(n)) + half;
}

SweepGrid run_sweep(const SystemParams& params, const SweepRequest& request) {
    check_axis(request.d_axis, "d_axis", 0.0, 1.0);
    check_axis(request.tau_axis, "tau_axis", 0.0, std::numeric_limits<double>::max());
    if (!(request.t_eval > 0.0) || !std::isfinite(request.t_eval)) {
        throw ConfigError("sweep: t_eval must be positive");
    }
    if (!(request.amplitude >= 0.0)) {
        throw ConfigError("sweep: amplitude must be >= 0");
    }
    const Regime regime = classify_regime(params, request.amplitude);
    if (regime.kind == RegimeKind::Unsupported) {
        throw RegimeError("sweep: " + regime.diagnostic);
    }

    SweepGrid grid;
    grid.d_axis = request.d_axis;
    grid.tau_axis = request.tau_axis;
    grid.t_eval = request.t_eval;
    grid.eps_z = request.eps_z.value_or(kZenoBandFraction * 2.0 * level_rates(params).gamma1);
    if (!(grid.eps_z >= 0.0)) {
        throw ConfigError("sweep: eps_z must be >= 0");
    }
    const std::size_t n_cells = grid.d_axis.size() * grid.tau_axis.size();
    grid.rate.resize(n_cells);
    grid.sigma.resize(n_cells);
    grid.region.resize(n_cells);

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t c = first; c < n_cells; c += stride) {
            const double duty = grid.d_axis[c / grid.tau_axis.size()];
            const double tau_on = grid.tau_axis[c % grid.tau_axis.size()];
            const CellValue v = evaluate_cell(params, regime.kind, request, duty, tau_on);
            grid.rate[c] = v.rate;
            grid.sigma[c] = v.sigma;
            grid.region[c] = classify_region(v.rate, grid.eps_z);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(request.threads, 1, std::max<std::size_t>(n_cells, 1));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(work, i, threads);
        }
    }

    for (double duty : grid.d_axis) {
        const double period = grid.tau_axis.back() / duty;
        if (request.t_eval < 10.0 * period) {
            std::ostringstream msg;
            msg << "D = " << duty << ": t_eval covers only " << request.t_eval / period
                << " periods at tau_on = " << grid.tau_axis.back();
            grid.warnings.push_back(msg.str());
        }
    }
    return grid;
}

std::vector<BoundaryPoint> extract_boundary(const SweepGrid& grid) {
    std::vector<BoundaryPoint> out;
    const std::size_t n_tau = grid.tau_axis.size();
    for (std::size_t d = 0; d < grid.d_axis.size(); ++d) {
        for (std::size_t k = 0; k + 1 < n_tau; ++k) {
            const double r0 = grid.rate_at(d, k);
            const double r1 = grid.rate_at(d, k + 1);
            if (r0 > 0.0 && r1 <= 0.0) {
                const double x0 = grid.tau_axis[k];
                const double x1 = grid.tau_axis[k + 1];
                out.push_back({grid.d_axis[d], x0 + (x1 - x0) * r0 / (r0 - r1)});
                break;
            }
        }
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

} // namespace zice
