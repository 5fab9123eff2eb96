#include "pfraud/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfraud/kernels.hpp"
#include "pfraud/nelder_mead.hpp"
#include "pfraud/random.hpp"

namespace pfraud {

namespace {

double compensator_at(const kernels::Poly& p, double t) {
    return t * (p.a + t * (0.5 * p.b + t * (p.c / 3.0)));
}

kernels::Poly to_poly(std::span<const double> params) {
    kernels::Poly p;
    p.a = params[0];
    if (params.size() > 1) p.b = params[1];
    if (params.size() > 2) p.c = params[2];
    return p;
}

double raw_log_likelihood(const kernels::Poly& p, std::span<const double> fraud_times, double horizon) {
    return -compensator_at(p, horizon) + kernels::sum_log_intensity(p, fraud_times, kLogFloor);
}

FitResult zero_result(Family family, double horizon) {
    FitResult r;
    r.model = IntensityModel::zero(family, horizon);
    r.converged = true;
    r.zero_convention = true;
    return r;
}

// Nearest feasible point, moving each coordinate independently: clip a and
// c at zero, then raise b to -a/T if the slope constraint is violated.
std::array<double, 3> project(Family family, std::array<double, 3> p, double horizon) {
    p[0] = std::max(p[0], 0.0);
    if (family == Family::Quadratic) p[2] = std::max(p[2], 0.0);
    if (family != Family::Constant && horizon > 0.0) p[1] = std::max(p[1], -p[0] * (1.0 / horizon));
    return p;
}

// Latin-hypercube sample of `count` points in the unit cube of dimension `dim`.
std::vector<std::array<double, 3>> latin_hypercube(std::size_t count, std::size_t dim, std::uint64_t seed) {
    Philox4x32 rng(seed, 0);
    std::vector<std::array<double, 3>> pts(count);
    std::vector<std::size_t> perm(count);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < count; ++i) perm[i] = i;
        for (std::size_t i = count; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        for (std::size_t i = 0; i < count; ++i)
            pts[i][d] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(count);
    }
    return pts;
}

void check_fraud_times(std::span<const double> fraud_times, double horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite and >= 0");
    for (std::size_t i = 0; i < fraud_times.size(); ++i) {
        if (!(fraud_times[i] >= 0.0) || fraud_times[i] > horizon)
            throw std::invalid_argument("fraud times must lie in [0, horizon]");
        if (i > 0 && fraud_times[i] < fraud_times[i - 1]) throw std::invalid_argument("fraud times must be ordered");
    }
}

}  // namespace

double log_likelihood(Family family, std::span<const double> params, std::span<const double> fraud_times,
                      double horizon) {
    if (!feasible(family, params, horizon))
        throw std::invalid_argument("log_likelihood: infeasible " + std::string(family_name(family)) + " parameters");
    check_fraud_times(fraud_times, horizon);
    return raw_log_likelihood(to_poly(params), fraud_times, horizon);
}

FitResult estimate_hpp(const EventTimeline& train) {
    const auto frauds = fraud_times(train);
    return estimate_hpp(frauds, train.horizon());
}

FitResult estimate_hpp(std::span<const double> fraud_times, double horizon) {
    check_fraud_times(fraud_times, horizon);
    if (fraud_times.empty()) return zero_result(Family::Constant, horizon);

    const auto k = static_cast<double>(fraud_times.size());
    const double last = fraud_times.back();
    FitResult r;
    r.diagnostics.censored_rate = horizon > 0.0 ? std::optional(k / horizon) : std::nullopt;

    double rate = 0.0;
    if (last > 0.0) {
        // The waits S_1 = tau_1, S_i = tau_i - tau_{i-1} telescope, so mean(S) = tau_k / k.
        rate = k / last;
        r.diagnostics.waiting_time_rate = rate;
        r.converged = true;
    } else {
        r.diagnostics.degenerate_origin = true;
        if (horizon > 0.0) {
            rate = k / horizon;
            r.converged = true;
        }
    }
    r.model = IntensityModel::constant(rate, horizon);
    if (r.converged) r.log_likelihood = raw_log_likelihood(r.model.poly(), fraud_times, horizon);
    return r;
}

FitResult estimate_nhpp(Family family, const EventTimeline& train, const EstimationOptions& options) {
    const auto frauds = fraud_times(train);
    return estimate_nhpp(family, frauds, train.horizon(), options);
}

FitResult estimate_nhpp(Family family, std::span<const double> fraud_times, double horizon,
                        const EstimationOptions& options) {
    check_fraud_times(fraud_times, horizon);
    if (fraud_times.empty()) return zero_result(family, horizon);

    const std::size_t dim = parameter_count(family);
    const auto k = static_cast<double>(fraud_times.size());
    FitResult result;
    result.diagnostics.censored_rate = horizon > 0.0 ? std::optional(k / horizon) : std::nullopt;
    if (fraud_times.back() > 0.0) result.diagnostics.waiting_time_rate = k / fraud_times.back();

    if (horizon == 0.0) {
        // All mass at the origin with no exposure: the likelihood is unbounded.
        result.model = IntensityModel::zero(family, horizon);
        result.diagnostics.degenerate_origin = true;
        return result;
    }
    if (fraud_times.back() == 0.0) result.diagnostics.degenerate_origin = true;

    // Work in units where the constant-rate optimum is a = 1; the slope
    // constraint b + a/T >= 0 then reads x_b + x_a >= 0.
    const std::array<double, 3> scale{k / horizon, k / (horizon * horizon), k / (horizon * horizon * horizon)};
    auto to_params = [&](std::span<const double> x) {
        std::array<double, 3> p{};
        for (std::size_t i = 0; i < dim; ++i) p[i] = x[i] * scale[i];
        return p;
    };
    auto true_ll = [&](const std::array<double, 3>& p) {
        return raw_log_likelihood({p[0], p[1], p[2]}, fraud_times, horizon);
    };
    auto make_objective = [&](double penalty) {
        return [&, penalty](std::span<const double> x) {
            const auto p = to_params(x);
            double violation = std::min(x[0], 0.0) * std::min(x[0], 0.0);
            if (dim > 1) {
                const double slope = std::min(x[0] + x[1], 0.0);
                violation += slope * slope;
            }
            if (dim > 2) violation += std::min(x[2], 0.0) * std::min(x[2], 0.0);
            return -true_ll(p) / k + penalty * violation;
        };
    };

    // Start points in scaled units.
    std::vector<std::array<double, 3>> starts;
    starts.push_back({1.0, 0.0, 0.0});
    if (result.diagnostics.waiting_time_rate) starts.push_back({horizon / fraud_times.back(), 0.0, 0.0});
    if (dim >= 2) {
        starts.push_back({2.0, -2.0, 0.0});  // decays to zero at T
        starts.push_back({0.0, 2.0, 0.0});   // grows from zero
    }
    if (dim >= 3) starts.push_back({0.0, 0.0, 3.0});
    const std::size_t wanted = static_cast<std::size_t>(std::max(options.starts, 1));
    if (starts.size() > wanted) starts.resize(wanted);
    if (starts.size() < wanted) {
        const auto cube = latin_hypercube(wanted - starts.size(), dim, options.start_seed);
        for (const auto& u : cube) starts.push_back({4.0 * u[0], dim > 1 ? 8.0 * u[1] - 4.0 : 0.0, dim > 2 ? 4.0 * u[2] : 0.0});
    }

    optim::NelderMeadOptions nm;
    nm.diameter_tol = options.diameter_tol;
    nm.max_iterations = options.max_iterations;
    const std::array<double, 3> steps{0.2, 0.2, 0.2};

    double best_ll = -std::numeric_limits<double>::infinity();
    std::array<double, 3> best{};
    bool best_converged = false;
    int best_iterations = 0;
    auto consider = [&](const std::array<double, 3>& params, int start, bool converged, int iterations) {
        const double ll = true_ll(params);
        if (ll > best_ll) {
            best_ll = ll;
            best = params;
            best_converged = converged;
            best_iterations = iterations;
            result.diagnostics.best_start = start;
        }
    };

    const auto objective = make_objective(options.penalty);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::span<const double> x0(starts[s].data(), dim);
        // The start itself is a candidate when feasible, so the result can
        // never fall below the constant-rate point.
        const auto p0 = to_params(x0);
        if (feasible(family, std::span<const double>(p0.data(), dim), horizon))
            consider(p0, static_cast<int>(s), false, 0);

        const auto r = optim::nelder_mead(objective, x0, std::span<const double>(steps.data(), dim), nm);
        ++result.diagnostics.starts_run;
        result.diagnostics.total_iterations += r.iterations;
        if (r.converged) ++result.diagnostics.starts_converged;
        consider(project(family, to_params(r.x), horizon), static_cast<int>(s), r.converged, r.iterations);
    }

    double penalty = options.penalty;
    for (int round = 0; round < options.polish_rounds; ++round) {
        penalty *= 100.0;
        std::array<double, 3> x0{};
        for (std::size_t i = 0; i < dim; ++i) x0[i] = best[i] / scale[i];
        const std::array<double, 3> small{0.02, 0.02, 0.02};
        const auto r = optim::nelder_mead(make_objective(penalty), std::span<const double>(x0.data(), dim),
                                          std::span<const double>(small.data(), dim), nm);
        result.diagnostics.total_iterations += r.iterations;
        const double before = best_ll;
        consider(project(family, to_params(r.x), horizon), result.diagnostics.best_start, r.converged || best_converged,
                 best_iterations + r.iterations);
        if (best_ll - before < 1e-12) break;
    }

    result.model = IntensityModel(family, std::span<const double>(best.data(), dim), horizon);
    result.log_likelihood = best_ll;
    result.converged = best_converged || result.diagnostics.starts_converged > 0;
    result.iterations = best_iterations;
    return result;
}

FitResult fit_family(Family family, std::span<const double> fraud_times, double horizon,
                     const EstimationOptions& options) {
    return family == Family::Constant ? estimate_hpp(fraud_times, horizon)
                                      : estimate_nhpp(family, fraud_times, horizon, options);
}

}  // namespace pfraud
