#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "pfraud/intensity.hpp"
#include "pfraud/timeline.hpp"

namespace pfraud {

/// Lower clamp applied to lambda(tau_i) inside the log-likelihood sum.
inline constexpr double kLogFloor = 1e-12;

struct EstimationOptions {
    int starts = 16;
    double diameter_tol = 1e-8;
    int max_iterations = 5000;
    double penalty = 1e6;
    /// Restarts from the selected optimum, each with the penalty scaled by 100.
    int polish_rounds = 2;
    /// Key for the Latin-hypercube start points.
    std::uint64_t start_seed = 0x9e3779b97f4a7c15ULL;
};

struct FitDiagnostics {
    /// k / tau_k, the mean-waiting-time estimate.
    std::optional<double> waiting_time_rate;
    /// k / T, the maximizer of the constant-rate likelihood on [0, T].
    std::optional<double> censored_rate;
    /// Every fraud sits at time 0, so the waiting-time estimate is undefined.
    bool degenerate_origin = false;
    int starts_run = 0;
    int starts_converged = 0;
    int total_iterations = 0;
    int best_start = -1;  ///< -1 when no optimizer ran.
};

struct FitResult {
    IntensityModel model = IntensityModel::zero(Family::Constant, 0.0);
    std::optional<double> log_likelihood;  ///< Omitted under the zero convention.
    bool converged = false;
    int iterations = 0;
    bool zero_convention = false;
    FitDiagnostics diagnostics;
};

/// l = -A(T) + sum_i log(max(lambda(tau_i), kLogFloor)).
/// Throws std::invalid_argument for infeasible parameters or fraud times
/// outside [0, T].
double log_likelihood(Family family, std::span<const double> params, std::span<const double> fraud_times,
                      double horizon);

/// Constant rate from the mean waiting time between frauds: k / tau_k.
/// No frauds gives the zero convention (rate 0). When every fraud sits at
/// time 0 the rate falls back to k / T.
FitResult estimate_hpp(const EventTimeline& train);
FitResult estimate_hpp(std::span<const double> fraud_times, double horizon);

/// Constrained maximum likelihood for the given family on [0, T] via
/// multi-start penalized Nelder-Mead followed by projection onto the feasible
/// set. Constant is accepted too and maximizes the likelihood numerically
/// (giving k / T). No frauds gives the zero convention.
FitResult estimate_nhpp(Family family, const EventTimeline& train, const EstimationOptions& options = {});
FitResult estimate_nhpp(Family family, std::span<const double> fraud_times, double horizon,
                        const EstimationOptions& options = {});

/// The fitting route each scoring model uses: waiting-time estimate for
/// Constant, constrained likelihood maximization otherwise.
FitResult fit_family(Family family, std::span<const double> fraud_times, double horizon,
                     const EstimationOptions& options = {});

}  // namespace pfraud
