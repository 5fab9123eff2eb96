#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfraud/estimation.hpp"
#include "pfraud/evaluation.hpp"
#include "pfraud/prediction.hpp"
#include "pfraud/timeline.hpp"

namespace pfraud {

/// Runs body(i) for i in [0, n) on up to `parallelism` threads. Each index
/// runs exactly once; callers write results into slot i to keep order.
/// The first exception thrown by a body is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned parallelism, const std::function<void(std::size_t)>& body);

struct ExperimentConfig {
    SplitSpec split;
    WindowPolicy window;
    EstimationOptions estimation;
    std::vector<ModelName> models{kAllModels.begin(), kAllModels.end()};
    std::size_t group_sample = 500;  ///< Clients kept per group.
    std::uint64_t seed = 0;          ///< Drives client sampling.
    unsigned parallelism = 1;
};

/// One (client, model) cell of the per-client detail file.
struct ClientOutcome {
    std::string client_id;
    Group group = Group::G1;
    ModelName model = ModelName::NaiveStatic;
    std::optional<double> auc;
    std::optional<double> ap;
    bool zero_convention = false;  ///< Any fit fell back to the zero model.
    bool converged = true;         ///< Every fit reported convergence.
    std::size_t test_size = 0;
    std::size_t clamped_steps = 0;
    std::size_t failed_steps = 0;
    std::string error;  ///< Non-empty when the model could not run.
};

struct ExperimentResult {
    std::vector<ClientOutcome> outcomes;  ///< Client order, then model order.
    EvaluationReport report;
    std::map<Group, std::size_t> group_sizes;  ///< Eligible clients before sampling.
    std::vector<std::string> diagnostics;
};

/// Groups, samples, splits, scores and summarizes. Output is independent of
/// `parallelism`. Throws std::runtime_error when no client is eligible.
ExperimentResult run_experiment(std::span<const EventTimeline> timelines, const ExperimentConfig& config);

/// Fit of one client's training segment, or the whole timeline when
/// `split` is empty.
struct ClientFit {
    std::string client_id;
    FitResult fit;
    std::string error;
};

std::vector<ClientFit> fit_clients(std::span<const EventTimeline> timelines, Family family,
                                   const std::optional<SplitSpec>& split, const EstimationOptions& options,
                                   unsigned parallelism);

/// Scores of one model over every client with at least two transactions.
std::vector<ScoreSeries> predict_clients(std::span<const EventTimeline> timelines, ModelName model,
                                         const SplitSpec& split, const WindowPolicy& window,
                                         const EstimationOptions& options, unsigned parallelism,
                                         std::vector<std::string>* diagnostics = nullptr);

}  // namespace pfraud
