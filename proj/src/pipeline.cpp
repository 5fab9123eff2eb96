#include "pfraud/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace pfraud {

void parallel_for(std::size_t n, unsigned parallelism, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, parallelism), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(std::span<const EventTimeline> timelines, const ExperimentConfig& config) {
    if (config.models.empty()) throw std::invalid_argument("no models requested");
    ExperimentResult result;

    std::unordered_map<std::string, const EventTimeline*> by_id;
    for (const auto& tl : timelines) by_id.emplace(tl.client_id(), &tl);

    // Eligible clients, sampled per group, in group then id order.
    struct Job {
        const EventTimeline* timeline;
        Group group;
    };
    std::vector<Job> jobs;
    const auto groups = group_clients(timelines);
    for (const auto& [group, ids] : groups) {
        std::vector<std::string> usable;
        for (const auto& id : ids) {
            if (by_id.at(id)->size() < 2) {
                result.diagnostics.push_back(id + ": fewer than two transactions, skipped");
                continue;
            }
            usable.push_back(id);
        }
        result.group_sizes[group] = usable.size();
        // Independent draw per group so adding a group leaves the others unchanged.
        const auto sample =
            sample_clients(std::move(usable), config.group_sample, config.seed + static_cast<std::uint64_t>(group));
        for (const auto& id : sample) jobs.push_back({by_id.at(id), group});
    }
    if (jobs.empty()) throw std::runtime_error("no eligible clients: every client has no fraud or a fraud proportion above 20%");

    const std::size_t m = config.models.size();
    result.outcomes.resize(jobs.size() * m);
    parallel_for(jobs.size() * m, config.parallelism, [&](std::size_t cell) {
        const Job& job = jobs[cell / m];
        const ModelName model = config.models[cell % m];
        ClientOutcome& out = result.outcomes[cell];
        out.client_id = job.timeline->client_id();
        out.group = job.group;
        out.model = model;
        try {
            const ScoreSeries s = predict_model(model, *job.timeline, config.split, config.window, config.estimation);
            out.auc = roc_auc(s);
            out.ap = average_precision(s);
            out.zero_convention = s.zero_convention_fits > 0;
            out.converged = s.unconverged_fits == 0;
            out.test_size = s.scores.size();
            out.clamped_steps = s.clamped_steps;
            out.failed_steps = s.failed_steps;
        } catch (const std::exception& e) {
            out.error = e.what();
            out.converged = false;
        }
    });

    std::vector<ClientMetrics> metrics;
    metrics.reserve(result.outcomes.size());
    for (const auto& o : result.outcomes) {
        if (!o.error.empty()) {
            result.diagnostics.push_back(o.client_id + " " + std::string(model_label(o.model)) + ": " + o.error);
            continue;
        }
        if (o.failed_steps > 0)
            result.diagnostics.push_back(o.client_id + " " + std::string(model_label(o.model)) + ": " +
                                         std::to_string(o.failed_steps) + " refits failed, scored 0");
        metrics.push_back({o.client_id, o.group, o.model, o.auc, o.ap});
    }
    result.report = summarize(metrics);
    for (const auto& d : result.report.diagnostics) result.diagnostics.push_back(d);
    return result;
}

std::vector<ClientFit> fit_clients(std::span<const EventTimeline> timelines, Family family,
                                   const std::optional<SplitSpec>& split_spec, const EstimationOptions& options,
                                   unsigned parallelism) {
    std::vector<ClientFit> out(timelines.size());
    parallel_for(timelines.size(), parallelism, [&](std::size_t i) {
        const EventTimeline& tl = timelines[i];
        out[i].client_id = tl.client_id();
        try {
            const EventTimeline train = split_spec ? split(tl, *split_spec).train : tl;
            const auto frauds = fraud_times(train);
            out[i].fit = fit_family(family, frauds, train.horizon(), options);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

std::vector<ScoreSeries> predict_clients(std::span<const EventTimeline> timelines, ModelName model,
                                         const SplitSpec& split_spec, const WindowPolicy& window,
                                         const EstimationOptions& options, unsigned parallelism,
                                         std::vector<std::string>* diagnostics) {
    std::vector<std::optional<ScoreSeries>> slots(timelines.size());
    std::vector<std::string> errors(timelines.size());
    parallel_for(timelines.size(), parallelism, [&](std::size_t i) {
        try {
            slots[i] = predict_model(model, timelines[i], split_spec, window, options);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    std::vector<ScoreSeries> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) out.push_back(std::move(*slots[i]));
        else if (diagnostics) diagnostics->push_back(timelines[i].client_id() + ": " + errors[i]);
    }
    return out;
}

}  // namespace pfraud
