#include "pfraud/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pfraud/random.hpp"

namespace pfraud {

namespace {

void check_aligned(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
}

// Indices ordered by descending score; ties keep input order.
std::vector<std::size_t> descending(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });
    return idx;
}

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_aligned(scores, labels);
    auto idx = descending(scores);
    std::reverse(idx.begin(), idx.end());
    // Ascending tie groups: a positive beats every negative below its group
    // and half of those tied with it. Counts stay integral (doubled).
    std::uint64_t twice_wins = 0, negatives_below = 0, positives = 0;
    for (std::size_t start = 0; start < idx.size();) {
        std::size_t end = start;
        std::uint64_t pos = 0, neg = 0;
        while (end < idx.size() && scores[idx[end]] == scores[idx[start]]) {
            (labels[idx[end]] == 1 ? pos : neg) += 1;
            ++end;
        }
        twice_wins += pos * (2 * negatives_below + neg);
        negatives_below += neg;
        positives += pos;
        start = end;
    }
    const std::uint64_t negatives = negatives_below;
    if (positives == 0 || negatives == 0) return std::nullopt;
    return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::optional<double> roc_auc(const ScoreSeries& series) { return roc_auc(series.scores, series.labels); }

std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_aligned(scores, labels);
    const auto total_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
    if (total_pos == 0) return std::nullopt;
    const auto idx = descending(scores);
    double ap = 0.0;
    std::size_t tp = 0, seen = 0;
    for (std::size_t start = 0; start < idx.size();) {
        std::size_t end = start, pos = 0;
        while (end < idx.size() && scores[idx[end]] == scores[idx[start]]) {
            if (labels[idx[end]] == 1) ++pos;
            ++end;
        }
        tp += pos;
        seen = end;
        if (pos > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(seen);
            const double recall_step = static_cast<double>(pos) / static_cast<double>(total_pos);
            ap += recall_step * precision;
        }
        start = end;
    }
    return ap;
}

std::optional<double> average_precision(const ScoreSeries& series) {
    return average_precision(series.scores, series.labels);
}

std::string_view group_label(Group g) noexcept {
    switch (g) {
        case Group::G1: return "G1";
        case Group::G2: return "G2";
        case Group::G3: return "G3";
        case Group::G4: return "G4";
    }
    return "?";
}

std::string_view group_range(Group g) noexcept {
    switch (g) {
        case Group::G1: return "P<=1%";
        case Group::G2: return "1%<P<=5%";
        case Group::G3: return "5%<P<=10%";
        case Group::G4: return "10%<P<=20%";
    }
    return "?";
}

Group parse_group(std::string_view text) {
    for (Group g : kAllGroups)
        if (group_label(g) == text) return g;
    throw std::invalid_argument("unknown group '" + std::string(text) + "'");
}

std::optional<Group> classify(std::size_t frauds, std::size_t transactions) noexcept {
    if (frauds == 0 || transactions == 0) return std::nullopt;
    const std::size_t k = frauds, n = transactions;
    if (100 * k <= n) return Group::G1;
    if (100 * k <= 5 * n) return Group::G2;
    if (10 * k <= n) return Group::G3;
    if (5 * k <= n) return Group::G4;
    return std::nullopt;
}

std::map<Group, std::vector<std::string>> group_clients(std::span<const EventTimeline> timelines) {
    std::map<Group, std::vector<std::string>> out;
    for (const auto& tl : timelines)
        if (auto g = classify(tl.fraud_count(), tl.size())) out[*g].push_back(tl.client_id());
    return out;
}

std::vector<std::string> sample_clients(std::vector<std::string> ids, std::size_t count, std::uint64_t seed) {
    if (ids.size() > count) {
        // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
        Philox4x32 rng(seed, 0x5a3c1e);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
            std::swap(ids[i], ids[j]);
        }
        ids.resize(count);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string_view metric_label(Metric m) noexcept { return m == Metric::Auc ? "AUC" : "AP"; }

const MetricSummary* EvaluationReport::find(ModelName model, Group group, Metric metric) const {
    for (const auto& s : summaries)
        if (s.model == model && s.group == group && s.metric == metric) return &s;
    return nullptr;
}

double relative_variation(double map_model, double map_naive) {
    if (!(map_naive > 0.0)) throw std::invalid_argument("relative variation needs a positive baseline MAP");
    return (map_model - map_naive) / map_naive;
}

EvaluationReport summarize(std::span<const ClientMetrics> per_client) {
    EvaluationReport report;
    for (ModelName model : kAllModels) {
        for (Group group : kAllGroups) {
            for (Metric metric : {Metric::Auc, Metric::Ap}) {
                std::vector<double> values;
                std::size_t excluded = 0, seen = 0;
                for (const auto& c : per_client) {
                    if (c.model != model || c.group != group) continue;
                    ++seen;
                    const auto& v = metric == Metric::Auc ? c.auc : c.ap;
                    if (v) values.push_back(*v);
                    else ++excluded;
                }
                if (seen == 0) continue;
                if (values.empty()) {
                    report.diagnostics.push_back(std::string(model_label(model)) + " " + std::string(group_label(group)) +
                                                 " " + std::string(metric_label(metric)) + ": no client with a defined value");
                    continue;
                }
                MetricSummary s;
                s.model = model;
                s.group = group;
                s.metric = metric;
                s.count = values.size();
                s.excluded = excluded;
                s.max = *std::max_element(values.begin(), values.end());
                s.min = *std::min_element(values.begin(), values.end());
                const double n = static_cast<double>(values.size());
                s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
                double ss = 0.0;
                for (double v : values) ss += (v - s.mean) * (v - s.mean);
                s.std = std::sqrt(ss / n);
                // Guard the invariant min <= mean <= max against rounding in the sum.
                s.mean = std::clamp(s.mean, s.min, s.max);
                report.summaries.push_back(s);
            }
        }
    }

    for (Group group : kAllGroups) {
        const MetricSummary* naive = report.find(ModelName::NaiveStatic, group, Metric::Ap);
        if (naive == nullptr) continue;
        if (!(naive->mean > 0.0)) {
            report.diagnostics.push_back(std::string("NaiveStatic ") + std::string(group_label(group)) +
                                         ": baseline MAP is 0, relative variation undefined");
            continue;
        }
        for (ModelName model : kAllModels) {
            if (model == ModelName::NaiveStatic) continue;
            if (const MetricSummary* s = report.find(model, group, Metric::Ap))
                report.relative_map[{model, group}] = relative_variation(s->mean, naive->mean);
        }
    }
    return report;
}

}  // namespace pfraud
