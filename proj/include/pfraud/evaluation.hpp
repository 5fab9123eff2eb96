#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfraud/prediction.hpp"
#include "pfraud/timeline.hpp"

namespace pfraud {

/// Ranking quality: P(random positive outranks random negative), ties count
/// one half. nullopt unless both classes are present.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);
std::optional<double> roc_auc(const ScoreSeries& series);

/// Sum over descending distinct score thresholds of (R_k - R_{k-1}) * P_k.
/// Tied scores share one threshold. nullopt when there are no positives.
std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);
std::optional<double> average_precision(const ScoreSeries& series);

/// Imbalance buckets by full-timeline fraud proportion p.
enum class Group { G1, G2, G3, G4 };
inline constexpr std::array<Group, 4> kAllGroups{Group::G1, Group::G2, Group::G3, Group::G4};

std::string_view group_label(Group g) noexcept;
/// "P<=1%", "1%<P<=5%", ...
std::string_view group_range(Group g) noexcept;
Group parse_group(std::string_view text);

/// G1: p <= 1%, G2: (1%, 5%], G3: (5%, 10%], G4: (10%, 20%]. Clients with no
/// fraud or p > 20% belong to no group. Compared in exact integer arithmetic.
std::optional<Group> classify(std::size_t frauds, std::size_t transactions) noexcept;

/// Client ids per group, in input order.
std::map<Group, std::vector<std::string>> group_clients(std::span<const EventTimeline> timelines);

/// At most `count` ids drawn without replacement under `seed`, returned in
/// ascending id order. Identical across platforms.
std::vector<std::string> sample_clients(std::vector<std::string> ids, std::size_t count, std::uint64_t seed);

enum class Metric { Auc, Ap };
std::string_view metric_label(Metric m) noexcept;

struct ClientMetrics {
    std::string client_id;
    Group group = Group::G1;
    ModelName model = ModelName::NaiveStatic;
    std::optional<double> auc;
    std::optional<double> ap;
};

struct MetricSummary {
    ModelName model = ModelName::NaiveStatic;
    Group group = Group::G1;
    Metric metric = Metric::Auc;
    std::size_t count = 0;     ///< Clients with a defined value.
    std::size_t excluded = 0;  ///< Clients whose metric was undefined.
    double max = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double std = 0.0;  ///< Population standard deviation.
};

struct EvaluationReport {
    std::vector<MetricSummary> summaries;
    /// (MAP_model - MAP_naive) / MAP_naive per Poisson model and group.
    std::map<std::pair<ModelName, Group>, double> relative_map;
    /// Cells left out of the summaries, e.g. every client undefined.
    std::vector<std::string> diagnostics;

    const MetricSummary* find(ModelName model, Group group, Metric metric) const;
};

double relative_variation(double map_model, double map_naive);

/// Max/mean/min/std per (model, group, metric) and the relative-MAP table
/// against NaiveStatic. Rows follow model, then group, then metric order.
EvaluationReport summarize(std::span<const ClientMetrics> per_client);

}  // namespace pfraud
