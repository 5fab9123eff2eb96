#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfraud/estimation.hpp"
#include "pfraud/intensity.hpp"
#include "pfraud/timeline.hpp"

namespace pfraud {

enum class ModelName {
    HomoStatic,
    HomoDynamic,
    LinearStatic,
    LinearDynamic,
    QuadraticStatic,
    QuadraticDynamic,
    NaiveStatic,
};

inline constexpr std::array<ModelName, 7> kAllModels{
    ModelName::HomoDynamic,     ModelName::HomoStatic,       ModelName::LinearDynamic, ModelName::LinearStatic,
    ModelName::QuadraticDynamic, ModelName::QuadraticStatic, ModelName::NaiveStatic,
};

std::string_view model_label(ModelName m) noexcept;
ModelName parse_model(std::string_view name);
bool is_dynamic(ModelName m) noexcept;
/// Intensity family behind a Poisson model; nullopt for NaiveStatic.
std::optional<Family> model_family(ModelName m) noexcept;

/// Scores for the test transactions of one client under one model.
struct ScoreSeries {
    std::string client_id;
    ModelName model = ModelName::NaiveStatic;
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;

    /// Steps where extrapolation gave a negative compensator increment,
    /// clamped to probability 0.
    std::size_t clamped_steps = 0;
    /// Dynamic steps whose refit threw; those score 0.
    std::size_t failed_steps = 0;
    /// Fits that ran under the zero convention (static: 0 or 1).
    std::size_t zero_convention_fits = 0;
    /// Fits that did not report convergence.
    std::size_t unconverged_fits = 0;
};

/// Probability of a fraud during (from, to]: 1 - exp(-(A(to) - A(from))).
/// Evaluation past the model horizon is allowed. A negative increment (an
/// extrapolated decreasing intensity) is clamped to 0 and reported through
/// `clamped`. Throws std::invalid_argument when to < from or from < 0.
double fraud_probability(const IntensityModel& model, double from, double to, bool* clamped = nullptr);

/// Scores each test transaction against the gap to its predecessor, starting
/// from the last training transaction. Genuine and fraudulent transactions
/// both advance the clock.
ScoreSeries predict_static(ModelName name, const FitResult& fit, const EventTimeline& train,
                           const EventTimeline& test);

struct WindowPolicy {
    enum class Kind { Expanding, Fixed } kind = Kind::Expanding;
    std::size_t size = 0;  ///< Transactions kept for Fixed.

    static WindowPolicy expanding() { return {}; }
    static WindowPolicy fixed(std::size_t n) { return {Kind::Fixed, n}; }
    /// "expanding" or "fixed:N".
    static WindowPolicy parse(std::string_view text);
    std::string to_string() const;
};

/// Refits before every test transaction on the window of transactions before
/// it, then scores the gap to that transaction. The expanding window holds
/// every earlier transaction; a fixed window holds the last N and is re-zeroed
/// at the transaction preceding it.
ScoreSeries predict_dynamic(ModelName name, const EventTimeline& full, std::size_t split_index,
                            const WindowPolicy& window = {}, const EstimationOptions& options = {});

/// Constant score equal to the training fraud proportion.
ScoreSeries predict_naive(const EventTimeline& train, const EventTimeline& test);

/// Runs any of the seven models on a timeline with the given split.
ScoreSeries predict_model(ModelName name, const EventTimeline& full, const SplitSpec& split_spec,
                          const WindowPolicy& window = {}, const EstimationOptions& options = {});

}  // namespace pfraud
