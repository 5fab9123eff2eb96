#include "pfraud/prediction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "pfraud/kernels.hpp"

namespace pfraud {

std::string_view model_label(ModelName m) noexcept {
    switch (m) {
        case ModelName::HomoStatic: return "HomoStatic";
        case ModelName::HomoDynamic: return "HomoDynamic";
        case ModelName::LinearStatic: return "LinearStatic";
        case ModelName::LinearDynamic: return "LinearDynamic";
        case ModelName::QuadraticStatic: return "QuadraticStatic";
        case ModelName::QuadraticDynamic: return "QuadraticDynamic";
        case ModelName::NaiveStatic: return "NaiveStatic";
    }
    return "unknown";
}

ModelName parse_model(std::string_view name) {
    for (ModelName m : kAllModels)
        if (model_label(m) == name) return m;
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

bool is_dynamic(ModelName m) noexcept {
    return m == ModelName::HomoDynamic || m == ModelName::LinearDynamic || m == ModelName::QuadraticDynamic;
}

std::optional<Family> model_family(ModelName m) noexcept {
    switch (m) {
        case ModelName::HomoStatic:
        case ModelName::HomoDynamic: return Family::Constant;
        case ModelName::LinearStatic:
        case ModelName::LinearDynamic: return Family::Linear;
        case ModelName::QuadraticStatic:
        case ModelName::QuadraticDynamic: return Family::Quadratic;
        case ModelName::NaiveStatic: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

double probability_from_increment(double increment, bool& clamped) {
    clamped = increment < 0.0;
    if (clamped || increment == 0.0) return 0.0;
    return -std::expm1(-increment);
}

}  // namespace

double fraud_probability(const IntensityModel& model, double from, double to, bool* clamped) {
    if (!(from >= 0.0)) throw std::invalid_argument("fraud_probability: previous time must be >= 0");
    if (!(to >= from)) throw std::invalid_argument("fraud_probability: new transaction precedes the previous one");
    bool was_clamped = false;
    const double p = probability_from_increment(model.increment(from, to, Range::Extrapolate), was_clamped);
    if (clamped != nullptr) *clamped = was_clamped;
    return p;
}

ScoreSeries predict_static(ModelName name, const FitResult& fit, const EventTimeline& train,
                           const EventTimeline& test) {
    ScoreSeries out;
    out.client_id = test.client_id();
    out.model = name;
    out.labels.assign(test.labels().begin(), test.labels().end());
    out.zero_convention_fits = fit.zero_convention ? 1 : 0;
    out.unconverged_fits = fit.converged ? 0 : 1;
    if (test.empty()) return out;
    if (train.empty()) throw std::invalid_argument("predict_static: empty training segment");

    const auto times = test.times();
    if (times.front() < train.times().back())
        throw std::invalid_argument("predict_static: test transactions precede the training segment");

    std::vector<double> from(times.size());
    from[0] = train.times().back();
    std::copy(times.begin(), times.end() - 1, from.begin() + 1);
    std::vector<double> increments(times.size());
    kernels::compensator_increments(fit.model.poly(), from, times, increments);

    out.scores.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        bool clamped = false;
        out.scores[j] = probability_from_increment(increments[j], clamped);
        if (clamped) ++out.clamped_steps;
    }
    return out;
}

WindowPolicy WindowPolicy::parse(std::string_view text) {
    if (text == "expanding") return expanding();
    constexpr std::string_view prefix = "fixed:";
    if (text.substr(0, prefix.size()) == prefix) {
        std::size_t n = 0;
        auto digits = text.substr(prefix.size());
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && n > 0) return fixed(n);
    }
    throw std::invalid_argument("window must be 'expanding' or 'fixed:N' with N > 0, got '" + std::string(text) + "'");
}

std::string WindowPolicy::to_string() const {
    return kind == Kind::Expanding ? "expanding" : "fixed:" + std::to_string(size);
}

ScoreSeries predict_dynamic(ModelName name, const EventTimeline& full, std::size_t split_index,
                            const WindowPolicy& window, const EstimationOptions& options) {
    const auto family = model_family(name);
    if (!family) throw std::invalid_argument("predict_dynamic: NaiveStatic has no intensity family");
    const std::size_t n = full.size();
    if (split_index < 1 || split_index >= n) throw std::invalid_argument("predict_dynamic: split index out of range");

    const auto times = full.times();
    const auto labels = full.labels();
    ScoreSeries out;
    out.client_id = full.client_id();
    out.model = name;
    out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(split_index), labels.end());
    out.scores.reserve(n - split_index);

    std::vector<double> frauds;
    for (std::size_t j = split_index; j < n; ++j) {
        std::size_t lo = 0;
        if (window.kind == WindowPolicy::Kind::Fixed && j > window.size) lo = j - window.size;
        const double origin = lo > 0 ? times[lo - 1] : 0.0;

        frauds.clear();
        for (std::size_t i = lo; i < j; ++i)
            if (labels[i] == 1) frauds.push_back(times[i] - origin);
        const double horizon = times[j - 1] - origin;

        double score = 0.0;
        try {
            const FitResult fit = fit_family(*family, frauds, horizon, options);
            if (fit.zero_convention) ++out.zero_convention_fits;
            if (!fit.converged) ++out.unconverged_fits;
            bool clamped = false;
            score = fraud_probability(fit.model, horizon, times[j] - origin, &clamped);
            if (clamped) ++out.clamped_steps;
        } catch (const std::exception&) {
            ++out.failed_steps;
            score = 0.0;
        }
        out.scores.push_back(score);
    }
    return out;
}

ScoreSeries predict_naive(const EventTimeline& train, const EventTimeline& test) {
    if (train.empty()) throw std::invalid_argument("predict_naive: empty training segment");
    ScoreSeries out;
    out.client_id = test.client_id();
    out.model = ModelName::NaiveStatic;
    out.labels.assign(test.labels().begin(), test.labels().end());
    const double proportion = static_cast<double>(train.fraud_count()) / static_cast<double>(train.size());
    out.scores.assign(test.size(), proportion);
    return out;
}

ScoreSeries predict_model(ModelName name, const EventTimeline& full, const SplitSpec& split_spec,
                          const WindowPolicy& window, const EstimationOptions& options) {
    const std::size_t k = train_size(full.size(), split_spec);
    if (is_dynamic(name)) return predict_dynamic(name, full, k, window, options);
    const auto parts = split(full, split_spec);
    if (name == ModelName::NaiveStatic) return predict_naive(parts.train, parts.test);
    const auto family = *model_family(name);
    const auto frauds = fraud_times(parts.train);
    return predict_static(name, fit_family(family, frauds, parts.train.horizon(), options), parts.train, parts.test);
}

}  // namespace pfraud
