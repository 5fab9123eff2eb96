#include "pfraud/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace pfraud {

std::string_view label_mode_name(LabelMode m) noexcept { return m == LabelMode::Merged ? "merged" : "interval"; }

LabelMode parse_label_mode(std::string_view text) {
    if (text == "merged") return LabelMode::Merged;
    if (text == "interval") return LabelMode::Interval;
    throw std::invalid_argument("label mode must be 'merged' or 'interval', got '" + std::string(text) + "'");
}

void SimSpec::validate() const {
    if (!(genuine_rate > 0.0) || !std::isfinite(genuine_rate)) throw std::invalid_argument("genuine_rate must be > 0");
    if (!(horizon_days > 0.0) || !std::isfinite(horizon_days)) throw std::invalid_argument("horizon_days must be > 0");
    if (fraud_model.horizon() != horizon_days)
        throw std::invalid_argument("fraud model horizon must equal horizon_days");
}

std::vector<double> simulate_hpp(double rate, double horizon, Philox4x32& rng) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("simulate_hpp: rate must be finite and >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_hpp: horizon must be > 0");
    std::vector<double> out;
    if (rate == 0.0) return out;
    for (double t = rng.exponential(rate); t <= horizon; t += rng.exponential(rate)) out.push_back(t);
    return out;
}

std::vector<double> simulate_hpp(double rate, double horizon, std::uint64_t seed) {
    Philox4x32 rng(seed);
    return simulate_hpp(rate, horizon, rng);
}

double intensity_majorant(const IntensityModel& model) {
    const auto p = model.poly();
    const double T = model.horizon();
    double m = std::max(model.evaluate(0.0), model.evaluate(T));
    if (p.c != 0.0) {
        const double vertex = -p.b / (2.0 * p.c);
        if (vertex > 0.0 && vertex < T) m = std::max(m, model.evaluate(vertex));
    }
    return std::max(m, 0.0);
}

std::vector<double> simulate_nhpp(const IntensityModel& model, Philox4x32& rng) {
    const double T = model.horizon();
    if (!(T > 0.0)) throw std::invalid_argument("simulate_nhpp: model horizon must be > 0");
    const double majorant = intensity_majorant(model);
    std::vector<double> out;
    if (majorant == 0.0) return out;
    for (double t = rng.exponential(majorant); t <= T; t += rng.exponential(majorant))
        if (rng.uniform() * majorant < model.evaluate(t)) out.push_back(t);
    return out;
}

std::vector<double> simulate_nhpp(const IntensityModel& model, std::uint64_t seed) {
    Philox4x32 rng(seed);
    return simulate_nhpp(model, rng);
}

EventTimeline simulate_client(const SimSpec& spec, std::size_t index) {
    const std::uint64_t stream = 2 * static_cast<std::uint64_t>(spec.first_index + index);
    Philox4x32 genuine_rng(spec.seed, stream);
    Philox4x32 fraud_rng(spec.seed, stream + 1);
    const auto genuine = simulate_hpp(spec.genuine_rate, spec.horizon_days, genuine_rng);
    const auto frauds = simulate_nhpp(spec.fraud_model, fraud_rng);

    std::vector<double> times{0.0};
    std::vector<std::uint8_t> labels{0};
    if (spec.label_mode == LabelMode::Merged) {
        times.reserve(1 + genuine.size() + frauds.size());
        std::size_t g = 0, f = 0;
        while (g < genuine.size() || f < frauds.size()) {
            const bool take_fraud = g == genuine.size() || (f < frauds.size() && frauds[f] < genuine[g]);
            double t = take_fraud ? frauds[f++] : genuine[g++];
            // Coincident draws are vanishingly rare; keep the order strict anyway.
            if (t <= times.back()) t = std::nextafter(times.back(), INFINITY);
            if (t > spec.horizon_days) break;
            times.push_back(t);
            labels.push_back(take_fraud ? 1 : 0);
        }
    } else {
        std::size_t f = 0;
        for (double t : genuine) {
            bool hit = false;
            while (f < frauds.size() && frauds[f] <= t) {
                hit = true;
                ++f;
            }
            times.push_back(t);
            labels.push_back(hit ? 1 : 0);
        }
    }
    return EventTimeline(spec.client_prefix + std::to_string(spec.first_index + index), std::move(times),
                         std::move(labels), spec.horizon_days);
}

std::vector<EventTimeline> simulate_dataset(const SimSpec& spec, unsigned parallelism) {
    spec.validate();
    std::vector<std::optional<EventTimeline>> slots(spec.n_clients);
    const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(spec.n_clients)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < spec.n_clients; ++i) slots[i] = simulate_client(spec, i);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < spec.n_clients; i += workers) slots[i] = simulate_client(spec, i);
            });
    }
    std::vector<EventTimeline> out;
    out.reserve(spec.n_clients);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

double genuine_rate_for_proportion(const IntensityModel& fraud_model, double target) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target proportion must lie in (0, 1)");
    const double T = fraud_model.horizon();
    if (!(T > 0.0)) throw std::invalid_argument("fraud model horizon must be > 0");
    const double mean_rate = fraud_model.compensator(T) / T;
    if (!(mean_rate > 0.0)) throw std::invalid_argument("fraud model has no mass");
    return mean_rate * (1.0 - target) / target;
}

std::string manifest_json(const SimSpec& spec, EpochMicros origin) {
    const auto params = spec.fraud_model.params();
    nlohmann::ordered_json j;
    j["generator"] = Philox4x32::name;
    j["seed"] = spec.seed;
    j["n_clients"] = spec.n_clients;
    j["first_index"] = spec.first_index;
    j["client_prefix"] = spec.client_prefix;
    j["genuine_rate"] = spec.genuine_rate;
    j["horizon_days"] = spec.horizon_days;
    j["label_mode"] = label_mode_name(spec.label_mode);
    j["fraud_model"] = {{"family", family_name(spec.fraud_model.family())},
                        {"params", std::vector<double>(params.begin(), params.end())}};
    j["origin"] = format_timestamp(origin);
    return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const SimSpec& spec, EpochMicros origin) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << manifest_json(spec, origin) << '\n';
}

}  // namespace pfraud
