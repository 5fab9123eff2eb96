#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pfraud/intensity.hpp"
#include "pfraud/random.hpp"
#include "pfraud/timeline.hpp"

namespace pfraud {

/// How fraud arrivals become labelled transactions.
///  Merged: frauds are their own transactions, merged with the genuine ones.
///  Interval: only genuine-clock transactions exist; one is labelled fraud
///  when a latent fraud arrival fell in the gap since the previous one.
enum class LabelMode { Merged, Interval };

std::string_view label_mode_name(LabelMode m) noexcept;
LabelMode parse_label_mode(std::string_view text);

struct SimSpec {
    std::size_t n_clients = 1;
    double genuine_rate = 1.0;  ///< Genuine transactions per day.
    IntensityModel fraud_model = IntensityModel::zero(Family::Constant, 1.0);
    double horizon_days = 1.0;
    std::uint64_t seed = 0;
    LabelMode label_mode = LabelMode::Merged;
    std::string client_prefix = "c";
    std::size_t first_index = 0;  ///< Index of the first client; names and streams follow it.

    /// Throws std::invalid_argument on non-positive rate/horizon or a fraud
    /// model whose horizon differs from horizon_days.
    void validate() const;
};

/// Event times of an HPP on [0, horizon]. rate 0 gives no events.
std::vector<double> simulate_hpp(double rate, double horizon, Philox4x32& rng);
std::vector<double> simulate_hpp(double rate, double horizon, std::uint64_t seed);

/// Event times on [0, model.horizon()] by thinning against the exact maximum
/// of the intensity on that interval.
std::vector<double> simulate_nhpp(const IntensityModel& model, Philox4x32& rng);
std::vector<double> simulate_nhpp(const IntensityModel& model, std::uint64_t seed);

/// Maximum of the intensity polynomial on [0, horizon].
double intensity_majorant(const IntensityModel& model);

/// Client `index` of a dataset. Every client opens with a genuine
/// transaction at t = 0; its horizon is horizon_days.
EventTimeline simulate_client(const SimSpec& spec, std::size_t index);

/// All clients, in index order. Same spec, same output, on any thread count.
std::vector<EventTimeline> simulate_dataset(const SimSpec& spec, unsigned parallelism = 1);

/// Genuine rate giving an expected fraud proportion `target` in (0, 1):
/// rate = (A(T)/T) * (1 - target) / target. Exact for a constant intensity.
double genuine_rate_for_proportion(const IntensityModel& fraud_model, double target);

/// Sidecar JSON holding the spec and generator identity.
std::string manifest_json(const SimSpec& spec, EpochMicros origin = kDefaultOrigin);
void write_manifest(const std::filesystem::path& path, const SimSpec& spec, EpochMicros origin = kDefaultOrigin);

}  // namespace pfraud
