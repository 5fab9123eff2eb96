#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pfraud {

/// Thrown for malformed input records. Carries the 1-based line number of the
/// offending record (0 when not tied to a line).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Microseconds since the Unix epoch (UTC).
using EpochMicros = std::int64_t;

inline constexpr double kMicrosPerDay = 86'400'000'000.0;

/// Gap inserted between transactions of one client that share a timestamp.
inline constexpr double kTieBreakDays = 1e-9;

struct TransactionRecord {
    std::string client_id;
    EpochMicros timestamp = 0;
    std::uint8_t label = 0;  // 1 = fraud
};

/// One client's transaction stream in days since its first transaction.
///
/// Times are strictly increasing and aligned with labels; `horizon` is the
/// end of the observation window and is never before the last time.
/// Immutable once built.
class EventTimeline {
public:
    EventTimeline() = default;
    EventTimeline(std::string client_id, std::vector<double> times, std::vector<std::uint8_t> labels,
                  double horizon);
    /// Horizon defaults to the last event time (0 for an empty timeline).
    EventTimeline(std::string client_id, std::vector<double> times, std::vector<std::uint8_t> labels);

    const std::string& client_id() const noexcept { return client_id_; }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const std::uint8_t> labels() const noexcept { return labels_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    std::size_t fraud_count() const noexcept;

    /// Events [first, last) as a new timeline; horizon is the last kept time.
    EventTimeline slice(std::size_t first, std::size_t last) const;

    friend bool operator==(const EventTimeline&, const EventTimeline&) = default;

private:
    std::string client_id_;
    std::vector<double> times_;
    std::vector<std::uint8_t> labels_;
    double horizon_ = 0.0;
};

struct SplitSpec {
    double train_fraction = 0.8;
};

struct TimelineSplit {
    EventTimeline train;
    EventTimeline test;
};

/// Number of leading transactions that form the training segment of an
/// n-event timeline: ceil(n * fraction), kept inside [1, n - 1].
std::size_t train_size(std::size_t n, const SplitSpec& spec);

/// Partition by transaction count. The test segment keeps the original time
/// coordinates so compensator differences across the boundary stay meaningful.
TimelineSplit split(const EventTimeline& timeline, const SplitSpec& spec = {});

/// Times of the fraud-labelled events, in order.
std::vector<double> fraud_times(const EventTimeline& timeline);

struct CsvSchema {
    std::string client_id = "client_id";
    std::string timestamp = "timestamp";
    std::string label = "label";
};

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.ffffff][Z|+HH:MM]" (space also
/// accepted as the separator) or numeric epoch seconds.
EpochMicros parse_timestamp(std::string_view text);

/// ISO-8601 UTC with microsecond precision, e.g. 2015-09-01T00:00:00.000000Z.
std::string format_timestamp(EpochMicros ts);

/// Groups records by client in order of first appearance, sorts each client
/// by timestamp (stable, so ties keep input order), breaks ties and converts
/// to days since the client's first transaction.
std::vector<EventTimeline> build_timelines(std::vector<TransactionRecord> records);

std::vector<EventTimeline> ingest_csv(std::istream& in, const CsvSchema& schema = {});
std::vector<EventTimeline> ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Emits `client_id,timestamp,label` rows with each timeline anchored at `origin`.
void write_csv(std::ostream& out, std::span<const EventTimeline> timelines, EpochMicros origin);
void write_csv(const std::filesystem::path& path, std::span<const EventTimeline> timelines,
               EpochMicros origin);

/// 2015-09-01T00:00:00Z; default anchor for emitted synthetic data.
inline constexpr EpochMicros kDefaultOrigin = 1'441'065'600LL * 1'000'000LL;

}  // namespace pfraud
