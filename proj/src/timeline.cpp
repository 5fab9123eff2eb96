#include "pfraud/timeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "csv.hpp"

namespace pfraud {

namespace {

void check_timeline(const std::vector<double>& times, const std::vector<std::uint8_t>& labels,
                    double horizon) {
    if (times.size() != labels.size())
        throw std::invalid_argument("timeline: times and labels differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0)
            throw std::invalid_argument("timeline: event times must be finite and >= 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("timeline: event times must be strictly increasing");
        if (labels[i] > 1) throw std::invalid_argument("timeline: labels must be 0 or 1");
    }
    if (!std::isfinite(horizon) || horizon < 0.0)
        throw std::invalid_argument("timeline: horizon must be finite and >= 0");
    if (!times.empty() && horizon < times.back())
        throw std::invalid_argument("timeline: horizon precedes the last event");
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Fraction digits -> microseconds, rounding to nearest.
bool parse_fraction_micros(std::string_view digits, std::int64_t& micros) {
    if (!all_digits(digits)) return false;
    std::int64_t value = 0;
    std::size_t i = 0;
    for (; i < digits.size() && i < 6; ++i) value = value * 10 + (digits[i] - '0');
    for (std::size_t k = i; k < 6; ++k) value *= 10;
    if (digits.size() > 6 && digits[6] >= '5') ++value;
    micros = value;
    return true;
}

bool parse_epoch_seconds(std::string_view s, EpochMicros& out) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::int64_t seconds = 0;
    if (!all_digits(whole) || !parse_int(whole, seconds)) return false;
    std::int64_t frac = 0;
    if (dot != std::string_view::npos && !parse_fraction_micros(s.substr(dot + 1), frac)) return false;
    out = seconds * 1'000'000 + frac;
    if (negative) out = -out;
    return true;
}

}  // namespace

EventTimeline::EventTimeline(std::string client_id, std::vector<double> times,
                             std::vector<std::uint8_t> labels, double horizon)
    : client_id_(std::move(client_id)), times_(std::move(times)), labels_(std::move(labels)),
      horizon_(horizon) {
    check_timeline(times_, labels_, horizon_);
}

EventTimeline::EventTimeline(std::string client_id, std::vector<double> times,
                             std::vector<std::uint8_t> labels)
    : EventTimeline(std::move(client_id), times, std::move(labels), times.empty() ? 0.0 : times.back()) {}

std::size_t EventTimeline::fraud_count() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

EventTimeline EventTimeline::slice(std::size_t first, std::size_t last) const {
    if (first > last || last > size()) throw std::out_of_range("timeline slice out of range");
    std::vector<double> t(times_.begin() + first, times_.begin() + last);
    std::vector<std::uint8_t> l(labels_.begin() + first, labels_.begin() + last);
    double h = t.empty() ? 0.0 : t.back();
    return EventTimeline(client_id_, std::move(t), std::move(l), h);
}

std::size_t train_size(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    if (n < 2) throw std::invalid_argument("split needs at least 2 events");
    // The epsilon absorbs products such as 10 * 0.7 = 7.000000000000001.
    double raw = std::ceil(static_cast<double>(n) * spec.train_fraction - 1e-9);
    auto k = static_cast<std::size_t>(std::max(raw, 1.0));
    return std::min(k, n - 1);
}

TimelineSplit split(const EventTimeline& timeline, const SplitSpec& spec) {
    std::size_t k = train_size(timeline.size(), spec);
    return {timeline.slice(0, k), timeline.slice(k, timeline.size())};
}

std::vector<double> fraud_times(const EventTimeline& timeline) {
    std::vector<double> out;
    auto times = timeline.times();
    auto labels = timeline.labels();
    for (std::size_t i = 0; i < times.size(); ++i)
        if (labels[i] == 1) out.push_back(times[i]);
    return out;
}

EpochMicros parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    std::string_view s = csv::trim(text);
    if (s.empty()) throw std::invalid_argument("empty timestamp");

    EpochMicros epoch = 0;
    if (s.find_first_of(":T ") == std::string_view::npos && s.find('-', 1) == std::string_view::npos) {
        if (parse_epoch_seconds(s, epoch)) return epoch;
        throw std::invalid_argument("unparseable timestamp '" + std::string(s) + "'");
    }

    auto fail = [&]() -> EpochMicros {
        throw std::invalid_argument("unparseable timestamp '" + std::string(s) + "'");
    };
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return fail();
    int y = 0;
    unsigned mo = 0, d = 0;
    if (!all_digits(s.substr(0, 4)) || !parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
        !parse_int(s.substr(8, 2), d))
        return fail();
    year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) return fail();
    std::int64_t micros = std::int64_t{sys_days{ymd}.time_since_epoch().count()} * 86'400'000'000LL;

    std::string_view rest = s.substr(10);
    if (rest.empty()) return micros;
    if (rest.front() != 'T' && rest.front() != 't' && rest.front() != ' ') return fail();
    rest.remove_prefix(1);

    int hh = 0, mm = 0, ss = 0;
    std::int64_t frac = 0;
    if (rest.size() < 5 || rest[2] != ':' || !all_digits(rest.substr(0, 2)) || !all_digits(rest.substr(3, 2)))
        return fail();
    parse_int(rest.substr(0, 2), hh);
    parse_int(rest.substr(3, 2), mm);
    rest.remove_prefix(5);
    if (!rest.empty() && rest.front() == ':') {
        if (rest.size() < 3 || !all_digits(rest.substr(1, 2))) return fail();
        parse_int(rest.substr(1, 2), ss);
        rest.remove_prefix(3);
        if (!rest.empty() && (rest.front() == '.' || rest.front() == ',')) {
            std::size_t end = 1;
            while (end < rest.size() && rest[end] >= '0' && rest[end] <= '9') ++end;
            if (end == 1 || !parse_fraction_micros(rest.substr(1, end - 1), frac)) return fail();
            rest.remove_prefix(end);
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return fail();

    std::int64_t offset_minutes = 0;
    if (!rest.empty()) {
        if ((rest == "Z" || rest == "z")) {
            rest = {};
        } else if (rest.front() == '+' || rest.front() == '-') {
            int sign = rest.front() == '-' ? -1 : 1;
            std::string_view off = rest.substr(1);
            int oh = 0, om = 0;
            if (off.size() == 5 && off[2] == ':' && all_digits(off.substr(0, 2)) && all_digits(off.substr(3, 2))) {
                parse_int(off.substr(0, 2), oh);
                parse_int(off.substr(3, 2), om);
            } else if (off.size() == 4 && all_digits(off)) {
                parse_int(off.substr(0, 2), oh);
                parse_int(off.substr(2, 2), om);
            } else if (off.size() == 2 && all_digits(off)) {
                parse_int(off, oh);
            } else {
                return fail();
            }
            offset_minutes = sign * (oh * 60 + om);
        } else {
            return fail();
        }
    }
    micros += ((std::int64_t{hh} * 60 + mm) * 60 + ss) * 1'000'000LL + frac;
    micros -= offset_minutes * 60'000'000LL;
    return micros;
}

std::string format_timestamp(EpochMicros ts) {
    using namespace std::chrono;
    constexpr std::int64_t per_day = 86'400'000'000LL;
    std::int64_t days = ts / per_day;
    std::int64_t rem = ts % per_day;
    if (rem < 0) {
        rem += per_day;
        --days;
    }
    year_month_day ymd{sys_days{std::chrono::days{days}}};
    std::int64_t secs = rem / 1'000'000;
    std::int64_t micros = rem % 1'000'000;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long long>(secs / 3600),
                  static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60),
                  static_cast<long long>(micros));
    return buf;
}

std::vector<EventTimeline> build_timelines(std::vector<TransactionRecord> records) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<TransactionRecord>> groups;
    for (auto& r : records) {
        auto [it, inserted] = index.try_emplace(r.client_id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(std::move(r));
    }

    std::vector<EventTimeline> out;
    out.reserve(groups.size());
    for (auto& g : groups) {
        std::stable_sort(g.begin(), g.end(),
                         [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; });
        std::vector<double> times(g.size());
        std::vector<std::uint8_t> labels(g.size());
        const EpochMicros first = g.front().timestamp;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double t = static_cast<double>(g[i].timestamp - first) / kMicrosPerDay;
            if (i > 0 && t <= times[i - 1]) t = times[i - 1] + kTieBreakDays;
            times[i] = t;
            labels[i] = g[i].label;
        }
        out.emplace_back(g.front().client_id, std::move(times), std::move(labels));
    }
    return out;
}

std::vector<EventTimeline> ingest_csv(std::istream& in, const CsvSchema& schema) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) return {};

    auto header = csv::split_line(line);
    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ParseError(reader.line_no(), "missing column '" + name + "' in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column(schema.client_id);
    const std::size_t c_ts = column(schema.timestamp);
    const std::size_t c_label = column(schema.label);
    const std::size_t needed = std::max({c_id, c_ts, c_label}) + 1;

    std::vector<TransactionRecord> records;
    while (reader.next(line)) {
        auto fields = csv::split_line(line);
        if (fields.size() < needed) throw ParseError(reader.line_no(), "too few fields");
        TransactionRecord rec;
        rec.client_id = fields[c_id];
        if (rec.client_id.empty()) throw ParseError(reader.line_no(), "empty client id");
        try {
            rec.timestamp = parse_timestamp(fields[c_ts]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(reader.line_no(), e.what());
        }
        const std::string& label = fields[c_label];
        if (label == "0") {
            rec.label = 0;
        } else if (label == "1") {
            rec.label = 1;
        } else {
            throw ParseError(reader.line_no(), "label must be 0 or 1, got '" + label + "'");
        }
        records.push_back(std::move(rec));
    }
    return build_timelines(std::move(records));
}

std::vector<EventTimeline> ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return ingest_csv(in, schema);
}

void write_csv(std::ostream& out, std::span<const EventTimeline> timelines, EpochMicros origin) {
    out << "client_id,timestamp,label\n";
    for (const auto& tl : timelines) {
        auto times = tl.times();
        auto labels = tl.labels();
        const std::string id = csv::quote_if_needed(tl.client_id());
        for (std::size_t i = 0; i < times.size(); ++i) {
            auto micros = static_cast<EpochMicros>(std::llround(times[i] * kMicrosPerDay));
            out << id << ',' << format_timestamp(origin + micros) << ',' << int(labels[i]) << '\n';
        }
    }
}

void write_csv(const std::filesystem::path& path, std::span<const EventTimeline> timelines,
               EpochMicros origin) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, timelines, origin);
}

}  // namespace pfraud
