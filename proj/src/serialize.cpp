#include "pfraud/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <map>
#include <ostream>
#include <stdexcept>

#include "csv.hpp"
#include "json.hpp"

namespace pfraud {

namespace {

using json = nlohmann::ordered_json;

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double parse_double(const std::string& text, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw ParseError(line, "not a number: '" + text + "'");
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fits_to_json(std::span<const ClientFit> fits) {
    json arr = json::array();
    for (const auto& cf : fits) {
        json j;
        j["client_id"] = cf.client_id;
        if (!cf.error.empty()) {
            j["error"] = cf.error;
            arr.push_back(std::move(j));
            continue;
        }
        const auto& f = cf.fit;
        const auto params = f.model.params();
        j["family"] = family_name(f.model.family());
        j["params"] = std::vector<double>(params.begin(), params.end());
        j["horizon"] = f.model.horizon();
        j["log_likelihood"] = opt_json(f.log_likelihood);
        j["converged"] = f.converged;
        j["zero_convention"] = f.zero_convention;
        j["iterations"] = f.iterations;
        j["diagnostics"] = {{"waiting_time_rate", opt_json(f.diagnostics.waiting_time_rate)},
                            {"censored_rate", opt_json(f.diagnostics.censored_rate)},
                            {"degenerate_origin", f.diagnostics.degenerate_origin},
                            {"starts_run", f.diagnostics.starts_run},
                            {"starts_converged", f.diagnostics.starts_converged},
                            {"total_iterations", f.diagnostics.total_iterations},
                            {"best_start", f.diagnostics.best_start}};
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

void write_scores_csv(std::ostream& out, std::span<const ScoreSeries> series) {
    out << "client_id,model_name,position,score,label\n";
    for (const auto& s : series)
        for (std::size_t j = 0; j < s.scores.size(); ++j)
            out << csv::quote_if_needed(s.client_id) << ',' << model_label(s.model) << ',' << j << ','
                << format_number(s.scores[j]) << ',' << static_cast<int>(s.labels[j]) << '\n';
}

std::vector<ScoreSeries> read_scores_csv(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) return {};
    const auto header = csv::split_line(line);
    const std::vector<std::string> expected{"client_id", "model_name", "position", "score", "label"};
    if (header != expected) throw ParseError(reader.line_no(), "unexpected score header");

    std::vector<ScoreSeries> out;
    while (reader.next(line)) {
        const auto f = csv::split_line(line);
        if (f.size() != 5) throw ParseError(reader.line_no(), "expected 5 fields");
        ModelName model;
        try {
            model = parse_model(f[1]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(reader.line_no(), e.what());
        }
        if (out.empty() || out.back().client_id != f[0] || out.back().model != model) {
            out.emplace_back();
            out.back().client_id = f[0];
            out.back().model = model;
        }
        auto& s = out.back();
        if (f[2] != std::to_string(s.scores.size())) throw ParseError(reader.line_no(), "positions out of sequence");
        if (f[4] != "0" && f[4] != "1") throw ParseError(reader.line_no(), "label must be 0 or 1");
        s.scores.push_back(parse_double(f[3], reader.line_no()));
        s.labels.push_back(f[4] == "1" ? 1 : 0);
    }
    return out;
}

void write_summary_csv(std::ostream& out, const EvaluationReport& report) {
    out << "model,group,metric,n,excluded,max,mean,min,std\n";
    for (const auto& s : report.summaries)
        out << model_label(s.model) << ',' << group_label(s.group) << ',' << metric_label(s.metric) << ',' << s.count
            << ',' << s.excluded << ',' << format_number(s.max) << ',' << format_number(s.mean) << ','
            << format_number(s.min) << ',' << format_number(s.std) << '\n';
}

std::string summary_to_json(const EvaluationReport& report) {
    json j;
    j["conventions"] = {{"std", "population"},
                        {"excluded", "clients whose metric is undefined (single-class test segment)"},
                        {"relative_map", "(MAP_model - MAP_naive) / MAP_naive per group"}};
    json rows = json::array();
    for (const auto& s : report.summaries)
        rows.push_back({{"model", model_label(s.model)},
                        {"group", group_label(s.group)},
                        {"range", group_range(s.group)},
                        {"metric", metric_label(s.metric)},
                        {"n", s.count},
                        {"excluded", s.excluded},
                        {"max", s.max},
                        {"mean", s.mean},
                        {"min", s.min},
                        {"std", s.std}});
    j["summaries"] = std::move(rows);
    json rel = json::object();
    for (const auto& [key, value] : report.relative_map)
        rel[std::string(model_label(key.first))][std::string(group_label(key.second))] = value;
    j["relative_map"] = std::move(rel);
    j["diagnostics"] = report.diagnostics;
    return j.dump(2);
}

void write_relative_map_csv(std::ostream& out, const EvaluationReport& report) {
    out << "model";
    for (Group g : kAllGroups) out << ',' << group_label(g);
    out << '\n';
    for (ModelName m : kAllModels) {
        if (m == ModelName::NaiveStatic) continue;
        bool any = false;
        for (Group g : kAllGroups) any = any || report.relative_map.count({m, g}) > 0;
        if (!any) continue;
        out << model_label(m);
        for (Group g : kAllGroups) {
            out << ',';
            if (auto it = report.relative_map.find({m, g}); it != report.relative_map.end())
                out << format_number(it->second);
        }
        out << '\n';
    }
}

void write_plot_data_csv(std::ostream& out, const EvaluationReport& report) {
    out << "x,y,series\n";
    for (ModelName m : kAllModels)
        for (Group g : kAllGroups)
            if (auto it = report.relative_map.find({m, g}); it != report.relative_map.end())
                out << group_label(g) << ',' << format_number(it->second) << ',' << model_label(m) << '\n';
}

void write_per_client_csv(std::ostream& out, std::span<const ClientOutcome> outcomes) {
    out << "client_id,group,model,auc,ap,zero_convention,converged,test_size,clamped_steps,failed_steps,error\n";
    for (const auto& o : outcomes)
        out << csv::quote_if_needed(o.client_id) << ',' << group_label(o.group) << ',' << model_label(o.model) << ','
            << opt_number(o.auc) << ',' << opt_number(o.ap) << ',' << (o.zero_convention ? 1 : 0) << ','
            << (o.converged ? 1 : 0) << ',' << o.test_size << ',' << o.clamped_steps << ',' << o.failed_steps << ','
            << csv::quote_if_needed(o.error) << '\n';
}

std::vector<ClientOutcome> read_per_client_csv(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) return {};
    const auto header = csv::split_line(line);
    const std::vector<std::string> expected{"client_id", "group",     "model",         "auc",          "ap",   "zero_convention",
                                            "converged", "test_size", "clamped_steps", "failed_steps", "error"};
    if (header != expected) throw ParseError(reader.line_no(), "unexpected per-client header");

    auto opt = [&](const std::string& text) -> std::optional<double> {
        if (text.empty()) return std::nullopt;
        return parse_double(text, reader.line_no());
    };
    auto count = [&](const std::string& text) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw ParseError(reader.line_no(), "not a count: '" + text + "'");
        return v;
    };
    std::vector<ClientOutcome> out;
    while (reader.next(line)) {
        const auto f = csv::split_line(line);
        if (f.size() != expected.size()) throw ParseError(reader.line_no(), "expected 11 fields");
        ClientOutcome o;
        try {
            o.client_id = f[0];
            o.group = parse_group(f[1]);
            o.model = parse_model(f[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(reader.line_no(), e.what());
        }
        o.auc = opt(f[3]);
        o.ap = opt(f[4]);
        o.zero_convention = f[5] == "1";
        o.converged = f[6] == "1";
        o.test_size = count(f[7]);
        o.clamped_steps = count(f[8]);
        o.failed_steps = count(f[9]);
        o.error = f[10];
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace pfraud
