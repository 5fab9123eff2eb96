#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "pfraud/evaluation.hpp"
#include "pfraud/intensity.hpp"
#include "pfraud/pipeline.hpp"
#include "pfraud/serialize.hpp"
#include "pfraud/simulation.hpp"
#include "pfraud/timeline.hpp"

namespace fs = std::filesystem;

namespace pfraud::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes through a sibling temp file so a failed run never leaves a half
// written output behind.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }
    fs::rename(tmp, path);
}

void write_text(const fs::path& path, const std::string& text) {
    write_file(path, [&](std::ostream& o) { o << text << '\n'; });
}

void require_output_dir(const std::string& dir) {
    if (dir.empty()) throw UsageError("--output-dir is required");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw UsageError("output directory does not exist: " + dir);
}

void require_input(const std::string& path) {
    if (path.empty()) throw UsageError("--input is required");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw UsageError("input file does not exist: " + path);
}

unsigned resolve_parallelism(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// key=value lines become --key=value arguments placed before the user's own
// flags, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::vector<std::string> injected;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(line_no) + ": bad key");
        injected.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> out{args.front()};
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

std::vector<ModelName> parse_models(const std::vector<std::string>& names) {
    std::vector<ModelName> out;
    for (const auto& entry : names) {
        std::stringstream ss(entry);
        std::string name;
        while (std::getline(ss, name, ','))
            if (!name.empty()) out.push_back(parse_model(name));
    }
    if (out.empty()) return {kAllModels.begin(), kAllModels.end()};
    return out;
}

std::string horizon_tag(double t) {
    std::string s = format_number(t);
    for (char& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

// Flags shared by the pipeline subcommands.
struct Common {
    std::string input;
    std::string output_dir;
    std::string config;
    double train_fraction = 0.8;
    std::string window = "expanding";
    std::vector<std::string> models;
    std::size_t group_sample = 500;
    std::uint64_t seed = 0;
    unsigned parallelism = 1;
    bool plot_data = false;
    int starts = 16;
};

void add_config(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "key=value file; keys are long flag names");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Poisson-process fraud scoring: simulate, fit, predict, evaluate, report, region", "pfraud"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Common c;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset and its manifest");
    std::size_t clients = 100;
    std::string family_text = "constant";
    std::vector<double> params{0.05};
    double horizon = 365.0;
    double genuine_rate = 0.0;
    double fraud_proportion = 0.0;
    std::string label_mode = "merged";
    std::string prefix = "c";
    std::size_t first_index = 0;
    sim->add_option("--clients", clients, "Number of clients")->capture_default_str();
    sim->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    sim->add_option("--output-dir", c.output_dir, "Existing output directory");
    sim->add_option("--family", family_text, "Fraud intensity family")->capture_default_str();
    sim->add_option("--params", params, "Fraud intensity parameters a [b [c]]")->delimiter(',');
    sim->add_option("--horizon", horizon, "Observation window in days")->capture_default_str();
    auto* rate_opt = sim->add_option("--genuine-rate", genuine_rate, "Genuine transactions per day");
    sim->add_option("--fraud-proportion", fraud_proportion, "Target expected fraud proportion")->excludes(rate_opt);
    sim->add_option("--label-mode", label_mode, "merged or interval")->capture_default_str();
    sim->add_option("--prefix", prefix, "Client id prefix")->capture_default_str();
    sim->add_option("--first-index", first_index, "Index of the first client")->capture_default_str();
    sim->add_option("--parallelism", c.parallelism, "Worker threads (0 = all cores)")->capture_default_str();
    add_config(sim, c);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one intensity family per client");
    bool whole = false;
    fit->add_option("--input", c.input, "Transaction CSV");
    fit->add_option("--output-dir", c.output_dir, "Existing output directory");
    fit->add_option("--family", family_text, "constant, linear or quadratic")->capture_default_str();
    fit->add_option("--train-fraction", c.train_fraction, "Training share of each timeline")->capture_default_str();
    fit->add_flag("--whole", whole, "Fit the full timeline instead of the training segment");
    fit->add_option("--starts", c.starts, "Optimizer starts")->capture_default_str();
    fit->add_option("--seed", c.seed, "Seed for optimizer start points")->capture_default_str();
    fit->add_option("--parallelism", c.parallelism, "Worker threads (0 = all cores)")->capture_default_str();
    add_config(fit, c);

    // predict
    auto* pred = app.add_subcommand("predict", "Score test transactions");
    pred->add_option("--input", c.input, "Transaction CSV");
    pred->add_option("--output-dir", c.output_dir, "Existing output directory");
    pred->add_option("--models", c.models, "Comma separated model names (default all)");
    pred->add_option("--window", c.window, "expanding or fixed:N")->capture_default_str();
    pred->add_option("--train-fraction", c.train_fraction, "Training share of each timeline")->capture_default_str();
    pred->add_option("--starts", c.starts, "Optimizer starts")->capture_default_str();
    pred->add_option("--seed", c.seed, "Seed for optimizer start points")->capture_default_str();
    pred->add_option("--parallelism", c.parallelism, "Worker threads (0 = all cores)")->capture_default_str();
    add_config(pred, c);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Run models over grouped clients and summarize");
    eval->add_option("--input", c.input, "Transaction CSV");
    eval->add_option("--output-dir", c.output_dir, "Existing output directory");
    eval->add_option("--models", c.models, "Comma separated model names (default all)");
    eval->add_option("--window", c.window, "expanding or fixed:N")->capture_default_str();
    eval->add_option("--train-fraction", c.train_fraction, "Training share of each timeline")->capture_default_str();
    eval->add_option("--group-sample", c.group_sample, "Clients sampled per group")->capture_default_str();
    eval->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
    eval->add_option("--starts", c.starts, "Optimizer starts")->capture_default_str();
    eval->add_option("--parallelism", c.parallelism, "Worker threads (0 = all cores)")->capture_default_str();
    eval->add_flag("--plot-data", c.plot_data, "Also write plot_data.csv");
    add_config(eval, c);

    // report
    auto* rep = app.add_subcommand("report", "Rebuild summaries from a per-client detail file");
    rep->add_option("--input", c.input, "per_client.csv from evaluate");
    rep->add_option("--output-dir", c.output_dir, "Existing output directory");
    rep->add_option("--models", c.models, "Comma separated model names (default all)");
    rep->add_flag("--plot-data", c.plot_data, "Also write plot_data.csv");
    add_config(rep, c);

    // region
    auto* reg = app.add_subcommand("region", "Feasible parameter grid per horizon");
    std::string region_family = "linear";
    std::vector<double> horizons{0.02, 0.2, 20.0};
    RegionSpec rspec;
    reg->add_option("--family", region_family, "constant, linear or quadratic")->capture_default_str();
    reg->add_option("--horizons", horizons, "Horizons T")->delimiter(',');
    reg->add_option("--a-max", rspec.a_max, "Grid half-width on a (a in [0, a_max])")->capture_default_str();
    reg->add_option("--b-max", rspec.b_max, "b in [-b_max, b_max]")->capture_default_str();
    reg->add_option("--c-max", rspec.c_max, "c in [-c_max, c_max]")->capture_default_str();
    reg->add_option("--resolution", rspec.resolution, "Points per a/b axis")->capture_default_str();
    reg->add_option("--c-resolution", rspec.c_resolution, "Points on the c axis")->capture_default_str();
    reg->add_option("--output-dir", c.output_dir, "Existing output directory");
    add_config(reg, c);

    try {
        auto args = expand_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            // Subcommand help arrives wrapped the same way.
            if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
                for (auto* sub : app.get_subcommands()) out << sub->help();
                return kExitOk;
            }
            err << "error: " << e.what() << '\n';
            return kExitUsage;
        }

        const unsigned workers = resolve_parallelism(c.parallelism);
        EstimationOptions est;
        est.starts = c.starts;
        if (c.starts < 1) throw UsageError("--starts must be >= 1");

        if (sim->parsed()) {
            require_output_dir(c.output_dir);
            SimSpec spec;
            spec.n_clients = clients;
            spec.seed = c.seed;
            spec.horizon_days = horizon;
            spec.label_mode = parse_label_mode(label_mode);
            spec.client_prefix = prefix;
            spec.first_index = first_index;
            if (!(horizon > 0.0)) throw UsageError("--horizon must be > 0");
            const Family fam = parse_family(family_text);
            if (params.size() != parameter_count(fam))
                throw UsageError("--params needs " + std::to_string(parameter_count(fam)) + " values for " +
                                 std::string(family_name(fam)));
            spec.fraud_model = IntensityModel(fam, params, horizon);
            if (fraud_proportion > 0.0) spec.genuine_rate = genuine_rate_for_proportion(spec.fraud_model, fraud_proportion);
            else if (genuine_rate > 0.0) spec.genuine_rate = genuine_rate;
            else throw UsageError("one of --genuine-rate (> 0) or --fraud-proportion (in (0,1)) is required");
            spec.validate();

            const auto timelines = simulate_dataset(spec, workers);
            const fs::path dir(c.output_dir);
            write_file(dir / "transactions.csv", [&](std::ostream& o) { write_csv(o, timelines, kDefaultOrigin); });
            write_text(dir / "manifest.json", manifest_json(spec));
            out << "wrote " << timelines.size() << " clients to " << (dir / "transactions.csv").string() << '\n';
            return kExitOk;
        }

        if (fit->parsed()) {
            require_input(c.input);
            require_output_dir(c.output_dir);
            const Family fam = parse_family(family_text);
            est.start_seed ^= c.seed;
            const auto timelines = ingest_csv(fs::path(c.input));
            std::optional<SplitSpec> split_spec;
            if (!whole) split_spec = SplitSpec{c.train_fraction};
            const auto fits = fit_clients(timelines, fam, split_spec, est, workers);
            const fs::path file = fs::path(c.output_dir) / ("fits_" + std::string(family_name(fam)) + ".json");
            write_text(file, fits_to_json(fits));
            std::size_t errors = 0;
            for (const auto& f : fits)
                if (!f.error.empty()) {
                    ++errors;
                    err << f.client_id << ": " << f.error << '\n';
                }
            out << "wrote " << fits.size() << " fits to " << file.string() << '\n';
            return errors == fits.size() && !fits.empty() ? kExitFailure : kExitOk;
        }

        if (pred->parsed()) {
            require_input(c.input);
            require_output_dir(c.output_dir);
            est.start_seed ^= c.seed;
            const auto models = parse_models(c.models);
            const auto window = WindowPolicy::parse(c.window);
            const SplitSpec split_spec{c.train_fraction};
            const auto timelines = ingest_csv(fs::path(c.input));
            std::vector<ScoreSeries> all;
            std::vector<std::string> diagnostics;
            for (ModelName m : models) {
                auto s = predict_clients(timelines, m, split_spec, window, est, workers, &diagnostics);
                std::move(s.begin(), s.end(), std::back_inserter(all));
            }
            const fs::path dir(c.output_dir);
            write_file(dir / "scores.csv", [&](std::ostream& o) { write_scores_csv(o, all); });
            write_file(dir / "diagnostics.log", [&](std::ostream& o) {
                for (const auto& d : diagnostics) o << d << '\n';
            });
            out << "wrote " << all.size() << " score series to " << (dir / "scores.csv").string() << '\n';
            return kExitOk;
        }

        if (eval->parsed()) {
            require_input(c.input);
            require_output_dir(c.output_dir);
            ExperimentConfig cfg;
            cfg.split.train_fraction = c.train_fraction;
            cfg.window = WindowPolicy::parse(c.window);
            cfg.estimation = est;
            cfg.models = parse_models(c.models);
            cfg.group_sample = c.group_sample;
            cfg.seed = c.seed;
            cfg.parallelism = workers;
            if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
                throw UsageError("--train-fraction must lie in (0, 1)");
            const auto timelines = ingest_csv(fs::path(c.input));
            const fs::path dir(c.output_dir);
            ExperimentResult result;
            try {
                result = run_experiment(timelines, cfg);
            } catch (const std::runtime_error& e) {
                write_text(dir / "diagnostics.log", e.what());
                err << "error: " << e.what() << '\n';
                return kExitFailure;
            }
            // Detail and log first; summaries only once everything they derive from is on disk.
            write_file(dir / "per_client.csv", [&](std::ostream& o) { write_per_client_csv(o, result.outcomes); });
            write_file(dir / "diagnostics.log", [&](std::ostream& o) {
                for (const auto& [g, n] : result.group_sizes)
                    o << "group " << group_label(g) << ": " << n << " eligible clients\n";
                for (const auto& d : result.diagnostics) o << d << '\n';
            });
            write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, result.report); });
            write_text(dir / "summary.json", summary_to_json(result.report));
            write_file(dir / "relative_map.csv", [&](std::ostream& o) { write_relative_map_csv(o, result.report); });
            if (c.plot_data)
                write_file(dir / "plot_data.csv", [&](std::ostream& o) { write_plot_data_csv(o, result.report); });
            out << "evaluated " << result.outcomes.size() << " client-model cells; outputs in " << dir.string() << '\n';
            return kExitOk;
        }

        if (rep->parsed()) {
            require_input(c.input);
            require_output_dir(c.output_dir);
            const auto models = parse_models(c.models);
            std::ifstream in(c.input);
            const auto outcomes = read_per_client_csv(in);
            std::vector<ClientMetrics> metrics;
            for (const auto& o : outcomes) {
                if (!o.error.empty()) continue;
                if (std::find(models.begin(), models.end(), o.model) == models.end()) continue;
                metrics.push_back({o.client_id, o.group, o.model, o.auc, o.ap});
            }
            const auto report = summarize(metrics);
            const fs::path dir(c.output_dir);
            write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, report); });
            write_text(dir / "summary.json", summary_to_json(report));
            write_file(dir / "relative_map.csv", [&](std::ostream& o) { write_relative_map_csv(o, report); });
            if (c.plot_data)
                write_file(dir / "plot_data.csv", [&](std::ostream& o) { write_plot_data_csv(o, report); });
            out << "summarized " << metrics.size() << " rows into " << dir.string() << '\n';
            return kExitOk;
        }

        if (reg->parsed()) {
            require_output_dir(c.output_dir);
            const Family fam = parse_family(region_family);
            if (horizons.empty()) throw UsageError("--horizons needs at least one value");
            std::vector<RegionGrid> grids;
            for (double t : horizons) grids.push_back(feasible_region_grid(fam, t, rspec));
            for (const auto& g : grids) {
                const fs::path file = fs::path(c.output_dir) /
                                      ("region_" + std::string(family_name(fam)) + "_T" + horizon_tag(g.horizon) + ".csv");
                write_file(file, [&](std::ostream& o) { write_region_csv(o, g); });
                out << "wrote " << file.string() << '\n';
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace pfraud::cli
