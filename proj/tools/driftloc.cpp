// driftloc: decompose a current field, localize a drifter from compass
// readings, and run Monte-Carlo localization experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "driftloc/errors.hpp"
#include "driftloc/ingest.hpp"
#include "driftloc/report.hpp"
#include "driftloc/sim.hpp"

namespace fs = std::filesystem;
using namespace driftloc;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kZeroProbability = 3 };

struct FieldOptions {
    std::string field;
    std::string synthetic;
    double r = 0.9;
    std::string dt = "auto";
    std::string rule = "flow_cone";

    void attach(CLI::App* cmd) {
        auto* f = cmd->add_option("--field", field, "Field file (driftfield format)");
        auto* s = cmd->add_option("--synthetic", synthetic, "Synthetic field, e.g. double_gyre:rows=21,cols=29");
        f->excludes(s);
        cmd->add_option("--r", r, "Perfect-motion probability in (0, 1]")->capture_default_str();
        cmd->add_option("--dt", dt, "Euler time step, or 'auto'")->capture_default_str();
        cmd->add_option("--rule", rule, "Mapped-set rule: flow_cone or all_actions")->capture_default_str();
    }

    FlowModel build() const {
        if (field.empty() == synthetic.empty()) throw ParameterError("give exactly one of --field or --synthetic");
        auto data = [&] {
            if (!field.empty()) {
                spdlog::info("loading field {}", field);
                return load_field(field);
            }
            int rows = 21, cols = 29;
            const auto spec = parse_synthetic_spec(synthetic, &rows, &cols);
            return synthesize_field(spec, rows, cols);
        }();
        std::optional<double> step;
        if (dt != "auto") step = std::stod(dt);
        auto model = build_flow_model(std::move(data), r, step, parse_mapped_set_rule(rule));
        spdlog::info("{}x{} grid, {} water cells, dt={}", model.data.workspace.rows(), model.data.workspace.cols(),
                     model.data.workspace.free_count(), model.dt.dt());
        return model;
    }
};

void emit(const json& j, const std::string& out_dir, const std::string& name) {
    std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) write_text(fs::path(out_dir) / name, j.dump(2) + "\n");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void configure_logging() {
    auto logger = spdlog::stderr_logger_mt("driftloc");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("DRIFTLOC_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(level));
}

void print_summary_table(const ExperimentResult& result) {
    std::printf("%-24s %6s %5s %12s %12s %12s %12s\n", "condition", "steps", "runs", "final_mean", "final_med",
                "traj_mean", "traj_med");
    for (const auto& c : result.conditions) {
        std::printf("%-24s %6d %5zu %12.4f %12.4f %12.4f %12.4f\n", c.label.c_str(), c.steps, c.runs.size(),
                    c.final_error.mean, c.final_error.median, c.trajectory_error.mean, c.trajectory_error.median);
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Drifter localization from current fields and compass observations"};
    app.require_subcommand(1);

    FieldOptions field_opts;
    std::string out_dir;

    auto* classify = app.add_subcommand("classify", "Persistent and transient groups of a field");
    field_opts.attach(classify);
    classify->add_option("--out-dir", out_dir, "Also write decomposition.json here");

    std::string pi_mode = "det";
    int start = 0;
    std::string obs_path;
    auto* localize = app.add_subcommand("localize", "Most likely trajectory for an observation history");
    field_opts.attach(localize);
    localize->add_option("--pi", pi_mode, "Initial distribution: det or prob")->capture_default_str();
    localize->add_option("--start", start, "Deployment cell index x_I (1-based)")->required();
    localize->add_option("--obs", obs_path, "Observation file: one line of N NE E SE S SW W NW I")->required();
    localize->add_option("--out-dir", out_dir, "Also write trajectory.json here");

    std::string config_path;
    std::optional<std::uint64_t> seed;
    auto* experiment = app.add_subcommand("experiment", "Monte-Carlo localization error experiment");
    experiment->add_option("--config", config_path, "Experiment config (JSON)")->required();
    experiment->add_option("--out-dir", out_dir, "Directory for the CSV and JSON reports (default: .)");
    experiment->add_option("--seed", seed, "Override the config's base seed");

    int steps = 20;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Sample a drifter path and its compass history");
    field_opts.attach(simulate);
    simulate->add_option("--pi", pi_mode, "Initial distribution: det or prob")->capture_default_str();
    simulate->add_option("--start", start, "Deployment cell index x_I (1-based)")->required();
    simulate->add_option("--steps", steps, "Number of observations")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    simulate->add_option("--obs-out", sim_out, "Write the observation line to this file");

    std::string synth_spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic field file");
    synth->add_option("--synthetic", synth_spec, "Synthetic field spec")->required();
    synth->add_option("--output", synth_out, "Output field file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) {
            const auto model = field_opts.build();
            emit(decomposition_to_json(model.decomposition, model.data.workspace), out_dir, "decomposition.json");
        } else if (localize->parsed()) {
            const auto model = field_opts.build();
            const auto& w = model.data.workspace;
            const auto obs = parse_observations(read_file(obs_path));
            if (obs.empty()) throw ParseError(1, "observation file holds no symbols");
            HmmModel hmm(model.stochastic.mapping, model.emissions,
                         initial_distribution(w, CellIndex{start}, parse_prior_mode(pi_mode)));
            emit(decoded_to_json(viterbi(hmm, obs), obs), out_dir, "trajectory.json");
        } else if (experiment->parsed()) {
            auto cfg = load_config(config_path);
            if (seed) cfg.base_seed = *seed;
            const auto base_dir = fs::path(config_path).parent_path().string();
            const auto model = build_flow_model(load_field_source(cfg, base_dir.empty() ? "." : base_dir), cfg.r,
                                                cfg.dt, cfg.rule);
            const auto result = run_experiment(cfg, model);
            const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
            write_text(dir / cfg.csv_output, experiment_to_csv(result));
            write_text(dir / cfg.json_output, experiment_to_json(result, model).dump() + "\n");
            print_summary_table(result);
        } else if (simulate->parsed()) {
            const auto model = field_opts.build();
            const auto& w = model.data.workspace;
            const auto pi = initial_distribution(w, CellIndex{start}, parse_prior_mode(pi_mode));
            const auto sample = sample_trajectory(w, model.stochastic.mapping, pi, static_cast<std::size_t>(steps), sim_seed);
            const auto line = format_observations(sample.observations);
            if (!sim_out.empty()) write_text(sim_out, line + "\n");
            json path = json::array();
            for (CellIndex z : sample.path) path.push_back(z.value);
            std::cout << json{{"path", path}, {"observations", line}, {"seed", sim_seed}}.dump(2) << "\n";
        } else if (synth->parsed()) {
            int rows = 21, cols = 29;
            const auto spec = parse_synthetic_spec(synth_spec, &rows, &cols);
            save_field(synth_out, synthesize_field(spec, rows, cols));
        }
    } catch (const ZeroProbabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kZeroProbability;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kOk;
}
