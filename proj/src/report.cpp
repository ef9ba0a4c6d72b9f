#include "driftloc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "driftloc/errors.hpp"

namespace driftloc {

namespace {

json cells_to_json(std::span<const CellIndex> cells) {
    json out = json::array();
    for (CellIndex z : cells) out.push_back(z.value);
    return out;
}

json group_to_json(const FlowDecomposition::Group& g, bool persistent) {
    return {{"label", g.label},
            {"kind", persistent ? "persistent" : "transient"},
            {"domicile", g.domicile},
            {"size", g.cells.size()},
            {"cells", cells_to_json(g.cells)}};
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// RFC 4180 quoting for labels such as B(1,2).
std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json summary_to_json(const Summary& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"std", s.std_dev}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

json decomposition_to_json(const FlowDecomposition& d, const Workspace& w) {
    json persistent = json::array();
    for (const auto& g : d.persistent_groups) persistent.push_back(group_to_json(g, true));
    json transient = json::array();
    for (const auto& g : d.transient_groups) transient.push_back(group_to_json(g, false));
    return {{"grid", {{"rows", w.rows()}, {"cols", w.cols()}, {"free_cells", w.free_count()}}},
            {"persistent_group_count", d.persistent_groups.size()},
            {"transient_group_count", d.transient_groups.size()},
            {"persistent_cell_count", d.persistent_cells.size()},
            {"transient_cell_count", d.transient_cells.size()},
            {"persistent_groups", persistent},
            {"transient_groups", transient}};
}

json decoded_to_json(const DecodedPath& decoded, std::span<const Direction> obs) {
    return {{"path", cells_to_json(decoded.path)},
            {"final_state", decoded.path.back().value},
            {"log_prob", decoded.log_prob},
            {"observations", format_observations(obs)},
            {"steps", obs.size()}};
}

json config_to_json(const ExperimentConfig& cfg) {
    json field;
    if (!cfg.field_path.empty()) field["path"] = cfg.field_path;
    else field["synthetic"] = cfg.synthetic;
    json modes = json::array();
    for (PriorMode m : cfg.modes) modes.push_back(std::string(to_string(m)));
    return {{"name", cfg.name},
            {"field", field},
            {"r", cfg.r},
            {"dt", cfg.dt ? json(*cfg.dt) : json("auto")},
            {"mapped_set_rule", std::string(to_string(cfg.rule))},
            {"modes", modes},
            {"steps", cfg.steps},
            {"runs", cfg.runs},
            {"group_by", cfg.by_region ? "region" : "none"},
            {"base_seed", cfg.base_seed},
            {"noise_rate", cfg.noise_rate},
            {"outputs", {{"csv", cfg.csv_output}, {"json", cfg.json_output}}}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    std::vector<std::string> issues;
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

    static const std::vector<std::string> known{"name", "field", "r", "dt", "mapped_set_rule", "modes", "steps",
                                                "runs", "group_by", "base_seed", "noise_rate", "outputs"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) issues.push_back("unknown key '" + key + "'");
    }

    auto get = [&](const char* key, auto& target, const char* expected) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(target);
        } catch (const json::exception&) {
            issues.push_back(std::string("'") + key + "' must be " + expected);
        }
    };
    get("name", cfg.name, "a string");
    get("r", cfg.r, "a number");
    get("steps", cfg.steps, "an array of integers");
    get("runs", cfg.runs, "an integer");
    get("base_seed", cfg.base_seed, "a non-negative integer");
    get("noise_rate", cfg.noise_rate, "a number");

    if (!j.contains("field") || !j["field"].is_object()) {
        issues.push_back("'field' must be an object with 'path' or 'synthetic'");
    } else {
        const auto& f = j["field"];
        if (f.contains("path") && f["path"].is_string()) cfg.field_path = f["path"];
        if (f.contains("synthetic") && f["synthetic"].is_string()) cfg.synthetic = f["synthetic"];
        if (!cfg.synthetic.empty()) {
            try {
                (void)parse_synthetic_spec(cfg.synthetic);
            } catch (const std::exception& e) {
                issues.push_back(std::string("field.synthetic: ") + e.what());
            }
        }
    }
    if (j.contains("dt")) {
        const auto& dt = j["dt"];
        if (dt.is_number()) cfg.dt = dt.get<double>();
        else if (!(dt.is_string() && dt == "auto")) issues.push_back("'dt' must be a number or \"auto\"");
    }
    if (j.contains("mapped_set_rule")) {
        try {
            cfg.rule = parse_mapped_set_rule(j["mapped_set_rule"].get<std::string>());
        } catch (const std::exception&) {
            issues.push_back("'mapped_set_rule' must be \"flow_cone\" or \"all_actions\"");
        }
    }
    if (j.contains("modes")) {
        cfg.modes.clear();
        if (!j["modes"].is_array()) issues.push_back("'modes' must be an array");
        else {
            for (const auto& m : j["modes"]) {
                try {
                    cfg.modes.push_back(parse_prior_mode(m.get<std::string>()));
                } catch (const std::exception&) {
                    issues.push_back("unknown mode " + m.dump() + " (expected \"det\" or \"prob\")");
                }
            }
        }
    }
    if (j.contains("group_by")) {
        const auto& g = j["group_by"];
        if (g == "region") cfg.by_region = true;
        else if (g != "none") issues.push_back("'group_by' must be \"none\" or \"region\"");
    }
    if (j.contains("outputs")) {
        const auto& o = j["outputs"];
        if (!o.is_object()) issues.push_back("'outputs' must be an object");
        else {
            if (o.contains("csv") && o["csv"].is_string()) cfg.csv_output = o["csv"];
            if (o.contains("json") && o["json"].is_string()) cfg.json_output = o["json"];
        }
    }

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    return config_from_json(j);
}

json experiment_to_json(const ExperimentResult& result, const FlowModel& model) {
    const Workspace& w = model.data.workspace;
    json conditions = json::array();
    for (const auto& cond : result.conditions) {
        json runs = json::array();
        for (const auto& run : cond.runs) {
            runs.push_back({{"seed", run.seed},
                            {"deployment", run.deployment.value},
                            {"true_path", cells_to_json(run.true_path)},
                            {"observations", format_observations(run.observations)},
                            {"decoded_path", cells_to_json(run.decoded_path)},
                            {"log_prob", run.log_prob},
                            {"final_error", run.errors.final_error},
                            {"trajectory_error", run.errors.trajectory_error}});
        }
        conditions.push_back({{"condition", cond.index},
                              {"label", cond.label},
                              {"region", cond.region},
                              {"mode", std::string(to_string(cond.mode))},
                              {"steps", cond.steps},
                              {"runs", runs},
                              {"final_error", summary_to_json(cond.final_error)},
                              {"trajectory_error", summary_to_json(cond.trajectory_error)}});
    }
    return {{"config", config_to_json(result.config)},
            {"grid", {{"rows", w.rows()}, {"cols", w.cols()}, {"free_cells", w.free_count()}}},
            {"dt", model.dt.dt()},
            {"decomposition", decomposition_to_json(model.decomposition, w)},
            {"conditions", conditions}};
}

std::string experiment_to_csv(const ExperimentResult& result) {
    std::string out = std::string(kExperimentCsvHeader) + "\n";
    for (const auto& c : result.conditions) {
        out += std::to_string(c.index) + "," + csv_field(c.label) + "," + csv_field(c.region) + "," + std::string(to_string(c.mode)) + "," +
               std::to_string(c.steps) + "," + std::to_string(c.runs.size());
        for (const Summary* s : {&c.final_error, &c.trajectory_error}) {
            for (double v : {s->mean, s->median, s->std_dev, s->min, s->max}) out += "," + fixed6(v);
        }
        out += "\n";
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace driftloc
