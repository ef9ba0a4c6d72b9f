#include <doctest.h>

#include <sstream>

#include "driftloc/errors.hpp"
#include "driftloc/report.hpp"
#include "schema_check.hpp"

using namespace driftloc;

namespace {

const std::string kSchemas = DRIFTLOC_SOURCE_DIR "/schemas/";

FlowModel small_gyre() {
    return build_flow_model(synthesize_field(parse_synthetic_spec("double_gyre"), 21, 29), 0.9);
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("decomposition JSON follows its schema") {
    const auto m = small_gyre();
    const auto j = decomposition_to_json(m.decomposition, m.data.workspace);
    CHECK(schema::validate(schema::load(kSchemas + "decomposition.schema.json"), j).empty());
    CHECK(j["persistent_group_count"] == 2);
    CHECK(j["transient_groups"][2]["label"] == "B(1,2)");
    CHECK(j["transient_groups"][2]["domicile"] == json::array({1, 2}));
}

TEST_CASE("decoded trajectory JSON follows its schema") {
    DecodedPath d{{CellIndex{5}, CellIndex{6}}, -0.5};
    const ObservationHistory obs{Direction::E};
    const auto j = decoded_to_json(d, obs);
    CHECK(schema::validate(schema::load(kSchemas + "trajectory.schema.json"), j).empty());
    CHECK(j["final_state"] == 6);
    CHECK(j["observations"] == "E");
}

TEST_CASE("schema checker rejects bad documents") {
    const auto s = schema::load(kSchemas + "trajectory.schema.json");
    CHECK_FALSE(schema::validate(s, json{{"path", {1, 2}}}).empty());
    CHECK_FALSE(schema::validate(s, json{{"path", {0, 2}}, {"final_state", 2}, {"log_prob", 0.0},
                                         {"observations", "E"}, {"steps", 1}})
                     .empty());
}

TEST_CASE("config JSON round trip") {
    ExperimentConfig cfg;
    cfg.name = "trip";
    cfg.synthetic = "double_gyre:rows=11,cols=15";
    cfg.r = 0.8;
    cfg.dt = 0.25;
    cfg.rule = MappedSetRule::all_actions;
    cfg.modes = {PriorMode::probabilistic};
    cfg.steps = {5, 7};
    cfg.runs = 3;
    cfg.by_region = true;
    cfg.base_seed = 12345678901234ULL;
    cfg.noise_rate = 0.1;
    const auto j = config_to_json(cfg);
    CHECK(schema::validate(schema::load(kSchemas + "config.schema.json"), j).empty());
    const auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.dt == 0.25);
    CHECK(back.base_seed == cfg.base_seed);
}

TEST_CASE("config errors are collected before anything runs") {
    const auto j = json::parse(R"({"field": {"path": "x"}, "r": "high", "runs": 0, "modes": ["maybe"], "color": 1})");
    try {
        config_from_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() >= 4);
    }
}

TEST_CASE("shipped configs load and follow the config schema") {
    const auto s = schema::load(kSchemas + "config.schema.json");
    for (const char* name : {"fig5", "fig6", "fig7"}) {
        const std::string path = DRIFTLOC_SOURCE_DIR "/configs/" + std::string(name) + ".json";
        CHECK(schema::validate(s, schema::load(path)).empty());
        CHECK_NOTHROW(load_config(path).validate());
    }
    CHECK(load_config(DRIFTLOC_SOURCE_DIR "/configs/fig6.json").by_region);
}

TEST_CASE("CSV rows quote labels with commas") {
    const auto m = small_gyre();
    ExperimentConfig cfg;
    cfg.synthetic = "double_gyre";
    cfg.steps = {8};
    cfg.runs = 3;
    cfg.by_region = true;
    const auto result = run_experiment(cfg, m);
    const auto csv = experiment_to_csv(result);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == kExperimentCsvHeader);
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[4].rfind("4,\"B(1,2)\",\"B(1,2)\",det,8,3,", 0) == 0);

    const auto j = experiment_to_json(result, m);
    CHECK(schema::validate(schema::load(kSchemas + "experiment.schema.json"), j).empty());
}

}
