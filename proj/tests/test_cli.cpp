#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "schema_check.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(DRIFTLOC_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("driftloc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kFixture = DRIFTLOC_SOURCE_DIR "/data/double_gyre_21x29.field";
const std::string kSchemas = DRIFTLOC_SOURCE_DIR "/schemas/";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify prints the decomposition") {
    const auto r = run("classify --field " + kFixture);
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(schema::validate(schema::load(kSchemas + "decomposition.schema.json"), j).empty());
    CHECK(j["persistent_group_count"] == 2);
    CHECK(j["transient_group_count"] == 3);
}

TEST_CASE("classify of a still field at r = 1 gives one attractor per interior cell") {
    const auto r = run("classify --synthetic uniform:u=0,v=0,rows=4,cols=5 --r 1");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["persistent_group_count"] == 6);
}

TEST_CASE("simulate then localize round trip at r = 1") {
    const auto dir = scratch("roundtrip");
    const auto obs = (dir / "obs.txt").string();
    const auto sim = run("simulate --field " + kFixture + " --r 1 --start 215 --steps 30 --seed 4 --obs-out " + obs);
    REQUIRE(sim.code == 0);
    const auto truth = json::parse(sim.out)["path"];
    const auto loc = run("localize --field " + kFixture + " --r 1 --start 215 --obs " + obs + " --out-dir " +
                         dir.string());
    REQUIRE(loc.code == 0);
    const auto j = json::parse(loc.out);
    CHECK(schema::validate(schema::load(kSchemas + "trajectory.schema.json"), j).empty());
    CHECK(j["path"] == truth);
    CHECK(j["log_prob"] == 0.0);
    CHECK(fs::exists(dir / "trajectory.json"));
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    write(dir / "bad_obs.txt", "N Q\n");
    write(dir / "west.txt", "E E W\n");
    write(dir / "bad.field", "driftfield 1\nrows 2\n");
    write(dir / "bad.json", R"({"field": {"path": "x"}, "runs": -1})");
    CHECK(run("classify --field " + (dir / "bad.field").string()).code == 2);
    CHECK(run("localize --synthetic uniform:rows=5,cols=8 --r 1 --start 19 --obs " + (dir / "bad_obs.txt").string())
              .code == 2);
    CHECK(run("localize --synthetic uniform:rows=5,cols=8 --r 1 --start 19 --obs " + (dir / "west.txt").string())
              .code == 3);
    CHECK(run("experiment --config " + (dir / "bad.json").string()).code == 1);
    CHECK(run("classify --field " + kFixture + " --r 2").code != 0);
    CHECK(run("frobnicate").code != 0);
}

TEST_CASE("experiment writes reports that follow the schema") {
    const auto dir = scratch("experiment");
    write(dir / "cfg.json", R"({"name": "tiny", "field": {"synthetic": "double_gyre:rows=11,cols=15"},
        "steps": [6, 9], "runs": 4, "outputs": {"csv": "tiny.csv", "json": "out/tiny.json"}})");
    const auto r = run("experiment --config " + (dir / "cfg.json").string() + " --out-dir " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("T=9/det") != std::string::npos);
    std::ifstream csv(dir / "tiny.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("condition,label,region,mode,steps,runs,", 0) == 0);
    const auto j = schema::load((dir / "out/tiny.json").string());
    CHECK(schema::validate(schema::load(kSchemas + "experiment.schema.json"), j).empty());
    CHECK(j["conditions"].size() == 2);
}

TEST_CASE("synth writes a loadable field") {
    const auto dir = scratch("synth");
    const auto out = (dir / "saddle.field").string();
    REQUIRE(run("synth --synthetic saddle:rows=6,cols=7 --output " + out).code == 0);
    CHECK(run("classify --field " + out).code == 0);
}

}
