#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = FAIRHC_CLI_PATH;
const std::string kFixture = FAIRHC_FIXTURE_DIR "/fixture16.csv";
const std::string kDataFlags =
    " --input " + kFixture +
    " --numeric-cols height,weight,score --color-col group --color-map blue=1,red=2";

fs::path scratch() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("fairhc_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>" + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("cli: run on the fixture, then audit the emitted tree") {
    const auto report = scratch() / "run.json";
    const auto tree = scratch() / "tree.json";
    REQUIRE(run("run" + kDataFlags + " --eps 0.2 --out " + report.string() + " --emit-tree " +
                tree.string()) == 0);
    auto j = load(report);
    CHECK(j["ratio_cost"].get<double>() >= 0.0);
    CHECK(j["audit"]["passed"].get<bool>());
    CHECK(j["histogram"]["bins"] == 50);
    CHECK(j["dataset_balance"][0].get<double>() == doctest::Approx(0.25));
    for (const char* key : {"params", "cost_vanilla", "cost_fair", "ratio_cost", "histogram",
                            "dataset_balance", "audit", "timings_ms"}) {
        CHECK(j.contains(key));
    }

    const auto audit = scratch() / "audit.json";
    CHECK(run("audit" + kDataFlags + " --eps 0.2 --tree " + tree.string() + " --out " +
              audit.string()) == 0);
    CHECK(load(audit)["audit"]["passed"].get<bool>());
}

TEST_CASE("cli: default eps puts the whole fixture in one base case") {
    const auto report = scratch() / "default.json";
    REQUIRE(run("run" + kDataFlags + " --out " + report.string()) == 0);
    auto j = load(report);
    CHECK(j["audit"]["base_case_frames"] == 1);
    CHECK(j["params"]["eps"].get<double>() == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("cli: identical configs give identical reports apart from timings") {
    const auto a = scratch() / "a.json";
    const auto b = scratch() / "b.json";
    const std::string flags = " --n 12 --seed 5 --eps 0.2";
    REQUIRE(run("run" + kDataFlags + flags + " --out " + a.string()) == 0);
    REQUIRE(run("run" + kDataFlags + flags + " --out " + b.string()) == 0);
    auto ja = load(a);
    auto jb = load(b);
    ja.erase("timings_ms");
    jb.erase("timings_ms");
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("cli: replications produce an aggregate block") {
    const auto out = scratch() / "reps.json";
    const auto csv = scratch() / "hist.csv";
    REQUIRE(run("run" + kDataFlags + " --n 12 --seed 1 --replications 3 --eps 0.2 --out " +
                out.string() + " --histogram-csv " + csv.string()) == 0);
    auto j = load(out);
    CHECK(j["aggregate"]["replications"] == 3);
    CHECK(j["aggregate"]["seeds"] == nlohmann::json::array({1, 2, 3}));
    CHECK(j["aggregate"].contains("stderr_ratio_cost"));
    CHECK(j["reports"].size() == 3);
    CHECK(slurp(csv).rfind("bin_midpoint,count\n", 0) == 0);
}

TEST_CASE("cli: a moved leaf is a conservation violation") {
    const auto tree = scratch() / "tree2.json";
    REQUIRE(run("run" + kDataFlags + " --eps 0.2 --out " + (scratch() / "r2.json").string() +
                " --emit-tree " + tree.string()) == 0);
    auto t = load(tree);
    // Relabel the first leaf as a copy of the second: one row vanishes, one repeats.
    nlohmann::json* first = nullptr;
    nlohmann::json* second = nullptr;
    for (auto& node : t["nodes"]) {
        if (node.contains("leaf")) {
            (first ? second : first) = &node;
            if (second) {
                break;
            }
        }
    }
    REQUIRE(second != nullptr);
    (*first)["leaf"] = (*second)["leaf"];
    const auto bad = scratch() / "corrupt.json";
    std::ofstream(bad) << t.dump();
    const auto audit = scratch() / "corrupt_audit.json";
    CHECK(run("audit" + kDataFlags + " --eps 0.2 --tree " + bad.string() + " --out " +
              audit.string()) == 3);
    auto j = load(audit);
    CHECK_FALSE(j["audit"]["passed"].get<bool>());
    CHECK(j["audit"]["conservation"].size() >= 2);
}

TEST_CASE("cli: the vanilla tree fails the fairness audit") {
    const auto data = scratch() / "census_like.csv";
    REQUIRE(run("synth --rows 800 --seed 3 --out " + data.string()) == 0);
    const std::string flags =
        " --input " + data.string() +
        " --numeric-cols age,fnlwgt,education-num,capital-gain,capital-loss,hours-per-week"
        " --color-col race --color-map nonwhite=1,white=2 --n 128 --seed 2";
    const auto vanilla = scratch() / "vanilla.json";
    const auto fair = scratch() / "fair.json";
    REQUIRE(run("run" + flags + " --out " + (scratch() / "r3.json").string() +
                " --emit-tree " + fair.string() + " --emit-vanilla-tree " + vanilla.string()) == 0);

    const std::string bounds = " --alpha 0.02,0.6 --beta 0.4,0.98";
    const auto va = scratch() / "vanilla_audit.json";
    CHECK(run("audit" + flags + bounds + " --tree " + vanilla.string() + " --out " +
              va.string()) == 3);
    auto j = load(va);
    CHECK(j["audit"]["fairness_violations"].size() > 0);

    // Without explicit bounds the leaf-child rule alone flags the vanilla tree.
    CHECK(run("audit" + flags + " --tree " + vanilla.string() + " --out " + va.string()) == 3);
    CHECK(run("audit" + flags + " --tree " + fair.string() + " --out " +
              (scratch() / "fair_audit.json").string()) == 0);
}

TEST_CASE("cli: exit codes and untouched inputs") {
    const std::string before = slurp(kFixture);
    CHECK(run("run --input " + kFixture) == 1);                      // missing required flags
    CHECK(run("bogus") == 1);
    CHECK(run("run" + kDataFlags + " --h 3 --out -") == 1);          // h < k^colors
    CHECK(run("run --input /nonexistent.csv --numeric-cols a --color-col g --color-map x=1") == 2);
    CHECK(run("run" + kDataFlags + " --n 100") == 2);                // more rows than data

    const auto junk = scratch() / "junk.json";
    std::ofstream(junk) << "{\"nodes\": [";
    CHECK(run("audit" + kDataFlags + " --tree " + junk.string()) == 2);
    auto err = slurp(scratch() / "stderr.txt");
    CHECK(nlohmann::json::parse(err)["error"] == "data");
    CHECK(slurp(kFixture) == before);
}
