#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ggeval/graph_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "ggeval_cli_tests";

int run_cli(const std::string& args) {
    const std::string command = std::string(GGEVAL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

struct WorkDirFixture {
    WorkDirFixture() {
        fs::remove_all(kWorkDir);
        fs::create_directories(kWorkDir);
    }
};

} // namespace

TEST_CASE_METHOD(WorkDirFixture, "generate writes the requested number of graphs", "[cli]") {
    const fs::path out = kWorkDir / "ba.jsonl";
    const int code =
        run_cli("generate --kind ba --count 10 --nmin 100 --nmax 200 --k 4 --seed 7 --output " + out.string());
    REQUIRE(code == 0);
    const auto gs = ggeval::read_graphset(out.string());
    CHECK(gs.graphs.size() == 10);
    for (const auto& g : gs.graphs) {
        CHECK(g.n >= 100);
        CHECK(g.n <= 200);
        CHECK(g.edge_count() == 4 * (g.n - 4));
    }
}

TEST_CASE_METHOD(WorkDirFixture, "same argv and seed give identical output bytes", "[cli]") {
    const fs::path a = kWorkDir / "a.jsonl";
    const fs::path b = kWorkDir / "b.jsonl";
    REQUIRE(run_cli("generate --kind ws --count 5 --nmin 20 --nmax 30 --k 4 --seed 11 --output " + a.string()) == 0);
    REQUIRE(run_cli("generate --kind ws --count 5 --nmin 20 --nmax 30 --k 4 --seed 11 --output " + b.string()) == 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE_METHOD(WorkDirFixture, "mmd of a set against itself is zero with exit 0", "[cli]") {
    const fs::path x = kWorkDir / "x.jsonl";
    REQUIRE(run_cli("generate --kind grid --count 8 --nmin 12 --nmax 40 --output " + x.string()) == 0);
    const fs::path report = kWorkDir / "mmd.json";
    const int code = run_cli("mmd --a " + x.string() + " --b " + x.string() + " --output " + report.string());
    REQUIRE(code == 0);
    const auto j = load_json(report);
    for (const char* key : {"mmd_degree", "mmd_clustering", "mmd_orbit", "mmd_spectral"})
        CHECK(std::abs(j.at("metrics").at(key).get<double>()) <= 1e-12);
}

TEST_CASE_METHOD(WorkDirFixture, "perturb preserves node and edge counts", "[cli]") {
    const fs::path x = kWorkDir / "g.jsonl";
    const fs::path y = kWorkDir / "g_perturbed.jsonl";
    REQUIRE(run_cli("generate --kind ladder --count 3 --nmin 20 --nmax 30 --output " + x.string()) == 0);
    REQUIRE(run_cli("perturb --input " + x.string() + " --fraction 0.5 --seed 3 --output " + y.string()) == 0);
    const auto before = ggeval::read_graphset(x.string());
    const auto after = ggeval::read_graphset(y.string());
    REQUIRE(before.graphs.size() == after.graphs.size());
    for (std::size_t i = 0; i < before.graphs.size(); ++i) {
        CHECK(before.graphs[i].n == after.graphs[i].n);
        CHECK(before.graphs[i].edge_count() == after.graphs[i].edge_count());
    }
}

TEST_CASE_METHOD(WorkDirFixture, "order emits permutations with bandwidth", "[cli]") {
    const fs::path x = kWorkDir / "grid.jsonl";
    REQUIRE(run_cli("generate --kind grid --count 2 --nmin 16 --nmax 36 --output " + x.string()) == 0);
    const fs::path out = kWorkDir / "order.json";
    REQUIRE(run_cli("order --input " + x.string() + " --policy bfs-deg --output " + out.string()) == 0);
    const auto j = load_json(out);
    REQUIRE(j.size() == 2);
    CHECK(j[0].at("policy") == "bfs-deg");
    CHECK(j[0].at("permutation").size() == 16);
    CHECK(j[0].at("bandwidth").get<int>() >= 1);
}

TEST_CASE_METHOD(WorkDirFixture, "stats dumps per-graph histograms", "[cli]") {
    const fs::path x = kWorkDir / "s.jsonl";
    REQUIRE(run_cli("generate --kind grid --count 2 --nmin 9 --nmax 20 --output " + x.string()) == 0);
    const fs::path out = kWorkDir / "stats.json";
    REQUIRE(run_cli("stats --input " + x.string() + " --output " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(j.at("count") == 2);
    CHECK(j.at("graphs")[0].contains("degree"));
    CHECK(j.at("graphs")[0].contains("spectrum"));
    CHECK(j.at("graphs")[0].at("orbit_mean").size() == 15);
}

TEST_CASE_METHOD(WorkDirFixture, "train, embed, and eval-embed chain end to end", "[cli]") {
    const fs::path a = kWorkDir / "class_a.jsonl";
    const fs::path b = kWorkDir / "class_b.jsonl";
    REQUIRE(run_cli("generate --kind grid --count 12 --nmin 12 --nmax 40 --label 0 --output " + a.string()) == 0);
    REQUIRE(run_cli("generate --kind ladder --count 12 --nmin 12 --nmax 40 --label 1 --output " + b.string()) == 0);

    const fs::path model = kWorkDir / "model.json";
    REQUIRE(run_cli("train-classifier --input " + a.string() + " --input " + b.string() +
                    " --untrained --seed 5 --output " + model.string()) == 0);

    const fs::path emb = kWorkDir / "emb.json";
    REQUIRE(run_cli("embed --model " + model.string() + " --input " + a.string() + " --seed 5 --output " +
                    emb.string()) == 0);
    const auto ej = load_json(emb);
    CHECK(ej.at("dim") == 64);
    CHECK(ej.at("rows").size() == 12);

    const fs::path report = kWorkDir / "eval.json";
    REQUIRE(run_cli("eval-embed --model " + model.string() + " --real " + a.string() + " --gen " + a.string() +
                    " --k 5 --seed 5 --output " + report.string()) == 0);
    const auto j = load_json(report);
    for (const char* key : {"fd_raw", "fd", "precision", "recall", "density", "coverage", "f1_pr", "f1_dc"})
        CHECK(j.at("metrics").contains(key));
    CHECK(j.at("metrics").at("precision").get<double>() == 1.0);
    CHECK(j.at("metrics").at("f1_pr").get<double>() == 1.0);
    CHECK(std::abs(j.at("metrics").at("fd_raw").get<double>()) <= 1e-8);
}

TEST_CASE_METHOD(WorkDirFixture, "usage errors exit 1", "[cli]") {
    CHECK(run_cli("generate --kind ba") == 1);              // missing required flags
    CHECK(run_cli("no-such-subcommand") == 1);
    CHECK(run_cli("generate --kind nope --count 1 --output " + (kWorkDir / "x").string()) == 1);
}

TEST_CASE_METHOD(WorkDirFixture, "data errors exit 2", "[cli]") {
    CHECK(run_cli("mmd --a missing.jsonl --b missing.jsonl --output " + (kWorkDir / "r.json").string()) == 2);
    // invalid generator parameters are data errors too
    CHECK(run_cli("generate --kind ba --count 1 --nmin 3 --nmax 3 --k 4 --output " + (kWorkDir / "y").string()) ==
          2);
}

TEST_CASE_METHOD(WorkDirFixture, "failed runs leave no partial output file", "[cli]") {
    const fs::path out = kWorkDir / "never_written.jsonl";
    CHECK(run_cli("perturb --input does_not_exist.jsonl --fraction 0.5 --output " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE_METHOD(WorkDirFixture, "experiment subcommand produces a report directory", "[cli]") {
    const fs::path dir = kWorkDir / "exp";
    const int code = run_cli(
        "experiment --experiment perturbation --dataset-config base --desk-scale --untrained --levels 0,1 "
        "--repetitions 1 --metrics fd --target Gr --seed 21 --output " +
        dir.string());
    REQUIRE(code == 0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "reports" / "perturbation_Gr.json"));
}

TEST_CASE_METHOD(WorkDirFixture, "run subcommand consumes a config file", "[cli]") {
    const fs::path cfg_path = kWorkDir / "config.json";
    {
        std::ofstream out(cfg_path);
        out << R"({"dataset_config":"base","desk_scale":true,"untrained":true,
                   "metrics":["fd"],"levels":[0,1],"repetitions":1,
                   "seeds":{"master":33},"experiments":["perturbation"],"datasets":["Gr"]})";
    }
    const fs::path dir = kWorkDir / "run";
    REQUIRE(run_cli("run --config " + cfg_path.string() + " --output " + dir.string()) == 0);
    const auto manifest = load_json(dir / "manifest.json");
    CHECK(manifest.at("classes").size() == 5);
    CHECK(run_cli("run --config missing_config.json --output " + dir.string()) == 2);
}
