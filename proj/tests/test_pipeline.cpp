#include "invcol/error.hpp"
#include "invcol/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace invcol;
namespace fs = std::filesystem;

namespace {

const fs::path kToy = INVCOL_TOY_CONFIG;

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "invcol-pipeline-test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

pipeline::Config toy(const std::string& name) {
    auto cfg = pipeline::load_config(kToy);
    cfg.output_dir = scratch(name);
    return cfg;
}

struct Cli {
    int status;
    std::string out;
};

Cli cli(const std::string& args) {
    const std::string cmd = std::string("\"") + INVCOL_CLI + "\" " + args + " 2>/dev/null";
    Cli r{0, {}};
    FILE* p = popen(cmd.c_str(), "r");
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

TEST(Config, DefaultsAndRelativePaths) {
    auto cfg = pipeline::parse_config("[dataset.1999]\nedges = e.tsv\n", "/base");
    ASSERT_EQ(cfg.datasets.size(), 1u);
    EXPECT_EQ(cfg.datasets[0].label, "1999");
    EXPECT_EQ(cfg.datasets[0].edges, fs::path("/base/e.tsv"));
    EXPECT_FALSE(cfg.datasets[0].metadata.has_value());
    EXPECT_EQ(cfg.seed, 1u);
    EXPECT_FALSE(cfg.mkkm_k.has_value());
    EXPECT_DOUBLE_EQ(cfg.mcl.inflation, 2.0);
    EXPECT_EQ(cfg.selection.min_size, 30u);
    EXPECT_TRUE(cfg.shuffle_datasets.empty());
}

TEST(Config, ParsesEverySection) {
    auto cfg = pipeline::parse_config(R"(
[pipeline]
seed = 9
output_dir = out
threads = 2
[dataset.a]
edges = a.tsv
metadata = a.jsonl
[dataset.b]
edges = /abs/b.tsv
[mcl]
inflation = 1.8
[mkkm]
k = 4
refine_iterations = 7
[selection]
max_conductance = 0.3
[coherence]
reps = 5
[shuffle]
datasets = a, b
swaps = 100
)",
                                      "/cfg");
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.output_dir, fs::path("/cfg/out"));
    EXPECT_EQ(cfg.threads, 2u);
    ASSERT_EQ(cfg.datasets.size(), 2u);
    EXPECT_EQ(cfg.datasets[1].edges, fs::path("/abs/b.tsv"));
    EXPECT_DOUBLE_EQ(cfg.mcl.inflation, 1.8);
    EXPECT_EQ(cfg.mkkm_k, 4u);
    EXPECT_EQ(cfg.mkkm_refine_iterations, 7u);
    EXPECT_DOUBLE_EQ(cfg.selection.max_conductance, 0.3);
    EXPECT_EQ(cfg.coherence_reps, 5u);
    EXPECT_EQ(cfg.shuffle_datasets, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(cfg.shuffle_swaps, 100u);
}

TEST(Config, UnknownKeysAndBadValuesRejected) {
    EXPECT_THROW(pipeline::parse_config("[mcl]\ninflaton = 2\n", "/"), ValidationError);
    EXPECT_THROW(pipeline::parse_config("[bogus]\nx = 1\n", "/"), ValidationError);
    EXPECT_THROW(pipeline::parse_config("[mcl]\ninflation = two\n", "/"), ValidationError);
    EXPECT_THROW(pipeline::parse_config("[mkkm]\nk = -3\n", "/"), ValidationError);
}

TEST(Validate, CrossFieldRules) {
    auto cfg = pipeline::load_config(kToy);
    EXPECT_NO_THROW(pipeline::validate(cfg));

    auto bad = cfg;
    bad.selection.min_size = 400;
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
    bad = cfg;
    bad.mcl.inflation = 1.0;
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
    bad = cfg;
    bad.shuffle_datasets = {"1850"};
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
    bad = cfg;
    bad.datasets.push_back(bad.datasets[0]);
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
    bad = cfg;
    bad.datasets[0].label = "combined";
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
    bad = cfg;
    bad.datasets.clear();
    EXPECT_THROW(pipeline::validate(bad), ValidationError);
}

TEST(Pipeline, MissingEdgeFileIsAValidationFailure) {
    auto cfg = toy("missing-edges");
    cfg.datasets[0].edges = "/nonexistent/edges.tsv";
    auto r = pipeline::run_pipeline(cfg);
    EXPECT_EQ(r.exit_code, pipeline::kExitValidation);
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_EQ(r.failure->stage, "validate");
    EXPECT_NE(r.failure->cause.find("/nonexistent/edges.tsv"), std::string::npos);
    EXPECT_TRUE(fs::is_empty(cfg.output_dir));
}

TEST(Pipeline, ToyRunAcceptsBothCommunities) {
    auto cfg = toy("toy");
    auto r = pipeline::run_pipeline(cfg);
    ASSERT_EQ(r.exit_code, pipeline::kExitOk) << (r.failure ? r.failure->cause : "");
    EXPECT_EQ(r.accepted_communities, 2u);
    EXPECT_EQ(lines(cfg.output_dir / "communities/accepted.jsonl").size(), 2u);

    auto manifest = nlohmann::json::parse(slurp(r.manifest));
    EXPECT_EQ(manifest.at("status"), "ok");
    EXPECT_EQ(manifest.at("seed"), 7);
    std::set<std::string> listed;
    for (const auto& a : manifest.at("artifacts")) {
        const std::string path = a.at("path");
        listed.insert(path);
        EXPECT_TRUE(fs::exists(cfg.output_dir / path)) << path;
        EXPECT_EQ(a.at("sha256").get<std::string>().size(), 64u);
    }
    for (const auto& rel : r.artifacts) EXPECT_TRUE(listed.contains(rel.generic_string()));
    for (const char* must : {"index.json", "clusters/2000.mcl.tsv", "clusters/2000.mkkm.tsv",
                             "clusters/combined.mcl.tsv", "metrics/2000.mcl.csv",
                             "coherence/2000.mcl.csv", "selection/selected.csv",
                             "shuffle/2000.comparison.csv", "reports/table1.csv",
                             "reports/table3.csv"}) {
        EXPECT_TRUE(listed.contains(must)) << must;
    }
    bool has_config = false;
    for (const auto& in : manifest.at("inputs")) has_config = has_config || in.at("role") == "config";
    EXPECT_TRUE(has_config);

    auto t1 = lines(cfg.output_dir / "reports/table1.csv");
    ASSERT_GE(t1.size(), 3u);
    EXPECT_EQ(t1[0], pipeline::kTable1Header);
    auto t3 = lines(cfg.output_dir / "reports/table3.csv");
    EXPECT_EQ(t3[0], pipeline::kTable3Header);
    EXPECT_EQ(t3.size(), 3u);

    // Rebuilding the tables from the artifacts reproduces them byte for byte.
    const std::string before = slurp(cfg.output_dir / "reports/table3.csv");
    pipeline::report_tables(cfg.output_dir);
    EXPECT_EQ(slurp(cfg.output_dir / "reports/table3.csv"), before);
}

TEST(Pipeline, EmptySelectionGivesHeaderOnlyTable) {
    auto cfg = toy("empty-selection");
    cfg.selection.min_size = 300;
    cfg.shuffle_datasets.clear();
    auto r = pipeline::run_pipeline(cfg);
    ASSERT_EQ(r.exit_code, pipeline::kExitOk) << (r.failure ? r.failure->cause : "");
    EXPECT_EQ(r.accepted_communities, 0u);
    EXPECT_EQ(lines(cfg.output_dir / "reports/table3.csv"),
              std::vector<std::string>{std::string(pipeline::kTable3Header)});
    EXPECT_FALSE(fs::exists(cfg.output_dir / "shuffle"));
}

TEST(Pipeline, StageFailureMovesArtifactsAside) {
    auto dir = scratch("broken-input");
    fs::copy_file(kToy.parent_path() / "edges.tsv", dir / "edges.tsv");
    std::ofstream(dir / "metadata.jsonl") << "{\"pub_id\": \n";
    auto cfg = pipeline::parse_config("[dataset.2000]\nedges = edges.tsv\nmetadata = metadata.jsonl\n", dir);
    cfg.output_dir = dir / "out";
    auto r = pipeline::run_pipeline(cfg);
    EXPECT_EQ(r.exit_code, pipeline::kExitStageFailure);
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_EQ(r.failure->stage, "ingest");
    auto err = nlohmann::json::parse(slurp(cfg.output_dir / "failed/error.json"));
    EXPECT_EQ(err.at("stage"), "ingest");
    EXPECT_FALSE(fs::exists(cfg.output_dir / "reports"));
}

TEST(Report, MissingArtifactIsNamed) {
    auto cfg = toy("report-missing");
    cfg.shuffle_datasets.clear();
    ASSERT_EQ(pipeline::run_pipeline(cfg).exit_code, pipeline::kExitOk);
    fs::remove(cfg.output_dir / "metrics/2000.mcl.csv");
    try {
        pipeline::report_tables(cfg.output_dir);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("metrics/2000.mcl.csv"), std::string::npos) << e.what();
    }
}

TEST(Cli, UnknownFlagFails) {
    EXPECT_NE(cli("metrics --no-such-flag").status, 0);
    EXPECT_NE(cli("no-such-command").status, 0);
}

TEST(Cli, ShufflePrintsReport) {
    const auto edges = (kToy.parent_path() / "edges.tsv").string();
    auto r = cli("shuffle --edges \"" + edges + "\" --swaps 50 --seed 3");
    ASSERT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("requested_swaps"), 50);
    EXPECT_EQ(j.at("seed"), 3);
    EXPECT_EQ(j.at("performed_swaps").get<int>() + j.at("rejected_swaps").get<int>(), 50);
}

TEST(Cli, PipelineValidationExitCode) {
    auto dir = scratch("cli-validation");
    std::ofstream(dir / "bad.cfg") << "[dataset.x]\nedges = nowhere.tsv\n";
    auto r = cli("pipeline --config \"" + (dir / "bad.cfg").string() + "\" --output-dir \"" +
                 (dir / "out").string() + "\"");
    EXPECT_EQ(r.status, pipeline::kExitValidation);
}

TEST(Cli, MclOnToyData) {
    auto dir = scratch("cli-mcl");
    const auto edges = (kToy.parent_path() / "edges.tsv").string();
    auto r = cli("cluster-mcl --edges \"" + edges + "\" --out \"" + (dir / "c.tsv").string() + "\"");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(lines(dir / "c.tsv").size(), 60u);
}
