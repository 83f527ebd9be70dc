#pragma once

// Batch orchestration: configuration, the staged run over all datasets, the
// artifact manifest, and the summary reports.

#include "invcol/community.hpp"
#include "invcol/matching.hpp"
#include "invcol/mcl.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invcol::pipeline {

inline constexpr std::string_view kCombinedLabel = "combined";
inline constexpr std::string_view kOutputDirEnv = "INVCOL_OUTPUT_DIR";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitStageFailure = 2;

struct DatasetSpec {
    std::string label;
    std::filesystem::path edges;
    std::optional<std::filesystem::path> metadata;
};

struct Config {
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;
    unsigned threads = 1;
    std::vector<DatasetSpec> datasets;  // slices, in file order
    mcl::Params mcl;
    std::optional<std::size_t> mkkm_k;  // empty means derive from the slice's MCL result
    std::size_t mkkm_coarsen_until = 0;
    std::size_t mkkm_refine_iterations = 50;
    SelectionCriteria selection;
    std::optional<std::filesystem::path> stoplist;
    std::size_t coherence_reps = 50;
    std::size_t coherence_min_articles = 10;
    EdgeCaseThresholds edge_cases;
    std::vector<std::string> shuffle_datasets;  // empty disables the null-model stage
    std::size_t shuffle_swaps = 0;              // 0 means 10 * edge count
    // Cluster size window for the original-vs-shuffled comparison.
    std::size_t shuffle_min_size = 5;
    std::size_t shuffle_max_size = 350;
    std::filesystem::path config_path;  // set by load_config; recorded in the manifest
};

/// Parses INI text. Relative paths resolve against `base_dir`. Throws
/// ValidationError on unknown sections or keys and malformed values.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

/// Checks cross-field rules and that every referenced input exists.
void validate(const Config& config);

struct StageFailure {
    std::string stage;
    std::string cause;
};

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> artifacts;  // relative to the output directory
    std::size_t accepted_communities = 0;
    std::optional<StageFailure> failure;
};

/// Runs every stage. Validation problems give kExitValidation before anything is
/// written; a failing stage gives kExitStageFailure with the artifacts written so
/// far moved under `failed/`.
RunResult run_pipeline(const Config& config);

/// Rebuilds reports/table1.csv and reports/table3.csv from a run's artifacts.
/// Throws Error naming the first missing artifact.
void report_tables(const std::filesystem::path& output_dir);

inline constexpr std::string_view kTable1Header =
    "dataset,num_clusters,num_articles,mean_size,median_size,mean_conductance,mean_coherence";
inline constexpr std::string_view kTable3Header =
    "match_label,size_m,size_g,cond_m,cond_g,coh_m,coh_g,int_edges_m,int_edges_g,jc";

}  // namespace invcol::pipeline
