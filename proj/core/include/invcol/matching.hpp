#pragma once

// Overlap matching between clusterings and the candidate selection filters.
// Clusters are compared as publication-id sets so clusterings built on
// different node universes (a year slice against the combined graph) line up.

#include "invcol/clustering.hpp"
#include "invcol/metrics.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace invcol {

struct ClusterMatch {
    ClusterId source_cluster_id = 0;
    std::string target_label;
    std::optional<ClusterId> target_cluster_id;  // empty when nothing intersects
    std::size_t source_size = 0;
    std::size_t target_size = 0;
    std::size_t intersection = 0;
    double jaccard = 0.0;
    double proportion = 0.0;  // intersection / source_size
};

double jaccard(std::size_t intersection, std::size_t size_a, std::size_t size_b);

/// pub_id -> cluster lookup over one target clustering.
class MatchIndex {
public:
    explicit MatchIndex(const PubClustering& target);

    /// Best target cluster for a source set: largest intersection, then larger
    /// Jaccard, then lowest cluster id. Duplicate source ids count once.
    ClusterMatch best(std::span<const std::string> source) const;

    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
    std::vector<std::size_t> sizes_;
    std::unordered_map<std::string, ClusterId> owner_;
};

ClusterMatch best_match(std::span<const std::string> source, const PubClustering& target);

/// Best match of every source cluster over the union of the target clusterings.
/// Ties across targets go to the earlier target in `targets`.
std::vector<ClusterMatch> match_all(const PubClustering& source,
                                    std::span<const PubClustering> targets);

struct SelectionCriteria {
    std::size_t min_size = 30;
    std::size_t max_size = 350;
    double max_conductance = 0.5;
    double min_jaccard = 0.9;
};

/// Clusters with min_size <= size <= max_size, conductance <= max_conductance and
/// best-match Jaccard > min_jaccard, ascending by id. Clusters missing from
/// `matches` are not selected.
std::vector<ClusterId> select_candidates(std::span<const ClusterMetrics> metrics,
                                         std::span<const ClusterMatch> matches,
                                         const SelectionCriteria& criteria);

/// CSV `source_id,target_label,target_id,intersection,jaccard,proportion`.
void write_matches_csv(std::span<const ClusterMatch> matches, const std::filesystem::path& path);
std::vector<ClusterMatch> read_matches_csv(const std::filesystem::path& path);

}  // namespace invcol
