#pragma once

#include "invcol/graph.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace invcol {

using ClusterId = std::size_t;

struct Provenance {
    std::string engine;
    std::string dataset_label;
    // Parameter name -> textual value, kept sorted so the sidecar is stable.
    std::map<std::string, std::string> params;
    std::size_t iterations = 0;
    bool converged = true;
};

/// A partition of graph nodes. Cluster ids are positions in `clusters`.
struct Clustering {
    std::vector<std::vector<NodeId>> clusters;
    Provenance provenance;

    std::size_t size() const noexcept { return clusters.size(); }
    std::size_t node_count() const;

    /// Sorts members within each cluster and orders clusters by their smallest member.
    void canonicalize();

    /// Per-node cluster id. Throws DomainError unless this is a partition of [0, n).
    std::vector<ClusterId> labels(std::size_t n) const;

    static Clustering from_labels(std::span<const ClusterId> labels);
};

/// True when the clusters are nonempty, disjoint and cover exactly [0, n).
bool is_partition(const Clustering& clustering, std::size_t n);

/// Adjusted Rand Index between two labelings of the same nodes.
double adjusted_rand_index(std::span<const ClusterId> a, std::span<const ClusterId> b);

/// Clustering keyed by publication id, used where universes differ (matching, reports).
struct PubClustering {
    std::string label;
    std::vector<std::vector<std::string>> clusters;
};

PubClustering to_pub_clustering(const Clustering& clustering, const CitationGraph& graph,
                                std::string label);

/// Writes `cluster_id<TAB>pub_id` lines, clusters in id order.
void write_clustering(const Clustering& clustering, const CitationGraph& graph,
                      const std::filesystem::path& path);
/// Reads a clustering TSV as pub_id sets. Cluster ids must be non-negative integers;
/// they are compacted to 0..k-1 in ascending numeric order.
PubClustering read_pub_clustering(const std::filesystem::path& path, std::string label = {});
/// Reads a clustering TSV and resolves it against `graph`; it must partition the graph.
Clustering read_clustering(const std::filesystem::path& path, const CitationGraph& graph);

void write_provenance(const Provenance& provenance, std::size_t cluster_count,
                      const std::filesystem::path& path);

}  // namespace invcol
