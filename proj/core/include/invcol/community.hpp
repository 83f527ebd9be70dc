#pragma once

// Author communities behind article clusters, and detection of degenerate
// ("edge-case") clusters dominated by one hub article or a lone article.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invcol {

struct CommunityProfile {
    std::string dataset_label;
    ClusterId cluster_id = 0;
    std::size_t size = 0;
    std::size_t authorless_papers = 0;
    bool no_authors = false;  // every member record lacks authors
    std::map<std::string, std::size_t> authors;  // author -> papers in the cluster
    double one_paper_fraction = 0.0;
    // Nearest-rank percentiles of the per-author paper counts.
    std::size_t p95_count = 0;
    std::size_t p99_count = 0;
    std::size_t max_count = 0;
    std::size_t top_authors = 0;  // authors at or above the 95th percentile count
    // Share of ordered pairs (A, B) of distinct top authors where a paper of A in
    // the cluster cites a paper of B in the cluster.
    double top_author_citation_density = 0.0;
};

/// Nearest-rank percentile (p in (0, 100]) of an ascending sequence; 0 when empty.
std::size_t nearest_rank(std::span<const std::size_t> sorted, double p);

/// Profile of one cluster of `dataset` nodes.
CommunityProfile build_profile(ClusterId cluster_id, std::span<const NodeId> cluster,
                               const Dataset& dataset);

struct AuthorDistribution {
    std::map<std::string, std::size_t> clusters_per_author;
    std::size_t author_count = 0;
    double fraction_one = 0.0;
    double fraction_le5 = 0.0;
    double mean_clusters = 0.0;
    std::size_t max_clusters = 0;
};

/// For each author, the number of distinct clusters holding at least one of their papers.
/// `records[u]` describes node u of the clustered graph.
AuthorDistribution author_cluster_distribution(const Clustering& clustering,
                                               std::span<const PubRecord> records);

enum class EdgeCaseKind { Normal, SingletonHighExternal, HubCiting, HubCited };

std::string_view to_string(EdgeCaseKind kind);

struct EdgeCaseThresholds {
    std::size_t external_threshold = 50;
    double hub_fraction = 0.9;
};

struct EdgeCaseLabel {
    EdgeCaseKind kind = EdgeCaseKind::Normal;
    std::size_t size = 0;
    std::size_t external_edges = 0;  // directed edges with exactly one endpoint inside
    std::optional<NodeId> hub;
    std::size_t hub_links = 0;  // in-cluster citations made (HubCiting) or received (HubCited)
};

/// Labels in precedence order: a singleton with at least external_threshold
/// external edges; a member citing at least hub_fraction of the other members; a
/// member cited by at least hub_fraction of them; otherwise Normal.
EdgeCaseLabel classify_edge_case(std::span<const NodeId> cluster, const CitationGraph& graph,
                                 const EdgeCaseThresholds& thresholds = {});

struct RejectedCommunity {
    CommunityProfile profile;
    EdgeCaseLabel label;
};

struct CommunityFilterResult {
    std::vector<CommunityProfile> accepted;
    std::vector<RejectedCommunity> rejected;
};

/// Keeps profiles labeled Normal. `labels[i]` belongs to `profiles[i]`.
CommunityFilterResult filter_communities(std::span<const CommunityProfile> profiles,
                                         std::span<const EdgeCaseLabel> labels);

/// One JSON object per line.
void write_profiles_jsonl(std::span<const CommunityProfile> profiles,
                          const std::filesystem::path& path);
void write_author_distribution(const AuthorDistribution& dist, const std::filesystem::path& path);

}  // namespace invcol
