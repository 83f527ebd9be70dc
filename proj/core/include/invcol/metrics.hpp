#pragma once

// Topological cluster quality: conductance, internal edge counts and the
// weighted citation count. Conductance and cut counts are taken on the
// symmetrized citation graph (an undirected edge wherever either paper cites
// the other); internal_edges counts directed citations.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace invcol {

/// cut(S) / min(vol(S), vol(V \ S)), 0 when nothing is cut.
/// Throws DomainError unless S is a nonempty proper subset of the nodes.
double conductance(const CitationGraph& graph, std::span<const NodeId> members);

/// Directed citations with both endpoints in `members`.
std::size_t internal_edges(const CitationGraph& graph, std::span<const NodeId> members);

/// In-degree of the node plus the in-degrees of its distinct in- and out-neighbors.
std::size_t weighted_citation_count(const CitationGraph& graph, NodeId node);

struct ClusterMetrics {
    ClusterId cluster_id = 0;
    std::size_t size = 0;
    std::size_t internal_edges = 0;
    std::size_t cut_edges = 0;
    double conductance = 0.0;
};

struct MetricsSummary {
    std::size_t cluster_count = 0;
    std::size_t node_count = 0;
    double mean_size = 0.0;
    double median_size = 0.0;
    double mean_conductance = 0.0;
};

struct MetricsTable {
    std::vector<ClusterMetrics> rows;
    MetricsSummary summary;
};

/// One row per cluster. A cluster covering the whole graph has conductance 0.
MetricsTable metrics_table(const CitationGraph& graph, const Clustering& clustering);

double median(std::vector<double> values);

/// CSV with header `cluster_id,size,internal_edges,cut_edges,conductance`.
void write_metrics_csv(const MetricsTable& table, const std::filesystem::path& path);
MetricsTable read_metrics_csv(const std::filesystem::path& path);

}  // namespace invcol
