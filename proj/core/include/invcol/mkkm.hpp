#pragma once

// Multilevel weighted kernel k-means for the normalized-cut objective:
// heavy-edge coarsening, k-region growing at the coarsest level, and boundary
// refinement while projecting back to the input graph.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace invcol::mkkm {

/// Undirected weighted graph in CSR form.
///
/// `node_weight` counts the input nodes merged into each node. `volume` is the
/// sum of input-graph degrees of those nodes, so it includes edge weight that
/// coarsening folded inside a node.
struct WeightedGraph {
    std::vector<std::size_t> offsets{0};
    std::vector<NodeId> targets;
    std::vector<double> weights;
    std::vector<double> node_weight;
    std::vector<double> volume;

    std::size_t node_count() const noexcept { return node_weight.size(); }
    std::size_t degree(NodeId u) const { return offsets[u + 1] - offsets[u]; }
    std::span<const NodeId> neighbors(NodeId u) const {
        return {targets.data() + offsets[u], degree(u)};
    }
    std::span<const double> neighbor_weights(NodeId u) const {
        return {weights.data() + offsets[u], degree(u)};
    }
    double edge_weight(NodeId u, NodeId v) const;
    double total_edge_weight() const;

    /// Builds from undirected (u, v, w) triples; parallel edges are summed and
    /// self-loops rejected. Volumes default to weighted degrees.
    static WeightedGraph from_edges(std::size_t n,
                                    std::span<const std::tuple<NodeId, NodeId, double>> edges);
    /// Symmetrized citation graph with unit weights.
    static WeightedGraph from_citation_graph(const CitationGraph& graph);
};

struct CoarseLevel {
    WeightedGraph graph;
    std::vector<NodeId> mapping;  // fine node -> coarse node
};

/// Heavy-edge matching with nodes visited in seeded random order.
CoarseLevel coarsen(const WeightedGraph& graph, std::uint64_t seed);
/// Heavy-edge matching with an explicit visit order (a permutation of the nodes).
CoarseLevel coarsen_with_order(const WeightedGraph& graph, std::span<const NodeId> order);

/// Sum over clusters of cut(C) / vol(C); clusters with zero volume contribute 0.
double normalized_cut(const WeightedGraph& graph, std::span<const ClusterId> labels);

struct BaseResult {
    std::vector<ClusterId> labels;
    std::size_t padded = 0;  // requested clusters that could not be formed (k > n)
};

/// Seeded k-region growing. Seeds are drawn k-means++ style on hop distance
/// (unreachable nodes first); regions then absorb the unassigned node with the
/// heaviest connection to any region.
BaseResult base_cluster(const WeightedGraph& graph, std::size_t k, std::uint64_t seed);

struct RefineStats {
    std::size_t sweeps = 0;
    std::size_t moves = 0;
    std::vector<double> objective;  // normalized cut before the first sweep and after each sweep
};

/// Boundary refinement: moves single nodes to the neighboring cluster that most
/// decreases normalized cut. Never empties a cluster.
std::vector<ClusterId> refine(const WeightedGraph& graph, std::vector<ClusterId> labels,
                              std::size_t max_sweeps, RefineStats* stats = nullptr);

struct Params {
    std::size_t k = 2;
    std::size_t coarsen_until = 0;  // 0 means 20 * k
    std::size_t refine_iterations = 50;
    std::size_t base_restarts = 30;  // seedings tried at the coarsest level
    std::uint64_t seed = 1;
};

Clustering cluster(const CitationGraph& graph, const Params& params);
Clustering cluster(const WeightedGraph& graph, const Params& params);

/// Cluster count for this engine given an MCL result: half as many, rounded up, at least 1.
std::size_t choose_k(const Clustering& mcl_clustering);
std::size_t choose_k(std::size_t mcl_cluster_count);

}  // namespace invcol::mkkm
