#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// These deliberately avoid the library's data structures: dense matrices,
// explicit edge sets and exhaustive enumeration.

#include "invcol/graph.hpp"
#include "invcol/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using invcol::NodeId;
using Edge = std::pair<NodeId, NodeId>;

inline std::vector<std::string> numbered_ids(std::size_t n, const std::string& prefix = "n") {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
    return ids;
}

inline invcol::CitationGraph make_graph(std::size_t n, const std::vector<Edge>& edges) {
    return invcol::CitationGraph::from_edges(numbered_ids(n), edges);
}

/// Every labeled simple undirected graph on n nodes that is connected, as u<v edge lists.
inline std::vector<std::vector<Edge>> connected_graphs(std::size_t n) {
    std::vector<Edge> pairs;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    }
    std::vector<std::vector<Edge>> out;
    const std::uint64_t total = std::uint64_t{1} << pairs.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<Edge> edges;
        std::vector<NodeId> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](NodeId x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::size_t components = n;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if (!(mask >> b & 1)) continue;
            edges.push_back(pairs[b]);
            NodeId a = find(pairs[b].first);
            NodeId c = find(pairs[b].second);
            if (a != c) {
                parent[a] = c;
                --components;
            }
        }
        if (components == 1) out.push_back(std::move(edges));
    }
    return out;
}

/// Directed graph with each ordered pair present independently with probability p.
inline std::vector<Edge> random_directed(std::size_t n, double p, std::uint64_t seed) {
    invcol::Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = 0; v < n; ++v) {
            if (u != v && unit(rng) < p) edges.emplace_back(u, v);
        }
    }
    return edges;
}

/// Undirected simple edge set of a directed edge list.
inline std::set<Edge> undirected(const std::vector<Edge>& edges) {
    std::set<Edge> out;
    for (auto [u, v] : edges) {
        if (u != v) out.emplace(std::min(u, v), std::max(u, v));
    }
    return out;
}

/// Conductance by direct edge counting; `inside` is a node bitmask.
inline double conductance(std::size_t n, const std::set<Edge>& und, std::uint64_t inside) {
    std::size_t cut = 0;
    std::size_t vol_in = 0;
    std::size_t vol_out = 0;
    for (auto [u, v] : und) {
        const bool a = inside >> u & 1;
        const bool b = inside >> v & 1;
        if (a != b) ++cut;
        (a ? vol_in : vol_out) += 1;
        (b ? vol_in : vol_out) += 1;
    }
    (void)n;
    if (cut == 0) return 0.0;
    return static_cast<double>(cut) / static_cast<double>(std::min(vol_in, vol_out));
}

/// Normalized cut sum_c cut(c)/vol(c) for weighted undirected edges.
inline double normalized_cut(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, double>>& edges,
                             const std::vector<std::size_t>& labels) {
    std::map<std::size_t, double> cut;
    std::map<std::size_t, double> vol;
    (void)n;
    for (auto [u, v, w] : edges) {
        vol[labels[u]] += w;
        vol[labels[v]] += w;
        if (labels[u] != labels[v]) {
            cut[labels[u]] += w;
            cut[labels[v]] += w;
        }
    }
    double total = 0.0;
    for (auto [c, v] : vol) {
        if (v > 0.0) total += cut[c] / v;
    }
    return total;
}

/// Dense MCL with the same step order as the library, for cross-checking.
inline std::vector<std::size_t> dense_mcl(std::size_t n, const std::vector<Edge>& edges,
                                          double inflation = 2.0, double prune = 1e-4,
                                          int max_iter = 200, double eps = 1e-6) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
    for (auto [u, v] : edges) {
        if (u == v) continue;
        m(u, v) = 1.0;
        m(v, u) = 1.0;
    }
    auto normalize = [](Eigen::MatrixXd& x) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double s = x.col(j).sum();
            if (s > 0.0) x.col(j) /= s;
        }
    };
    normalize(m);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd next = m * m;
        next = next.array().pow(inflation).matrix();
        normalize(next);
        for (Eigen::Index j = 0; j < next.cols(); ++j) {
            const double mx = next.col(j).maxCoeff();
            bool changed = false;
            for (Eigen::Index i = 0; i < next.rows(); ++i) {
                if (next(i, j) < prune && next(i, j) < mx && next(i, j) != 0.0) {
                    next(i, j) = 0.0;
                    changed = true;
                }
            }
            if (changed) next.col(j) /= next.col(j).sum();
        }
        const double change = (next - m).cwiseAbs().maxCoeff();
        m = next;
        if (change < eps) break;
    }
    // Each node joins its strongest attractor; attractors reaching each other merge.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
    auto is_attr = [&](std::size_t i) { return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) > 0.0; };
    for (std::size_t j = 0; j < n; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < n; ++i) {
            const auto I = static_cast<Eigen::Index>(i);
            if (!is_attr(i) || m(I, J) <= 0.0) continue;
            if (is_attr(j)) unite(i, j);
            if (best < 0 || m(I, J) > m(best, J)) best = static_cast<std::ptrdiff_t>(i);
        }
        if (best < 0) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto I = static_cast<Eigen::Index>(i);
                if (m(I, J) > 0.0 && (best < 0 || m(I, J) > m(best, J))) {
                    best = static_cast<std::ptrdiff_t>(i);
                }
            }
        }
        if (best >= 0) unite(j, static_cast<std::size_t>(best));
    }
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> labels(n);
    for (std::size_t u = 0; u < n; ++u) {
        labels[u] = relabel.emplace(find(u), relabel.size()).first->second;
    }
    return labels;
}

/// Labels renumbered by first appearance, for comparing partitions.
inline std::vector<std::size_t> canonical(const std::vector<std::size_t>& labels) {
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out;
    for (auto l : labels) out.push_back(relabel.emplace(l, relabel.size()).first->second);
    return out;
}

}  // namespace oracle
