#include "invcol/mkkm.hpp"

#include "invcol/error.hpp"
#include "invcol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

namespace invcol::mkkm {

namespace {

constexpr NodeId kUnmatched = std::numeric_limits<NodeId>::max();
constexpr ClusterId kUnassigned = std::numeric_limits<ClusterId>::max();
constexpr double kImprovement = 1e-12;

double ratio(double cut, double vol) { return vol > 0.0 ? cut / vol : 0.0; }

}  // namespace

double WeightedGraph::edge_weight(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
    if (it == nbrs.end() || *it != v) return 0.0;
    return weights[offsets[u] + static_cast<std::size_t>(it - nbrs.begin())];
}

double WeightedGraph::total_edge_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0) / 2.0;
}

WeightedGraph WeightedGraph::from_edges(
    std::size_t n, std::span<const std::tuple<NodeId, NodeId, double>> edges) {
    std::vector<std::tuple<NodeId, NodeId, double>> both;
    both.reserve(edges.size() * 2);
    for (const auto& [u, v, w] : edges) {
        if (u >= n || v >= n) throw DomainError("edge endpoint out of range");
        if (u == v) throw DomainError("self-loop in weighted graph");
        both.emplace_back(u, v, w);
        both.emplace_back(v, u, w);
    }
    std::sort(both.begin(), both.end());

    WeightedGraph g;
    g.offsets.assign(n + 1, 0);
    g.node_weight.assign(n, 1.0);
    g.volume.assign(n, 0.0);
    for (std::size_t i = 0; i < both.size();) {
        auto [u, v, w] = both[i];
        double total = 0.0;
        while (i < both.size() && std::get<0>(both[i]) == u && std::get<1>(both[i]) == v) {
            total += std::get<2>(both[i]);
            ++i;
        }
        g.targets.push_back(v);
        g.weights.push_back(total);
        ++g.offsets[u + 1];
        g.volume[u] += total;
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
    return g;
}

WeightedGraph WeightedGraph::from_citation_graph(const CitationGraph& graph) {
    const auto adj = graph.undirected_adjacency();
    WeightedGraph g;
    const std::size_t n = graph.node_count();
    g.offsets.assign(n + 1, 0);
    g.node_weight.assign(n, 1.0);
    g.volume.assign(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : adj[u]) {
            g.targets.push_back(v);
            g.weights.push_back(1.0);
        }
        g.offsets[u + 1] = g.offsets[u] + adj[u].size();
        g.volume[u] = static_cast<double>(adj[u].size());
    }
    return g;
}

CoarseLevel coarsen_with_order(const WeightedGraph& graph, std::span<const NodeId> order) {
    const std::size_t n = graph.node_count();
    if (order.size() != n) throw DomainError("visit order must list every node once");

    std::vector<NodeId> mate(n, kUnmatched);
    for (NodeId u : order) {
        if (u >= n) throw DomainError("visit order entry out of range");
        if (mate[u] != kUnmatched) continue;
        NodeId best = kUnmatched;
        double best_w = -1.0;
        auto nbrs = graph.neighbors(u);
        auto ws = graph.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            NodeId v = nbrs[i];
            if (v == u || mate[v] != kUnmatched) continue;
            // Neighbors are sorted, so strict '>' keeps the lowest index on ties.
            if (ws[i] > best_w) {
                best_w = ws[i];
                best = v;
            }
        }
        if (best != kUnmatched) {
            mate[u] = best;
            mate[best] = u;
        } else {
            mate[u] = u;
        }
    }

    CoarseLevel level;
    level.mapping.assign(n, kUnmatched);
    NodeId next = 0;
    for (NodeId u = 0; u < n; ++u) {
        if (level.mapping[u] != kUnmatched) continue;
        level.mapping[u] = next;
        NodeId m = mate[u] == kUnmatched ? u : mate[u];
        level.mapping[m] = next;
        ++next;
    }

    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    for (NodeId u = 0; u < n; ++u) {
        auto nbrs = graph.neighbors(u);
        auto ws = graph.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            NodeId v = nbrs[i];
            if (u >= v) continue;
            NodeId cu = level.mapping[u];
            NodeId cv = level.mapping[v];
            if (cu != cv) edges.emplace_back(cu, cv, ws[i]);
        }
    }
    level.graph = WeightedGraph::from_edges(next, edges);
    std::fill(level.graph.node_weight.begin(), level.graph.node_weight.end(), 0.0);
    std::fill(level.graph.volume.begin(), level.graph.volume.end(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
        level.graph.node_weight[level.mapping[u]] += graph.node_weight[u];
        level.graph.volume[level.mapping[u]] += graph.volume[u];
    }
    return level;
}

CoarseLevel coarsen(const WeightedGraph& graph, std::uint64_t seed) {
    std::vector<NodeId> order(graph.node_count());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return coarsen_with_order(graph, order);
}

double normalized_cut(const WeightedGraph& graph, std::span<const ClusterId> labels) {
    if (labels.size() != graph.node_count()) throw DomainError("label count mismatch");
    std::map<ClusterId, std::pair<double, double>> cut_vol;
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        auto& [cut, vol] = cut_vol[labels[u]];
        vol += graph.volume[u];
        auto nbrs = graph.neighbors(u);
        auto ws = graph.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (labels[nbrs[i]] != labels[u]) cut += ws[i];
        }
    }
    double total = 0.0;
    for (const auto& [c, cv] : cut_vol) total += ratio(cv.first, cv.second);
    return total;
}

BaseResult base_cluster(const WeightedGraph& graph, std::size_t k, std::uint64_t seed) {
    const std::size_t n = graph.node_count();
    if (k == 0) throw DomainError("k must be >= 1");
    BaseResult result;
    result.labels.assign(n, kUnassigned);
    if (n <= k) {
        std::iota(result.labels.begin(), result.labels.end(), ClusterId{0});
        result.padded = k - n;
        return result;
    }

    Rng rng(seed);
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hops(n, kInf);
    std::vector<NodeId> seeds;
    std::vector<NodeId> queue;

    auto bfs_from = [&](NodeId s) {
        hops[s] = 0;
        queue.assign(1, s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            NodeId u = queue[head];
            for (NodeId v : graph.neighbors(u)) {
                if (hops[v] > hops[u] + 1) {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    };

    seeds.push_back(static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)));
    bfs_from(seeds.back());
    while (seeds.size() < k) {
        std::vector<NodeId> unreachable;
        for (NodeId u = 0; u < n; ++u) {
            if (hops[u] == kInf) unreachable.push_back(u);
        }
        NodeId pick = 0;
        if (!unreachable.empty()) {
            pick = unreachable[std::uniform_int_distribution<std::size_t>(0, unreachable.size() - 1)(rng)];
        } else {
            std::vector<double> w(n);
            for (NodeId u = 0; u < n; ++u) {
                const double d = static_cast<double>(hops[u]);
                w[u] = graph.node_weight[u] * d * d;
            }
            std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
            pick = static_cast<NodeId>(dist(rng));
        }
        seeds.push_back(pick);
        bfs_from(pick);
    }

    // Max-heap of (connection weight, node, region); stale entries are skipped.
    struct Candidate {
        double weight;
        NodeId node;
        ClusterId region;
        bool operator<(const Candidate& o) const {
            if (weight != o.weight) return weight < o.weight;
            if (node != o.node) return node > o.node;
            return region > o.region;
        }
    };
    std::priority_queue<Candidate> heap;
    std::vector<std::map<ClusterId, double>> conn(n);
    std::vector<double> region_weight(k, 0.0);
    std::size_t assigned = 0;

    auto assign = [&](NodeId u, ClusterId r) {
        result.labels[u] = r;
        region_weight[r] += graph.node_weight[u];
        ++assigned;
        auto nbrs = graph.neighbors(u);
        auto ws = graph.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            NodeId v = nbrs[i];
            if (result.labels[v] != kUnassigned) continue;
            double& c = conn[v][r];
            c += ws[i];
            heap.push({c, v, r});
        }
    };

    for (ClusterId r = 0; r < k; ++r) assign(seeds[r], r);
    NodeId scan = 0;
    while (assigned < n) {
        if (heap.empty()) {
            // Remaining nodes are disconnected from every region: seed the lightest region.
            while (result.labels[scan] != kUnassigned) ++scan;
            auto lightest = static_cast<ClusterId>(
                std::min_element(region_weight.begin(), region_weight.end()) - region_weight.begin());
            assign(scan, lightest);
            continue;
        }
        Candidate top = heap.top();
        heap.pop();
        if (result.labels[top.node] != kUnassigned) continue;
        if (conn[top.node][top.region] != top.weight) continue;
        assign(top.node, top.region);
    }
    return result;
}

std::vector<ClusterId> refine(const WeightedGraph& graph, std::vector<ClusterId> labels,
                              std::size_t max_sweeps, RefineStats* stats) {
    const std::size_t n = graph.node_count();
    if (labels.size() != n) throw DomainError("label count mismatch");
    if (stats) {
        *stats = {};
        stats->objective.push_back(normalized_cut(graph, labels));
    }
    if (max_sweeps == 0 || n == 0) return labels;

    ClusterId k = 0;
    for (ClusterId c : labels) k = std::max(k, c + 1);
    std::vector<double> cut(k, 0.0);
    std::vector<double> vol(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    std::vector<double> ext(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        vol[labels[u]] += graph.volume[u];
        ++count[labels[u]];
        auto nbrs = graph.neighbors(u);
        auto ws = graph.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            ext[u] += ws[i];
            if (labels[nbrs[i]] != labels[u]) cut[labels[u]] += ws[i];
        }
    }

    std::vector<std::pair<ClusterId, double>> links;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        std::size_t moves = 0;
        for (NodeId u = 0; u < n; ++u) {
            const ClusterId a = labels[u];
            if (count[a] <= 1) continue;
            links.clear();
            double link_a = 0.0;
            bool boundary = false;
            auto nbrs = graph.neighbors(u);
            auto ws = graph.neighbor_weights(u);
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                const ClusterId c = labels[nbrs[i]];
                if (c == a) {
                    link_a += ws[i];
                    continue;
                }
                boundary = true;
                auto it = std::find_if(links.begin(), links.end(),
                                       [c](const auto& p) { return p.first == c; });
                if (it == links.end()) {
                    links.emplace_back(c, ws[i]);
                } else {
                    it->second += ws[i];
                }
            }
            if (!boundary) continue;
            std::sort(links.begin(), links.end());

            const double vu = graph.volume[u];
            const double cut_a = cut[a] - ext[u] + 2.0 * link_a;
            const double before_a = ratio(cut[a], vol[a]);
            const double after_a = ratio(cut_a, vol[a] - vu);
            ClusterId best = a;
            double best_delta = -kImprovement;
            for (const auto& [b, link_b] : links) {
                const double cut_b = cut[b] + ext[u] - 2.0 * link_b;
                const double delta = after_a + ratio(cut_b, vol[b] + vu) - before_a -
                                     ratio(cut[b], vol[b]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best = b;
                }
            }
            if (best == a) continue;

            double link_b = 0.0;
            for (const auto& [b, l] : links) {
                if (b == best) link_b = l;
            }
            cut[a] = cut_a;
            cut[best] = cut[best] + ext[u] - 2.0 * link_b;
            vol[a] -= vu;
            vol[best] += vu;
            --count[a];
            ++count[best];
            labels[u] = best;
            ++moves;
        }
        if (stats) {
            ++stats->sweeps;
            stats->moves += moves;
            stats->objective.push_back(normalized_cut(graph, labels));
        }
        if (moves == 0) break;
    }
    return labels;
}

Clustering cluster(const WeightedGraph& graph, const Params& params) {
    if (params.k == 0) throw DomainError("k must be >= 1");
    const std::size_t n = graph.node_count();
    const std::size_t limit = params.coarsen_until == 0 ? 20 * params.k : params.coarsen_until;

    std::vector<CoarseLevel> levels;
    const WeightedGraph* current = &graph;
    while (current->node_count() > limit && current->node_count() >= 2) {
        CoarseLevel level = coarsen(*current, derive_seed(params.seed, levels.size() + 1));
        const std::size_t coarse_n = level.graph.node_count();
        // Stop when matching stalls or would leave fewer nodes than clusters.
        if (coarse_n == current->node_count() || coarse_n < params.k ||
            static_cast<double>(coarse_n) > 0.95 * static_cast<double>(current->node_count())) {
            if (coarse_n < current->node_count() && coarse_n >= params.k) {
                levels.push_back(std::move(level));
                current = &levels.back().graph;
            }
            break;
        }
        levels.push_back(std::move(level));
        current = &levels.back().graph;
    }

    // Region growing is sensitive to where the seeds land, so try several seedings at
    // the (small) coarsest level and keep the lowest refined normalized cut.
    BaseResult base;
    std::vector<ClusterId> labels;
    double best_cut = std::numeric_limits<double>::infinity();
    const std::size_t restarts = std::max<std::size_t>(1, params.base_restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
        BaseResult attempt = base_cluster(*current, params.k, derive_seed(params.seed, "base/" + std::to_string(r)));
        auto refined = refine(*current, attempt.labels, params.refine_iterations);
        const double cut = normalized_cut(*current, refined);
        if (cut < best_cut) {
            best_cut = cut;
            base = std::move(attempt);
            labels = std::move(refined);
        }
    }
    for (std::size_t i = levels.size(); i-- > 0;) {
        const WeightedGraph& finer = i == 0 ? graph : levels[i - 1].graph;
        std::vector<ClusterId> projected(finer.node_count());
        for (NodeId u = 0; u < finer.node_count(); ++u) projected[u] = labels[levels[i].mapping[u]];
        labels = refine(finer, std::move(projected), params.refine_iterations);
    }

    Clustering result = Clustering::from_labels(labels);
    if (n == 0) result.clusters.clear();
    auto& prov = result.provenance;
    prov.engine = "mkkm";
    prov.params = {
        {"k", std::to_string(params.k)},
        {"coarsen_until", std::to_string(limit)},
        {"refine_iterations", std::to_string(params.refine_iterations)},
        {"base_restarts", std::to_string(restarts)},
        {"seed", std::to_string(params.seed)},
        {"levels", std::to_string(levels.size())},
    };
    if (base.padded > 0) prov.params["padded"] = std::to_string(base.padded);
    prov.iterations = levels.size();
    prov.converged = true;
    return result;
}

Clustering cluster(const CitationGraph& graph, const Params& params) {
    return cluster(WeightedGraph::from_citation_graph(graph), params);
}

std::size_t choose_k(std::size_t mcl_cluster_count) {
    return std::max<std::size_t>(1, (mcl_cluster_count + 1) / 2);
}

std::size_t choose_k(const Clustering& mcl_clustering) { return choose_k(mcl_clustering.size()); }

}  // namespace invcol::mkkm
