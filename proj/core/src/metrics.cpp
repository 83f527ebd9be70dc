#include "invcol/metrics.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <numeric>

namespace invcol {

namespace {

struct CutVolume {
    std::size_t cut = 0;
    std::size_t vol_in = 0;
    std::size_t vol_total = 0;
};

std::size_t undirected_degree(const CitationGraph& g, NodeId u) {
    auto out = g.out_neighbors(u);
    auto in = g.in_neighbors(u);
    std::size_t shared = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < out.size() && j < in.size()) {
        if (out[i] < in[j]) {
            ++i;
        } else if (in[j] < out[i]) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    return out.size() + in.size() - shared;
}

CutVolume cut_volume(const CitationGraph& g, std::span<const NodeId> members,
                     std::vector<char>& in_set, std::size_t total_volume) {
    CutVolume cv;
    cv.vol_total = total_volume;
    for (NodeId u : members) in_set[u] = 1;
    for (NodeId u : members) {
        auto out = g.out_neighbors(u);
        auto in = g.in_neighbors(u);
        std::size_t i = 0;
        std::size_t j = 0;
        // Merge the sorted lists so reciprocal citations count once.
        while (i < out.size() || j < in.size()) {
            NodeId v;
            if (j == in.size() || (i < out.size() && out[i] < in[j])) {
                v = out[i++];
            } else if (i == out.size() || in[j] < out[i]) {
                v = in[j++];
            } else {
                v = out[i];
                ++i;
                ++j;
            }
            ++cv.vol_in;
            if (!in_set[v]) ++cv.cut;
        }
    }
    for (NodeId u : members) in_set[u] = 0;
    return cv;
}

std::size_t total_volume(const CitationGraph& g) {
    std::size_t vol = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) vol += undirected_degree(g, u);
    return vol;
}

double conductance_of(const CutVolume& cv) {
    if (cv.cut == 0) return 0.0;
    const std::size_t denom = std::min(cv.vol_in, cv.vol_total - cv.vol_in);
    return static_cast<double>(cv.cut) / static_cast<double>(denom);
}

void check_members(const CitationGraph& g, std::span<const NodeId> members) {
    for (NodeId u : members) {
        if (u >= g.node_count()) throw DomainError("unknown node index " + std::to_string(u));
    }
}

}  // namespace

double conductance(const CitationGraph& graph, std::span<const NodeId> members) {
    check_members(graph, members);
    std::vector<char> in_set(graph.node_count(), 0);
    std::size_t distinct = 0;
    for (NodeId u : members) {
        if (!in_set[u]) {
            in_set[u] = 1;
            ++distinct;
        }
    }
    if (distinct == 0 || distinct == graph.node_count()) {
        throw DomainError("conductance needs a nonempty proper subset of the nodes");
    }
    std::vector<NodeId> unique_members;
    unique_members.reserve(distinct);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        if (in_set[u]) unique_members.push_back(u);
        in_set[u] = 0;
    }
    return conductance_of(cut_volume(graph, unique_members, in_set, total_volume(graph)));
}

std::size_t internal_edges(const CitationGraph& graph, std::span<const NodeId> members) {
    check_members(graph, members);
    std::vector<char> in_set(graph.node_count(), 0);
    for (NodeId u : members) in_set[u] = 1;
    std::size_t count = 0;
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        if (!in_set[u]) continue;
        for (NodeId v : graph.out_neighbors(u)) count += in_set[v];
    }
    return count;
}

std::size_t weighted_citation_count(const CitationGraph& graph, NodeId node) {
    if (node >= graph.node_count()) throw DomainError("unknown node index " + std::to_string(node));
    auto out = graph.out_neighbors(node);
    auto in = graph.in_neighbors(node);
    std::vector<NodeId> neighbors;
    std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(neighbors));
    std::size_t score = graph.in_degree(node);
    for (NodeId v : neighbors) score += graph.in_degree(v);
    return score;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

MetricsTable metrics_table(const CitationGraph& graph, const Clustering& clustering) {
    if (!is_partition(clustering, graph.node_count())) {
        throw DomainError("metrics_table requires a partition of the graph");
    }
    MetricsTable table;
    const std::size_t vol = total_volume(graph);
    std::vector<char> in_set(graph.node_count(), 0);
    std::vector<double> sizes;
    double cond_sum = 0.0;
    for (ClusterId c = 0; c < clustering.size(); ++c) {
        const auto& members = clustering.clusters[c];
        ClusterMetrics row;
        row.cluster_id = c;
        row.size = members.size();
        row.internal_edges = internal_edges(graph, members);
        const CutVolume cv = cut_volume(graph, members, in_set, vol);
        row.cut_edges = cv.cut;
        row.conductance = conductance_of(cv);
        cond_sum += row.conductance;
        sizes.push_back(static_cast<double>(row.size));
        table.rows.push_back(row);
    }
    auto& s = table.summary;
    s.cluster_count = clustering.size();
    s.node_count = graph.node_count();
    if (s.cluster_count > 0) {
        s.mean_size = static_cast<double>(s.node_count) / static_cast<double>(s.cluster_count);
        s.median_size = median(sizes);
        s.mean_conductance = cond_sum / static_cast<double>(s.cluster_count);
    }
    return table;
}

void write_metrics_csv(const MetricsTable& table, const std::filesystem::path& path) {
    std::string out = "cluster_id,size,internal_edges,cut_edges,conductance\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.cluster_id) + ',' + std::to_string(r.size) + ',' +
               std::to_string(r.internal_edges) + ',' + std::to_string(r.cut_edges) + ',' +
               detail::format_fixed(r.conductance, 6) + '\n';
    }
    detail::write_file(path, out);
}

MetricsTable read_metrics_csv(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    auto rows = detail::lines(text);
    if (rows.empty() || rows[0] != "cluster_id,size,internal_edges,cut_edges,conductance") {
        throw ParseError("'" + path.string() + "' is not a metrics CSV", 1);
    }
    MetricsTable table;
    std::vector<double> sizes;
    double cond_sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        auto f = detail::split(rows[i], ',');
        ClusterMetrics m;
        if (f.size() != 5 || !detail::parse_int(f[0], m.cluster_id) ||
            !detail::parse_int(f[1], m.size) || !detail::parse_int(f[2], m.internal_edges) ||
            !detail::parse_int(f[3], m.cut_edges) || !detail::parse_double(f[4], m.conductance)) {
            throw ParseError("malformed metrics row", i + 1);
        }
        sizes.push_back(static_cast<double>(m.size));
        cond_sum += m.conductance;
        table.summary.node_count += m.size;
        table.rows.push_back(m);
    }
    auto& s = table.summary;
    s.cluster_count = table.rows.size();
    if (s.cluster_count > 0) {
        s.mean_size = static_cast<double>(s.node_count) / static_cast<double>(s.cluster_count);
        s.median_size = median(sizes);
        s.mean_conductance = cond_sum / static_cast<double>(s.cluster_count);
    }
    return table;
}

}  // namespace invcol
