#include "invcol/clustering.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <json.hpp>

namespace invcol {

std::size_t Clustering::node_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.size();
    return n;
}

void Clustering::canonicalize() {
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::erase_if(clusters, [](const auto& c) { return c.empty(); });
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::vector<ClusterId> Clustering::labels(std::size_t n) const {
    constexpr ClusterId unset = static_cast<ClusterId>(-1);
    std::vector<ClusterId> out(n, unset);
    for (ClusterId c = 0; c < clusters.size(); ++c) {
        if (clusters[c].empty()) throw DomainError("cluster " + std::to_string(c) + " is empty");
        for (NodeId u : clusters[c]) {
            if (u >= n) throw DomainError("cluster member out of range");
            if (out[u] != unset) throw DomainError("node " + std::to_string(u) + " in two clusters");
            out[u] = c;
        }
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (out[u] == unset) throw DomainError("node " + std::to_string(u) + " not clustered");
    }
    return out;
}

Clustering Clustering::from_labels(std::span<const ClusterId> labels) {
    std::map<ClusterId, std::size_t> slot;
    Clustering c;
    for (NodeId u = 0; u < labels.size(); ++u) {
        auto [it, inserted] = slot.try_emplace(labels[u], c.clusters.size());
        if (inserted) c.clusters.emplace_back();
        c.clusters[it->second].push_back(u);
    }
    c.canonicalize();
    return c;
}

bool is_partition(const Clustering& clustering, std::size_t n) {
    try {
        (void)clustering.labels(n);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

double adjusted_rand_index(std::span<const ClusterId> a, std::span<const ClusterId> b) {
    if (a.size() != b.size()) throw DomainError("labelings differ in length");
    const double n = static_cast<double>(a.size());
    if (a.size() < 2) return 1.0;
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };

    std::map<std::pair<ClusterId, ClusterId>, double> joint;
    std::map<ClusterId, double> rows;
    std::map<ClusterId, double> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    double index = 0.0;
    for (const auto& [key, count] : joint) index += choose2(count);
    double sum_a = 0.0;
    for (const auto& [key, count] : rows) sum_a += choose2(count);
    double sum_b = 0.0;
    for (const auto& [key, count] : cols) sum_b += choose2(count);

    const double expected = sum_a * sum_b / choose2(n);
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

PubClustering to_pub_clustering(const Clustering& clustering, const CitationGraph& graph,
                                std::string label) {
    PubClustering out;
    out.label = std::move(label);
    out.clusters.reserve(clustering.size());
    for (const auto& c : clustering.clusters) {
        auto& ids = out.clusters.emplace_back();
        ids.reserve(c.size());
        for (NodeId u : c) ids.push_back(graph.id(u));
    }
    return out;
}

void write_clustering(const Clustering& clustering, const CitationGraph& graph,
                      const std::filesystem::path& path) {
    std::string out;
    for (ClusterId c = 0; c < clustering.size(); ++c) {
        const std::string prefix = std::to_string(c) + '\t';
        for (NodeId u : clustering.clusters[c]) {
            out += prefix;
            out += graph.id(u);
            out += '\n';
        }
    }
    detail::write_file(path, out);
}

PubClustering read_pub_clustering(const std::filesystem::path& path, std::string label) {
    const std::string text = detail::read_file(path);
    std::map<unsigned long long, std::vector<std::string>> by_id;
    std::unordered_map<std::string, unsigned long long> seen;
    std::size_t line_no = 0;
    for (std::string_view line : detail::lines(text)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        unsigned long long cid = 0;
        if (fields.size() != 2 || !detail::parse_int(fields[0], cid) || fields[1].empty()) {
            throw ParseError("expected 'cluster_id<TAB>pub_id'", line_no);
        }
        std::string pub(fields[1]);
        if (!seen.emplace(pub, cid).second) {
            throw ParseError("pub_id '" + pub + "' assigned to more than one cluster", line_no);
        }
        by_id[cid].push_back(std::move(pub));
    }
    PubClustering out;
    out.label = std::move(label);
    for (auto& [cid, members] : by_id) out.clusters.push_back(std::move(members));
    return out;
}

Clustering read_clustering(const std::filesystem::path& path, const CitationGraph& graph) {
    PubClustering pubs = read_pub_clustering(path);
    Clustering c;
    for (const auto& members : pubs.clusters) {
        auto& nodes = c.clusters.emplace_back();
        for (const auto& id : members) nodes.push_back(graph.at(id));
    }
    if (!is_partition(c, graph.node_count())) {
        throw ValidationError("clustering '" + path.string() + "' does not partition the graph");
    }
    return c;
}

void write_provenance(const Provenance& provenance, std::size_t cluster_count,
                      const std::filesystem::path& path) {
    nlohmann::ordered_json obj;
    obj["engine"] = provenance.engine;
    obj["dataset"] = provenance.dataset_label;
    obj["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : provenance.params) obj["params"][k] = v;
    obj["iterations"] = provenance.iterations;
    obj["converged"] = provenance.converged;
    obj["clusters"] = cluster_count;
    detail::write_file(path, obj.dump(2) + "\n");
}

}  // namespace invcol
