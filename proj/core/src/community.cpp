#include "invcol/community.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace invcol {

std::size_t nearest_rank(std::span<const std::size_t> sorted, double p) {
    if (sorted.empty()) return 0;
    if (!(p > 0.0 && p <= 100.0)) throw DomainError("percentile must lie in (0, 100]");
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

CommunityProfile build_profile(ClusterId cluster_id, std::span<const NodeId> cluster,
                               const Dataset& dataset) {
    CommunityProfile profile;
    profile.dataset_label = dataset.label;
    profile.cluster_id = cluster_id;
    profile.size = cluster.size();
    const auto& graph = dataset.graph;

    std::unordered_map<NodeId, const PubRecord*> member;
    for (NodeId u : cluster) {
        if (u >= graph.node_count()) throw DomainError("unknown node index " + std::to_string(u));
        const PubRecord& rec = dataset.records[u];
        member.emplace(u, &rec);
        if (rec.author_ids.empty()) {
            ++profile.authorless_papers;
            continue;
        }
        std::set<std::string_view> distinct(rec.author_ids.begin(), rec.author_ids.end());
        for (auto a : distinct) ++profile.authors[std::string(a)];
    }
    profile.no_authors = profile.authors.empty();
    if (profile.no_authors) return profile;

    std::vector<std::size_t> counts;
    std::size_t ones = 0;
    for (const auto& [a, c] : profile.authors) {
        counts.push_back(c);
        ones += (c == 1);
    }
    std::sort(counts.begin(), counts.end());
    profile.one_paper_fraction = static_cast<double>(ones) / static_cast<double>(counts.size());
    profile.p95_count = nearest_rank(counts, 95.0);
    profile.p99_count = nearest_rank(counts, 99.0);
    profile.max_count = counts.back();

    std::vector<std::string> top;
    for (const auto& [a, c] : profile.authors) {
        if (c >= profile.p95_count) top.push_back(a);
    }
    profile.top_authors = top.size();
    if (top.size() < 2) return profile;

    std::unordered_map<std::string_view, std::size_t> top_index;
    for (std::size_t i = 0; i < top.size(); ++i) top_index.emplace(top[i], i);
    std::set<std::pair<std::size_t, std::size_t>> cites;
    for (NodeId u : cluster) {
        const PubRecord* from = member[u];
        for (NodeId v : graph.out_neighbors(u)) {
            auto it = member.find(v);
            if (it == member.end()) continue;
            for (const auto& a : from->author_ids) {
                auto ia = top_index.find(a);
                if (ia == top_index.end()) continue;
                for (const auto& b : it->second->author_ids) {
                    auto ib = top_index.find(b);
                    if (ib == top_index.end() || ib->second == ia->second) continue;
                    cites.emplace(ia->second, ib->second);
                }
            }
        }
    }
    const double pairs = static_cast<double>(top.size()) * static_cast<double>(top.size() - 1);
    profile.top_author_citation_density = static_cast<double>(cites.size()) / pairs;
    return profile;
}

AuthorDistribution author_cluster_distribution(const Clustering& clustering,
                                               std::span<const PubRecord> records) {
    AuthorDistribution dist;
    std::unordered_map<std::string, std::set<ClusterId>> seen;
    for (ClusterId c = 0; c < clustering.size(); ++c) {
        for (NodeId u : clustering.clusters[c]) {
            if (u >= records.size()) throw DomainError("node without a record");
            for (const auto& a : records[u].author_ids) seen[a].insert(c);
        }
    }
    std::size_t total = 0;
    std::size_t one = 0;
    std::size_t le5 = 0;
    for (const auto& [a, clusters] : seen) {
        const std::size_t n = clusters.size();
        dist.clusters_per_author.emplace(a, n);
        total += n;
        one += (n == 1);
        le5 += (n <= 5);
        dist.max_clusters = std::max(dist.max_clusters, n);
    }
    dist.author_count = seen.size();
    if (dist.author_count > 0) {
        const double count = static_cast<double>(dist.author_count);
        dist.fraction_one = static_cast<double>(one) / count;
        dist.fraction_le5 = static_cast<double>(le5) / count;
        dist.mean_clusters = static_cast<double>(total) / count;
    }
    return dist;
}

std::string_view to_string(EdgeCaseKind kind) {
    switch (kind) {
        case EdgeCaseKind::Normal: return "Normal";
        case EdgeCaseKind::SingletonHighExternal: return "SingletonHighExternal";
        case EdgeCaseKind::HubCiting: return "HubCiting";
        case EdgeCaseKind::HubCited: return "HubCited";
    }
    return "Unknown";
}

EdgeCaseLabel classify_edge_case(std::span<const NodeId> cluster, const CitationGraph& graph,
                                 const EdgeCaseThresholds& thresholds) {
    if (cluster.empty()) throw DomainError("classify_edge_case requires a nonempty cluster");
    std::unordered_set<NodeId> inside;
    for (NodeId u : cluster) {
        if (u >= graph.node_count()) throw DomainError("unknown node index " + std::to_string(u));
        inside.insert(u);
    }
    EdgeCaseLabel label;
    label.size = inside.size();

    std::vector<NodeId> members(inside.begin(), inside.end());
    std::sort(members.begin(), members.end());
    std::vector<std::size_t> cites(members.size(), 0);
    std::vector<std::size_t> cited_by(members.size(), 0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (NodeId v : graph.out_neighbors(members[i])) {
            if (inside.contains(v)) {
                ++cites[i];
            } else {
                ++label.external_edges;
            }
        }
        for (NodeId v : graph.in_neighbors(members[i])) {
            if (inside.contains(v)) {
                ++cited_by[i];
            } else {
                ++label.external_edges;
            }
        }
    }

    if (label.size == 1) {
        if (label.external_edges >= thresholds.external_threshold) {
            label.kind = EdgeCaseKind::SingletonHighExternal;
            label.hub = members.front();
        }
        return label;
    }

    const double needed = thresholds.hub_fraction * static_cast<double>(label.size - 1);
    auto strongest = [&](const std::vector<std::size_t>& links) {
        auto it = std::max_element(links.begin(), links.end());  // first max = lowest index
        return static_cast<std::size_t>(it - links.begin());
    };
    const std::size_t citing = strongest(cites);
    if (static_cast<double>(cites[citing]) >= needed) {
        label.kind = EdgeCaseKind::HubCiting;
        label.hub = members[citing];
        label.hub_links = cites[citing];
        return label;
    }
    const std::size_t cited = strongest(cited_by);
    if (static_cast<double>(cited_by[cited]) >= needed) {
        label.kind = EdgeCaseKind::HubCited;
        label.hub = members[cited];
        label.hub_links = cited_by[cited];
    }
    return label;
}

CommunityFilterResult filter_communities(std::span<const CommunityProfile> profiles,
                                         std::span<const EdgeCaseLabel> labels) {
    if (profiles.size() != labels.size()) {
        throw DomainError("filter_communities needs one label per profile");
    }
    CommunityFilterResult out;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (labels[i].kind == EdgeCaseKind::Normal) {
            out.accepted.push_back(profiles[i]);
        } else {
            out.rejected.push_back({profiles[i], labels[i]});
        }
    }
    return out;
}

void write_profiles_jsonl(std::span<const CommunityProfile> profiles,
                          const std::filesystem::path& path) {
    std::string out;
    for (const auto& p : profiles) {
        nlohmann::ordered_json obj;
        if (!p.dataset_label.empty()) obj["dataset"] = p.dataset_label;
        obj["cluster_id"] = p.cluster_id;
        obj["size"] = p.size;
        obj["author_count"] = p.authors.size();
        obj["authorless_papers"] = p.authorless_papers;
        obj["no_authors"] = p.no_authors;
        obj["one_paper_fraction"] = p.one_paper_fraction;
        obj["percentile_method"] = "nearest-rank";
        obj["p95_count"] = p.p95_count;
        obj["p99_count"] = p.p99_count;
        obj["max_count"] = p.max_count;
        obj["top_authors"] = p.top_authors;
        obj["top_author_citation_density"] = p.top_author_citation_density;
        obj["authors"] = nlohmann::ordered_json::object();
        for (const auto& [a, c] : p.authors) obj["authors"][a] = c;
        out += obj.dump();
        out += '\n';
    }
    detail::write_file(path, out);
}

void write_author_distribution(const AuthorDistribution& dist, const std::filesystem::path& path) {
    nlohmann::ordered_json obj;
    obj["author_count"] = dist.author_count;
    obj["fraction_one"] = dist.fraction_one;
    obj["fraction_le5"] = dist.fraction_le5;
    obj["mean_clusters"] = dist.mean_clusters;
    obj["max_clusters"] = dist.max_clusters;
    detail::write_file(path, obj.dump(2) + "\n");
}

}  // namespace invcol
