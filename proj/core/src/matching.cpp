#include "invcol/matching.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace invcol {

double jaccard(std::size_t intersection, std::size_t size_a, std::size_t size_b) {
    const std::size_t uni = size_a + size_b - intersection;
    if (uni == 0) return 0.0;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

MatchIndex::MatchIndex(const PubClustering& target) : label_(target.label) {
    sizes_.reserve(target.clusters.size());
    for (ClusterId c = 0; c < target.clusters.size(); ++c) {
        std::size_t distinct = 0;
        for (const auto& id : target.clusters[c]) {
            auto [it, inserted] = owner_.emplace(id, c);
            if (inserted) {
                ++distinct;
            } else if (it->second != c) {
                throw DomainError("pub_id '" + id + "' appears in two clusters of '" + label_ + "'");
            }
        }
        sizes_.push_back(distinct);
    }
}

ClusterMatch MatchIndex::best(std::span<const std::string> source) const {
    std::unordered_set<std::string_view> seen;
    std::map<ClusterId, std::size_t> overlap;
    for (const auto& id : source) {
        if (!seen.insert(id).second) continue;
        if (auto it = owner_.find(id); it != owner_.end()) ++overlap[it->second];
    }
    ClusterMatch m;
    m.target_label = label_;
    m.source_size = seen.size();
    for (const auto& [c, inter] : overlap) {
        const double jc = jaccard(inter, m.source_size, sizes_[c]);
        // Ascending ids plus strict comparisons keep the lowest id on full ties.
        if (inter > m.intersection || (inter == m.intersection && jc > m.jaccard)) {
            m.target_cluster_id = c;
            m.target_size = sizes_[c];
            m.intersection = inter;
            m.jaccard = jc;
        }
    }
    if (m.source_size > 0) {
        m.proportion = static_cast<double>(m.intersection) / static_cast<double>(m.source_size);
    }
    return m;
}

ClusterMatch best_match(std::span<const std::string> source, const PubClustering& target) {
    if (source.empty()) throw DomainError("best_match requires a nonempty source cluster");
    return MatchIndex(target).best(source);
}

std::vector<ClusterMatch> match_all(const PubClustering& source,
                                    std::span<const PubClustering> targets) {
    std::vector<MatchIndex> indexes;
    indexes.reserve(targets.size());
    for (const auto& t : targets) indexes.emplace_back(t);

    std::vector<ClusterMatch> out;
    out.reserve(source.clusters.size());
    for (ClusterId c = 0; c < source.clusters.size(); ++c) {
        std::optional<ClusterMatch> best;
        for (const auto& index : indexes) {
            ClusterMatch m = index.best(source.clusters[c]);
            if (!best || m.intersection > best->intersection ||
                (m.intersection == best->intersection && m.jaccard > best->jaccard)) {
                best = std::move(m);
            }
        }
        if (!best) {
            best = ClusterMatch{};
            best->source_size = source.clusters[c].size();
        }
        best->source_cluster_id = c;
        out.push_back(std::move(*best));
    }
    return out;
}

std::vector<ClusterId> select_candidates(std::span<const ClusterMetrics> metrics,
                                         std::span<const ClusterMatch> matches,
                                         const SelectionCriteria& criteria) {
    if (criteria.min_size > criteria.max_size) {
        throw DomainError("selection min_size exceeds max_size");
    }
    std::map<ClusterId, double> best_jc;
    for (const auto& m : matches) {
        auto [it, inserted] = best_jc.try_emplace(m.source_cluster_id, m.jaccard);
        if (!inserted) it->second = std::max(it->second, m.jaccard);
    }
    std::vector<ClusterId> out;
    for (const auto& row : metrics) {
        if (row.size < criteria.min_size || row.size > criteria.max_size) continue;
        if (row.conductance > criteria.max_conductance) continue;
        auto it = best_jc.find(row.cluster_id);
        if (it == best_jc.end() || !(it->second > criteria.min_jaccard)) continue;
        out.push_back(row.cluster_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_matches_csv(std::span<const ClusterMatch> matches, const std::filesystem::path& path) {
    std::string out = "source_id,target_label,target_id,intersection,jaccard,proportion\n";
    for (const auto& m : matches) {
        out += std::to_string(m.source_cluster_id) + ',' + m.target_label + ',' +
               (m.target_cluster_id ? std::to_string(*m.target_cluster_id) : std::string("NA")) +
               ',' + std::to_string(m.intersection) + ',' + detail::format_fixed(m.jaccard, 6) + ',' +
               detail::format_fixed(m.proportion, 6) + '\n';
    }
    detail::write_file(path, out);
}

std::vector<ClusterMatch> read_matches_csv(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    auto rows = detail::lines(text);
    if (rows.empty() || rows[0] != "source_id,target_label,target_id,intersection,jaccard,proportion") {
        throw ParseError("'" + path.string() + "' is not a matches CSV", 1);
    }
    std::vector<ClusterMatch> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        auto f = detail::split(rows[i], ',');
        ClusterMatch m;
        ClusterId target = 0;
        bool ok = f.size() == 6 && detail::parse_int(f[0], m.source_cluster_id) &&
                  detail::parse_int(f[3], m.intersection) && detail::parse_double(f[4], m.jaccard) &&
                  detail::parse_double(f[5], m.proportion);
        if (ok && f[2] != "NA") {
            ok = detail::parse_int(f[2], target);
            m.target_cluster_id = target;
        }
        if (!ok) throw ParseError("malformed matches row", i + 1);
        m.target_label = std::string(f[1]);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace invcol
