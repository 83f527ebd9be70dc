#include "invcol/synthetic.hpp"

#include "invcol/error.hpp"
#include "invcol/rng.hpp"

#include <cstdio>
#include <set>

namespace invcol::synthetic {

namespace {

std::vector<double> zipf_weights(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    return w;
}

std::string padded(const std::string& prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%05zu", i);
    return prefix + buf;
}

}  // namespace

PlantedGraph planted_partition(std::size_t blocks, std::size_t block_size, double p_in,
                               double p_out, std::uint64_t seed, const std::string& prefix) {
    if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0)) {
        throw DomainError("edge probabilities must lie in [0, 1]");
    }
    const std::size_t n = blocks * block_size;
    PlantedGraph out;
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(padded(prefix, i));
        out.truth.push_back(i / block_size);
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            const double p = out.truth[u] == out.truth[v] ? p_in : p_out;
            if (unit(rng) >= p) continue;
            if (unit(rng) < 0.5) {
                edges.emplace_back(u, v);
            } else {
                edges.emplace_back(v, u);
            }
        }
    }
    out.graph = CitationGraph::from_edges(std::move(ids), edges);
    return out;
}

std::vector<PubRecord> topic_records(const CitationGraph& graph, std::span<const ClusterId> topics,
                                     const TextParams& params, std::uint64_t seed,
                                     const std::string& slice) {
    if (topics.size() != graph.node_count()) throw DomainError("one topic per node required");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto topic_weights = zipf_weights(params.topic_vocabulary);
    auto shared_weights = zipf_weights(params.shared_vocabulary);
    auto author_weights = zipf_weights(params.authors_per_topic);
    std::discrete_distribution<std::size_t> topic_word(topic_weights.begin(), topic_weights.end());
    std::discrete_distribution<std::size_t> shared_word(shared_weights.begin(), shared_weights.end());
    std::discrete_distribution<std::size_t> author(author_weights.begin(), author_weights.end());
    std::uniform_int_distribution<std::size_t> author_count(1, params.max_authors_per_paper);

    std::vector<PubRecord> records;
    records.reserve(graph.node_count());
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        PubRecord rec;
        rec.pub_id = graph.id(u);
        rec.slice = slice;
        const std::string topic = std::to_string(topics[u]);

        std::string title;
        std::string abstract;
        for (std::size_t t = 0; t < params.tokens_per_article; ++t) {
            std::string word = unit(rng) < params.topic_share
                                   ? "t" + topic + "w" + std::to_string(topic_word(rng))
                                   : "gw" + std::to_string(shared_word(rng));
            std::string& target = t < 8 ? title : abstract;
            if (!target.empty()) target += ' ';
            target += word;
        }
        if (unit(rng) >= params.missing_text) {
            rec.title = std::move(title);
            rec.abstract = std::move(abstract);
        }

        std::set<std::string> authors;
        const std::size_t k = author_count(rng);
        while (authors.size() < std::min(k, params.authors_per_topic)) {
            authors.insert("A" + topic + "_" + std::to_string(author(rng)));
        }
        rec.author_ids.assign(authors.begin(), authors.end());
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace invcol::synthetic
