#pragma once

// Seeded generators for planted-partition citation graphs and topic-structured
// article text, used for desk-scale verification and the bundled toy dataset.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace invcol::synthetic {

struct PlantedGraph {
    CitationGraph graph;
    std::vector<ClusterId> truth;  // block of each node
};

/// `blocks` blocks of `block_size` nodes. Each unordered pair is linked with
/// probability p_in (same block) or p_out (different blocks); the citation
/// direction is a fair coin. Node ids are "<prefix><index>" zero-padded to 5 digits.
PlantedGraph planted_partition(std::size_t blocks, std::size_t block_size, double p_in,
                               double p_out, std::uint64_t seed, const std::string& prefix = "P");

struct TextParams {
    std::size_t topic_vocabulary = 150;
    std::size_t shared_vocabulary = 150;
    std::size_t tokens_per_article = 40;
    double topic_share = 0.7;       // probability a token comes from the article's topic
    double missing_text = 0.0;      // probability an article has neither title nor abstract
    std::size_t authors_per_topic = 40;
    std::size_t max_authors_per_paper = 4;
};

/// One record per node. Articles on topic t draw words from t's vocabulary and a
/// shared vocabulary (both Zipf-weighted) and authors from t's author pool.
std::vector<PubRecord> topic_records(const CitationGraph& graph, std::span<const ClusterId> topics,
                                     const TextParams& params, std::uint64_t seed,
                                     const std::string& slice);

}  // namespace invcol::synthetic
