#pragma once

#include "invcol/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace invcol {

struct ShuffleReport {
    std::size_t requested_swaps = 0;
    std::size_t performed_swaps = 0;
    std::size_t rejected_swaps = 0;
    std::uint64_t seed = 0;
};

struct ShuffleResult {
    CitationGraph graph;
    ShuffleReport report;
};

/// Degree-preserving citation shuffle. Each attempt draws two distinct edges
/// a->b and c->d uniformly and rewires them to a->d and c->b, rejecting the
/// attempt if that would create a self-loop or a duplicate edge. Node ids and
/// indices are unchanged. Throws DomainError when swaps > 0 and the graph has
/// fewer than two edges.
ShuffleResult shuffle_citations(const CitationGraph& graph, std::size_t swaps, std::uint64_t seed);

void write_shuffle_report(const ShuffleReport& report, const std::filesystem::path& path);
std::string shuffle_report_json(const ShuffleReport& report);

}  // namespace invcol
