#include "invcol/null_model.hpp"

#include "invcol/error.hpp"
#include "invcol/rng.hpp"
#include "io_util.hpp"

#include <unordered_set>

#include <json.hpp>

namespace invcol {

namespace {

std::uint64_t key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

}  // namespace

ShuffleResult shuffle_citations(const CitationGraph& graph, std::size_t swaps, std::uint64_t seed) {
    ShuffleResult result;
    result.report.requested_swaps = swaps;
    result.report.seed = seed;
    if (swaps == 0) {
        result.graph = graph;
        return result;
    }
    auto edges = graph.edges();
    if (edges.size() < 2) throw DomainError("shuffling needs at least two edges");

    std::unordered_set<std::uint64_t> present;
    present.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) present.insert(key(u, v));

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> first(0, edges.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, edges.size() - 2);
    for (std::size_t attempt = 0; attempt < swaps; ++attempt) {
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        const auto [a, b] = edges[i];
        const auto [c, d] = edges[j];
        if (a == d || c == b || present.contains(key(a, d)) || present.contains(key(c, b))) {
            ++result.report.rejected_swaps;
            continue;
        }
        present.erase(key(a, b));
        present.erase(key(c, d));
        present.insert(key(a, d));
        present.insert(key(c, b));
        edges[i] = {a, d};
        edges[j] = {c, b};
        ++result.report.performed_swaps;
    }
    result.graph = CitationGraph::from_edges(graph.ids(), edges);
    return result;
}

std::string shuffle_report_json(const ShuffleReport& report) {
    nlohmann::ordered_json obj;
    obj["requested_swaps"] = report.requested_swaps;
    obj["performed_swaps"] = report.performed_swaps;
    obj["rejected_swaps"] = report.rejected_swaps;
    obj["seed"] = report.seed;
    return obj.dump(2) + "\n";
}

void write_shuffle_report(const ShuffleReport& report, const std::filesystem::path& path) {
    detail::write_file(path, shuffle_report_json(report));
}

}  // namespace invcol
