#pragma once

// Publication records, the directed citation graph, and datasets built from them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace invcol {

using NodeId = std::uint32_t;

struct PubRecord {
    std::string pub_id;
    std::string slice;
    std::optional<std::string> title;
    std::optional<std::string> abstract;
    std::vector<std::string> author_ids;
    // True for placeholder records created for edge endpoints that had no metadata line.
    bool synthesized = false;

    bool has_text() const noexcept { return title.has_value() || abstract.has_value(); }

    friend bool operator==(const PubRecord&, const PubRecord&) = default;
};

/// Directed citation graph (citing -> cited) over dense node indices.
///
/// Both adjacency directions are stored in CSR form with sorted neighbor
/// lists. The graph never contains self-loops or duplicate edges.
class CitationGraph {
public:
    CitationGraph() = default;

    /// Builds a graph over `ids` (index order preserved). Self-loops and duplicate
    /// edges are dropped; callers that need the counts use GraphBuilder.
    static CitationGraph from_edges(std::vector<std::string> ids,
                                    std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return out_targets_.size(); }

    std::span<const NodeId> out_neighbors(NodeId u) const {
        return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
    }
    std::span<const NodeId> in_neighbors(NodeId u) const {
        return {in_sources_.data() + in_offsets_[u], in_sources_.data() + in_offsets_[u + 1]};
    }
    std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
    std::size_t in_degree(NodeId u) const { return in_offsets_[u + 1] - in_offsets_[u]; }

    bool has_edge(NodeId from, NodeId to) const;

    const std::string& id(NodeId u) const { return ids_[u]; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::optional<NodeId> find(std::string_view pub_id) const;
    /// Like find(), but throws DomainError naming the id when it is absent.
    NodeId at(std::string_view pub_id) const;

    /// All edges in (source, target) order.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    /// Undirected simple neighbor lists: union of in- and out-neighbors, sorted.
    std::vector<std::vector<NodeId>> undirected_adjacency() const;

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<NodeId> out_targets_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<NodeId> in_sources_;
};

/// Incremental builder that interns string ids in first-appearance order and
/// counts dropped self-loops and duplicates.
class GraphBuilder {
public:
    NodeId intern(std::string_view pub_id);
    void add_edge(std::string_view citing, std::string_view cited);
    void add_edge(NodeId citing, NodeId cited);

    std::size_t self_loops() const noexcept { return self_loops_; }
    std::size_t duplicates() const noexcept;

    CitationGraph build() &&;

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::size_t self_loops_ = 0;
};

struct EdgeLoadResult {
    CitationGraph graph;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

/// Reads a `citing<TAB>cited` edge list. Lines starting with '#' and blank
/// lines are skipped. Throws ParseError with the line number on a malformed line.
EdgeLoadResult load_edges(const std::filesystem::path& path);
EdgeLoadResult parse_edges(std::string_view text);

/// Writes the graph as a TSV edge list in CSR order.
void write_edges(const CitationGraph& graph, const std::filesystem::path& path);

/// Reads JSON-lines metadata. Throws ParseError on malformed JSON or a duplicate pub_id.
std::vector<PubRecord> load_metadata(const std::filesystem::path& path);
std::vector<PubRecord> parse_metadata(std::string_view text);
void write_metadata(std::span<const PubRecord> records, const std::filesystem::path& path);

/// A labeled graph together with one record per node (records[u] describes node u).
struct Dataset {
    std::string label;
    CitationGraph graph;
    std::vector<PubRecord> records;

    /// Joins a graph with metadata. Records with no edges become isolated nodes;
    /// edge endpoints without a record receive a synthesized record sliced by `label`.
    static Dataset assemble(std::string label, CitationGraph graph, std::vector<PubRecord> records);
};

struct UnionReport {
    std::size_t metadata_conflicts = 0;
};

/// Set-union of datasets keyed by pub_id, labeled "combined". For ids present in
/// several parts the real (non-synthesized) record from the earliest slice wins.
Dataset union_datasets(std::span<const Dataset> parts, UnionReport* report = nullptr);

/// Orders slice labels numerically when both parse as integers, lexically otherwise.
bool slice_less(std::string_view a, std::string_view b);

/// Graph restricted to `members` (kept in the given order), edge directions preserved.
CitationGraph induced_subgraph(const CitationGraph& graph, std::span<const NodeId> members);

}  // namespace invcol
