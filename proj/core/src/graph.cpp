#include "invcol/graph.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include <json.hpp>

namespace invcol {

namespace {

void build_csr(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges,
               std::vector<std::size_t>& offsets, std::vector<NodeId>& targets) {
    std::sort(edges.begin(), edges.end());
    offsets.assign(n + 1, 0);
    targets.clear();
    targets.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        ++offsets[u + 1];
        targets.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
}

}  // namespace

CitationGraph CitationGraph::from_edges(std::vector<std::string> ids,
                                        std::span<const std::pair<NodeId, NodeId>> edges) {
    CitationGraph g;
    const std::size_t n = ids.size();
    g.index_.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
        if (!g.index_.emplace(ids[i], i).second) {
            throw DomainError("duplicate node id '" + ids[i] + "'");
        }
    }
    g.ids_ = std::move(ids);

    std::vector<std::pair<NodeId, NodeId>> clean;
    clean.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw DomainError("edge endpoint out of range");
        if (u != v) clean.emplace_back(u, v);
    }
    std::sort(clean.begin(), clean.end());
    clean.erase(std::unique(clean.begin(), clean.end()), clean.end());

    std::vector<std::pair<NodeId, NodeId>> reversed;
    reversed.reserve(clean.size());
    for (const auto& [u, v] : clean) reversed.emplace_back(v, u);

    build_csr(n, std::move(clean), g.out_offsets_, g.out_targets_);
    build_csr(n, std::move(reversed), g.in_offsets_, g.in_sources_);
    return g;
}

bool CitationGraph::has_edge(NodeId from, NodeId to) const {
    auto out = out_neighbors(from);
    return std::binary_search(out.begin(), out.end(), to);
}

std::optional<NodeId> CitationGraph::find(std::string_view pub_id) const {
    auto it = index_.find(std::string(pub_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId CitationGraph::at(std::string_view pub_id) const {
    if (auto u = find(pub_id)) return *u;
    throw DomainError("unknown node id '" + std::string(pub_id) + "'");
}

std::vector<std::pair<NodeId, NodeId>> CitationGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
        for (NodeId v : out_neighbors(u)) out.emplace_back(u, v);
    }
    return out;
}

std::vector<std::vector<NodeId>> CitationGraph::undirected_adjacency() const {
    std::vector<std::vector<NodeId>> adj(node_count());
    for (NodeId u = 0; u < node_count(); ++u) {
        auto out = out_neighbors(u);
        auto in = in_neighbors(u);
        auto& row = adj[u];
        row.reserve(out.size() + in.size());
        std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(row));
    }
    return adj;
}

NodeId GraphBuilder::intern(std::string_view pub_id) {
    auto [it, inserted] = index_.try_emplace(std::string(pub_id), static_cast<NodeId>(ids_.size()));
    if (inserted) ids_.emplace_back(pub_id);
    return it->second;
}

void GraphBuilder::add_edge(std::string_view citing, std::string_view cited) {
    NodeId u = intern(citing);
    NodeId v = intern(cited);
    add_edge(u, v);
}

void GraphBuilder::add_edge(NodeId citing, NodeId cited) {
    if (citing == cited) {
        ++self_loops_;
        return;
    }
    edges_.emplace_back(citing, cited);
}

std::size_t GraphBuilder::duplicates() const noexcept {
    auto sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(
        sorted.end() - std::unique(sorted.begin(), sorted.end()));
}

CitationGraph GraphBuilder::build() && {
    return CitationGraph::from_edges(std::move(ids_), edges_);
}

EdgeLoadResult parse_edges(std::string_view text) {
    GraphBuilder builder;
    std::size_t line_no = 0;
    for (std::string_view line : detail::lines(text)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError("expected 'citing<TAB>cited', got " + std::to_string(fields.size()) +
                                 " field(s)",
                             line_no);
        }
        builder.add_edge(fields[0], fields[1]);
    }
    EdgeLoadResult result;
    result.self_loops = builder.self_loops();
    result.duplicates = builder.duplicates();
    result.graph = std::move(builder).build();
    return result;
}

EdgeLoadResult load_edges(const std::filesystem::path& path) {
    return parse_edges(detail::read_file(path));
}

void write_edges(const CitationGraph& graph, const std::filesystem::path& path) {
    std::string out;
    out.reserve(graph.edge_count() * 16);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        for (NodeId v : graph.out_neighbors(u)) {
            out += graph.id(u);
            out += '\t';
            out += graph.id(v);
            out += '\n';
        }
    }
    detail::write_file(path, out);
}

namespace {

std::optional<std::string> nullable_string(const nlohmann::json& obj, const char* key,
                                           std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string("'") + key + "' must be a string or null", line_no);
    return it->get<std::string>();
}

std::string slice_string(const nlohmann::json& value, std::size_t line_no) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    throw ParseError("'slice' must be a string or integer", line_no);
}

}  // namespace

std::vector<PubRecord> parse_metadata(std::string_view text) {
    std::vector<PubRecord> records;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    for (std::string_view line : detail::lines(text)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!obj.is_object()) throw ParseError("expected a JSON object", line_no);
        if (!obj.contains("pub_id") || !obj["pub_id"].is_string()) {
            throw ParseError("missing string 'pub_id'", line_no);
        }
        if (!obj.contains("slice")) throw ParseError("missing 'slice'", line_no);

        PubRecord rec;
        rec.pub_id = obj["pub_id"].get<std::string>();
        rec.slice = slice_string(obj["slice"], line_no);
        rec.title = nullable_string(obj, "title", line_no);
        rec.abstract = nullable_string(obj, "abstract", line_no);
        if (auto it = obj.find("author_ids"); it != obj.end() && !it->is_null()) {
            if (!it->is_array()) throw ParseError("'author_ids' must be an array", line_no);
            for (const auto& a : *it) {
                if (!a.is_string()) throw ParseError("author ids must be strings", line_no);
                rec.author_ids.push_back(a.get<std::string>());
            }
        }
        if (!seen.emplace(rec.pub_id, line_no).second) {
            throw ParseError("duplicate pub_id '" + rec.pub_id + "'", line_no);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PubRecord> load_metadata(const std::filesystem::path& path) {
    return parse_metadata(detail::read_file(path));
}

void write_metadata(std::span<const PubRecord> records, const std::filesystem::path& path) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json obj;
        obj["pub_id"] = r.pub_id;
        obj["slice"] = r.slice;
        obj["title"] = r.title ? nlohmann::ordered_json(*r.title) : nlohmann::ordered_json(nullptr);
        obj["abstract"] =
            r.abstract ? nlohmann::ordered_json(*r.abstract) : nlohmann::ordered_json(nullptr);
        obj["author_ids"] = r.author_ids;
        out += obj.dump();
        out += '\n';
    }
    detail::write_file(path, out);
}

Dataset Dataset::assemble(std::string label, CitationGraph graph, std::vector<PubRecord> records) {
    std::unordered_map<std::string, std::size_t> by_id;
    by_id.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!by_id.emplace(records[i].pub_id, i).second) {
            throw DomainError("duplicate pub_id '" + records[i].pub_id + "'");
        }
    }

    // Metadata-only records are appended as isolated nodes, in record order.
    std::vector<std::string> ids = graph.ids();
    bool grew = false;
    for (const auto& r : records) {
        if (!graph.find(r.pub_id)) {
            ids.push_back(r.pub_id);
            grew = true;
        }
    }
    if (grew) graph = CitationGraph::from_edges(std::move(ids), graph.edges());

    Dataset ds;
    ds.label = std::move(label);
    ds.records.resize(graph.node_count());
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        auto it = by_id.find(graph.id(u));
        if (it != by_id.end()) {
            ds.records[u] = std::move(records[it->second]);
        } else {
            ds.records[u].pub_id = graph.id(u);
            ds.records[u].slice = ds.label;
            ds.records[u].synthesized = true;
        }
    }
    ds.graph = std::move(graph);
    return ds;
}

bool slice_less(std::string_view a, std::string_view b) {
    long long x = 0;
    long long y = 0;
    auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), x);
    auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), y);
    if (ea == std::errc{} && eb == std::errc{} && pa == a.data() + a.size() &&
        pb == b.data() + b.size()) {
        return x < y;
    }
    return a < b;
}

namespace {

// True when `candidate` should replace `current` as the kept record.
bool preferred(const PubRecord& candidate, const PubRecord& current) {
    if (candidate.synthesized != current.synthesized) return !candidate.synthesized;
    return slice_less(candidate.slice, current.slice);
}

bool same_metadata(const PubRecord& a, const PubRecord& b) {
    return a.title == b.title && a.abstract == b.abstract && a.author_ids == b.author_ids;
}

}  // namespace

Dataset union_datasets(std::span<const Dataset> parts, UnionReport* report) {
    if (parts.empty()) throw DomainError("union_datasets requires at least one dataset");

    GraphBuilder builder;
    for (const auto& part : parts) {
        for (const auto& id : part.graph.ids()) builder.intern(id);
    }
    for (const auto& part : parts) {
        for (const auto& [u, v] : part.graph.edges()) {
            builder.add_edge(part.graph.id(u), part.graph.id(v));
        }
    }
    CitationGraph graph = std::move(builder).build();

    std::vector<std::optional<PubRecord>> kept(graph.node_count());
    std::set<NodeId> conflicting;
    for (const auto& part : parts) {
        for (NodeId u = 0; u < part.graph.node_count(); ++u) {
            const PubRecord& rec = part.records[u];
            NodeId target = graph.at(part.graph.id(u));
            auto& slot = kept[target];
            if (!slot) {
                slot = rec;
                continue;
            }
            if (!rec.synthesized && !slot->synthesized && !same_metadata(rec, *slot)) {
                conflicting.insert(target);
            }
            if (preferred(rec, *slot)) slot = rec;
        }
    }

    Dataset ds;
    ds.label = "combined";
    ds.records.reserve(graph.node_count());
    for (auto& r : kept) ds.records.push_back(std::move(*r));
    ds.graph = std::move(graph);
    if (report) report->metadata_conflicts = conflicting.size();
    return ds;
}

CitationGraph induced_subgraph(const CitationGraph& graph, std::span<const NodeId> members) {
    std::vector<NodeId> local(graph.node_count(), static_cast<NodeId>(-1));
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (NodeId u : members) {
        if (u >= graph.node_count()) {
            throw DomainError("unknown node index " + std::to_string(u));
        }
        if (local[u] != static_cast<NodeId>(-1)) {
            throw DomainError("node '" + graph.id(u) + "' listed twice");
        }
        local[u] = static_cast<NodeId>(ids.size());
        ids.push_back(graph.id(u));
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u : members) {
        for (NodeId v : graph.out_neighbors(u)) {
            if (local[v] != static_cast<NodeId>(-1)) edges.emplace_back(local[u], local[v]);
        }
    }
    return CitationGraph::from_edges(std::move(ids), edges);
}

}  // namespace invcol
