#include "invcol/mcl.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invcol::mcl {

namespace {

void normalize(std::vector<Entry>& col) {
    double sum = 0.0;
    for (const auto& e : col) sum += e.value;
    if (sum <= 0.0) return;
    for (auto& e : col) e.value /= sum;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ColumnStochasticMatrix ColumnStochasticMatrix::identity(std::size_t n) {
    std::vector<std::vector<Entry>> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j].push_back({static_cast<NodeId>(j), 1.0});
    return ColumnStochasticMatrix(std::move(cols));
}

std::size_t ColumnStochasticMatrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
}

double ColumnStochasticMatrix::at(NodeId i, std::size_t j) const {
    const auto& col = columns_[j];
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const Entry& e, NodeId r) { return e.row < r; });
    return (it != col.end() && it->row == i) ? it->value : 0.0;
}

double ColumnStochasticMatrix::max_column_deviation() const {
    double worst = 0.0;
    for (const auto& col : columns_) {
        double sum = 0.0;
        for (const auto& e : col) sum += e.value;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

bool ColumnStochasticMatrix::all_nonnegative() const {
    for (const auto& col : columns_) {
        for (const auto& e : col) {
            if (!(e.value >= 0.0)) return false;
        }
    }
    return true;
}

double ColumnStochasticMatrix::max_abs_difference(const ColumnStochasticMatrix& a,
                                                  const ColumnStochasticMatrix& b) {
    if (a.dimension() != b.dimension()) throw DomainError("matrix dimensions differ");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.dimension(); ++j) {
        auto ca = a.column(j);
        auto cb = b.column(j);
        std::size_t x = 0;
        std::size_t y = 0;
        while (x < ca.size() || y < cb.size()) {
            if (y == cb.size() || (x < ca.size() && ca[x].row < cb[y].row)) {
                worst = std::max(worst, std::abs(ca[x++].value));
            } else if (x == ca.size() || cb[y].row < ca[x].row) {
                worst = std::max(worst, std::abs(cb[y++].value));
            } else {
                worst = std::max(worst, std::abs(ca[x++].value - cb[y++].value));
            }
        }
    }
    return worst;
}

ColumnStochasticMatrix build_transition_matrix(const CitationGraph& graph) {
    const auto adj = graph.undirected_adjacency();
    std::vector<std::vector<Entry>> cols(graph.node_count());
    for (NodeId j = 0; j < graph.node_count(); ++j) {
        auto& col = cols[j];
        col.reserve(adj[j].size() + 1);
        bool self_added = false;
        for (NodeId i : adj[j]) {
            if (!self_added && j < i) {
                col.push_back({j, 1.0});
                self_added = true;
            }
            col.push_back({i, 1.0});
        }
        if (!self_added) col.push_back({j, 1.0});
        normalize(col);
    }
    return ColumnStochasticMatrix(std::move(cols));
}

ColumnStochasticMatrix multiply(const ColumnStochasticMatrix& a, const ColumnStochasticMatrix& b,
                                unsigned threads) {
    const std::size_t n = a.dimension();
    if (b.dimension() != n) throw DomainError("matrix dimensions differ");
    std::vector<std::vector<Entry>> out(n);

    detail::parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc(n, 0.0);
        std::vector<char> touched(n, 0);
        std::vector<NodeId> rows;
        for (std::size_t j = begin; j < end; ++j) {
            rows.clear();
            for (const Entry& bk : b.column(j)) {
                for (const Entry& ai : a.column(bk.row)) {
                    if (!touched[ai.row]) {
                        touched[ai.row] = 1;
                        rows.push_back(ai.row);
                    }
                    acc[ai.row] += ai.value * bk.value;
                }
            }
            std::sort(rows.begin(), rows.end());
            auto& col = out[j];
            col.reserve(rows.size());
            for (NodeId r : rows) {
                if (acc[r] > 0.0) col.push_back({r, acc[r]});
                acc[r] = 0.0;
                touched[r] = 0;
            }
        }
    });
    return ColumnStochasticMatrix(std::move(out));
}

ColumnStochasticMatrix expand(const ColumnStochasticMatrix& m, int power, unsigned threads) {
    if (power < 1) throw DomainError("expansion power must be >= 1");
    ColumnStochasticMatrix result = m;
    for (int p = 1; p < power; ++p) result = multiply(m, result, threads);
    return result;
}

ColumnStochasticMatrix inflate(const ColumnStochasticMatrix& m, double exponent) {
    if (!(exponent > 0.0)) throw DomainError("inflation exponent must be positive");
    ColumnStochasticMatrix out = m;
    if (exponent == 1.0) return out;
    for (std::size_t j = 0; j < out.dimension(); ++j) {
        auto& col = out.mutable_column(j);
        for (auto& e : col) e.value = std::pow(e.value, exponent);
        std::erase_if(col, [](const Entry& e) { return e.value <= 0.0; });
        normalize(col);
    }
    return out;
}

ColumnStochasticMatrix prune(const ColumnStochasticMatrix& m, double threshold) {
    if (threshold < 0.0) throw DomainError("prune threshold must be >= 0");
    ColumnStochasticMatrix out = m;
    if (threshold == 0.0) return out;
    for (std::size_t j = 0; j < out.dimension(); ++j) {
        auto& col = out.mutable_column(j);
        if (col.empty()) continue;
        double max_value = 0.0;
        for (const auto& e : col) max_value = std::max(max_value, e.value);
        const std::size_t before = col.size();
        std::erase_if(col, [&](const Entry& e) { return e.value < threshold && e.value < max_value; });
        if (col.size() != before) normalize(col);
    }
    return out;
}

Clustering interpret(const ColumnStochasticMatrix& m) {
    const std::size_t n = m.dimension();
    std::vector<char> attractor(n, 0);
    for (std::size_t j = 0; j < n; ++j) attractor[j] = m.at(static_cast<NodeId>(j), j) > 0.0;

    DisjointSets sets(n);
    for (std::size_t u = 0; u < n; ++u) {
        auto col = m.column(u);
        if (attractor[u]) {
            for (const Entry& e : col) {
                if (attractor[e.row] && e.value > 0.0) sets.unite(u, e.row);
            }
        }
        // Strictly-greater scans over ascending rows give lowest-index tie breaking.
        const Entry* best = nullptr;
        for (const Entry& e : col) {
            if (attractor[e.row] && e.value > 0.0 && (!best || e.value > best->value)) best = &e;
        }
        if (!best) {
            for (const Entry& e : col) {
                if (e.value > 0.0 && (!best || e.value > best->value)) best = &e;
            }
        }
        if (best) sets.unite(u, best->row);
    }

    std::vector<ClusterId> labels(n);
    for (std::size_t u = 0; u < n; ++u) labels[u] = sets.find(u);
    return Clustering::from_labels(labels);
}

Clustering cluster(const CitationGraph& graph, const Params& params, const StepObserver& observer) {
    if (params.expansion < 2) throw DomainError("expansion must be >= 2");
    if (!(params.inflation >= 1.0)) throw DomainError("inflation must be >= 1");

    ColumnStochasticMatrix m = build_transition_matrix(graph);
    std::size_t iteration = 0;
    bool converged = false;
    while (iteration < params.max_iterations) {
        ++iteration;
        ColumnStochasticMatrix next = expand(m, params.expansion, params.threads);
        if (observer) observer(iteration, "expand", next);
        next = inflate(next, params.inflation);
        if (observer) observer(iteration, "inflate", next);
        next = prune(next, params.prune_threshold);
        if (observer) observer(iteration, "prune", next);

        const double change = ColumnStochasticMatrix::max_abs_difference(m, next);
        m = std::move(next);
        if (change < params.convergence_epsilon) {
            converged = true;
            break;
        }
    }

    Clustering result = interpret(m);
    auto& prov = result.provenance;
    prov.engine = "mcl";
    prov.params = {
        {"expansion", std::to_string(params.expansion)},
        {"inflation", detail::format_fixed(params.inflation, 4)},
        {"prune_threshold", detail::format_fixed(params.prune_threshold, 8)},
        {"max_iterations", std::to_string(params.max_iterations)},
        {"convergence_epsilon", detail::format_fixed(params.convergence_epsilon, 10)},
    };
    prov.iterations = iteration;
    prov.converged = converged;
    if (!converged) prov.params["status"] = "unconverged";
    return result;
}

}  // namespace invcol::mcl
