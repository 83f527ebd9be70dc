#pragma once

// Markov Clustering: alternate matrix powers (expansion) and entrywise powers
// (inflation) of a column-stochastic matrix until it stops changing, then read
// clusters off the attractor structure of the limit.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace invcol::mcl {

struct Entry {
    NodeId row;
    double value;
};

/// Square sparse matrix stored by column, rows sorted within each column.
///
/// Used as the MCL iteration state; the operations below keep every column
/// summing to one.
class ColumnStochasticMatrix {
public:
    ColumnStochasticMatrix() = default;
    explicit ColumnStochasticMatrix(std::vector<std::vector<Entry>> columns)
        : columns_(std::move(columns)) {}

    static ColumnStochasticMatrix identity(std::size_t n);

    std::size_t dimension() const noexcept { return columns_.size(); }
    std::size_t nonzeros() const;

    std::span<const Entry> column(std::size_t j) const { return columns_[j]; }
    std::vector<Entry>& mutable_column(std::size_t j) { return columns_[j]; }

    /// Entry (i, j) or 0.
    double at(NodeId i, std::size_t j) const;

    /// Largest |sum(column) - 1| over all columns.
    double max_column_deviation() const;
    bool all_nonnegative() const;

    /// Largest absolute entrywise difference.
    static double max_abs_difference(const ColumnStochasticMatrix& a,
                                     const ColumnStochasticMatrix& b);

private:
    std::vector<std::vector<Entry>> columns_;
};

/// Symmetrized adjacency plus unit self-loops, columns normalized to sum 1.
ColumnStochasticMatrix build_transition_matrix(const CitationGraph& graph);

/// Sparse product a * b, one column at a time with a fixed accumulation order.
ColumnStochasticMatrix multiply(const ColumnStochasticMatrix& a, const ColumnStochasticMatrix& b,
                                unsigned threads = 1);

/// m^power by repeated multiplication. power >= 1.
ColumnStochasticMatrix expand(const ColumnStochasticMatrix& m, int power, unsigned threads = 1);

/// Raises entries to `exponent` and renormalizes every column.
ColumnStochasticMatrix inflate(const ColumnStochasticMatrix& m, double exponent);

/// Drops entries below `threshold` (never a column maximum) and renormalizes.
ColumnStochasticMatrix prune(const ColumnStochasticMatrix& m, double threshold);

struct Params {
    int expansion = 2;
    double inflation = 2.0;
    double prune_threshold = 1e-4;
    std::size_t max_iterations = 200;
    double convergence_epsilon = 1e-6;
    unsigned threads = 1;
};

/// Called after every expand, inflate and prune step with the step name and iteration.
using StepObserver =
    std::function<void(std::size_t iteration, const char* step, const ColumnStochasticMatrix&)>;

/// Reads a partition off a (near-)limit matrix. Attractors are nodes with a positive
/// diagonal; each node joins the attractor holding its largest entry (lowest index on
/// ties) and attractors that attract one another share a cluster.
Clustering interpret(const ColumnStochasticMatrix& m);

Clustering cluster(const CitationGraph& graph, const Params& params = {},
                   const StepObserver& observer = {});

}  // namespace invcol::mcl
