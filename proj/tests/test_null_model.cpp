#include "invcol/error.hpp"
#include "invcol/null_model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace invcol;

TEST(Shuffle, ZeroSwapsIsIdentity) {
    auto g = oracle::make_graph(5, oracle::random_directed(5, 0.4, 2));
    auto r = shuffle_citations(g, 0, 1);
    EXPECT_EQ(r.graph.edges(), g.edges());
    EXPECT_EQ(r.report.performed_swaps, 0u);
    EXPECT_EQ(r.report.rejected_swaps, 0u);
}

TEST(Shuffle, TwoDisjointEdgesAreForcedToSwap) {
    // a->b, c->d can only become a->d, c->b.
    auto g = oracle::make_graph(4, {{0, 1}, {2, 3}});
    auto r = shuffle_citations(g, 1, 5);
    EXPECT_EQ(r.report.performed_swaps, 1u);
    EXPECT_TRUE(r.graph.has_edge(0, 3));
    EXPECT_TRUE(r.graph.has_edge(2, 1));
    EXPECT_EQ(r.graph.edge_count(), 2u);
}

TEST(Shuffle, TwoCycleSwapIsRejected) {
    // Swapping a->b and b->a would create two self-loops.
    auto g = oracle::make_graph(2, {{0, 1}, {1, 0}});
    auto r = shuffle_citations(g, 10, 3);
    EXPECT_EQ(r.report.performed_swaps, 0u);
    EXPECT_EQ(r.report.rejected_swaps, 10u);
    EXPECT_EQ(r.graph.edges(), g.edges());
}

TEST(Shuffle, DuplicateCreatingSwapIsRejected) {
    // a->b, c->d with a->d already present: the swap would duplicate a->d.
    auto g = oracle::make_graph(4, {{0, 1}, {2, 3}, {0, 3}});
    auto r = shuffle_citations(g, 200, 8);
    EXPECT_EQ(r.graph.edge_count(), 3u);
    EXPECT_EQ(r.report.performed_swaps + r.report.rejected_swaps, 200u);
}

TEST(Shuffle, TooFewEdges) {
    auto g = oracle::make_graph(2, {{0, 1}});
    EXPECT_THROW(shuffle_citations(g, 1, 1), DomainError);
    EXPECT_NO_THROW(shuffle_citations(g, 0, 1));
}

TEST(Shuffle, PreservesDegreesAndSimplicity) {
    for (std::uint64_t s = 0; s < 25; ++s) {
        auto g = oracle::make_graph(30, oracle::random_directed(30, 0.1, s));
        auto r = shuffle_citations(g, 10 * g.edge_count(), s);
        ASSERT_EQ(r.graph.edge_count(), g.edge_count());
        EXPECT_EQ(r.graph.ids(), g.ids());
        for (NodeId u = 0; u < g.node_count(); ++u) {
            EXPECT_EQ(r.graph.in_degree(u), g.in_degree(u));
            EXPECT_EQ(r.graph.out_degree(u), g.out_degree(u));
            EXPECT_FALSE(r.graph.has_edge(u, u));
        }
        EXPECT_EQ(r.report.requested_swaps, 10 * g.edge_count());
        EXPECT_EQ(r.report.performed_swaps + r.report.rejected_swaps, r.report.requested_swaps);
    }
}

TEST(Shuffle, SeedDeterminesResult) {
    auto g = oracle::make_graph(40, oracle::random_directed(40, 0.1, 1));
    auto a = shuffle_citations(g, 500, 77);
    auto b = shuffle_citations(g, 500, 77);
    auto c = shuffle_citations(g, 500, 78);
    EXPECT_EQ(a.graph.edges(), b.graph.edges());
    EXPECT_NE(a.graph.edges(), c.graph.edges());
}

TEST(ShuffleReport, JsonFields) {
    ShuffleReport rep{10, 7, 3, 42};
    auto j = nlohmann::json::parse(shuffle_report_json(rep));
    EXPECT_EQ(j.at("requested_swaps"), 10);
    EXPECT_EQ(j.at("performed_swaps"), 7);
    EXPECT_EQ(j.at("rejected_swaps"), 3);
    EXPECT_EQ(j.at("seed"), 42);
}
