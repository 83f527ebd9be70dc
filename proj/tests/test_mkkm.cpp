#include "invcol/error.hpp"
#include "invcol/mkkm.hpp"
#include "invcol/synthetic.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace invcol;
using mkkm::WeightedGraph;
using Triple = std::tuple<NodeId, NodeId, double>;

namespace {

WeightedGraph two_triangles() {
    std::vector<Triple> e{{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {3, 4, 1}, {4, 5, 1}, {5, 3, 1}, {2, 3, 1}};
    return WeightedGraph::from_edges(6, e);
}

std::vector<Triple> random_weighted(std::size_t n, double p, std::uint64_t seed) {
    std::vector<Triple> out;
    for (auto [u, v] : oracle::undirected(oracle::random_directed(n, p, seed))) {
        out.emplace_back(u, v, 1.0 + static_cast<double>((u * 7 + v * 3 + seed) % 4));
    }
    return out;
}

}  // namespace

TEST(WeightedGraph, ParallelEdgesSumAndSelfLoopsRejected) {
    std::vector<Triple> e{{0, 1, 2.0}, {1, 0, 3.0}};
    auto g = WeightedGraph::from_edges(2, e);
    EXPECT_DOUBLE_EQ(g.edge_weight(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(g.volume[0], 5.0);
    std::vector<Triple> loop{{0, 0, 1.0}};
    EXPECT_THROW(WeightedGraph::from_edges(1, loop), DomainError);
}

TEST(Coarsen, HeavyEdgeIsContracted) {
    // Path a-b-c with w(a,b)=5 and w(b,c)=1, visited a, b, c.
    std::vector<Triple> e{{0, 1, 5.0}, {1, 2, 1.0}};
    auto g = WeightedGraph::from_edges(3, e);
    std::vector<NodeId> order{0, 1, 2};
    auto level = mkkm::coarsen_with_order(g, order);
    ASSERT_EQ(level.graph.node_count(), 2u);
    EXPECT_EQ(level.mapping[0], level.mapping[1]);
    EXPECT_NE(level.mapping[1], level.mapping[2]);
    const NodeId ab = level.mapping[0];
    const NodeId c = level.mapping[2];
    EXPECT_DOUBLE_EQ(level.graph.edge_weight(ab, c), 1.0);
    EXPECT_DOUBLE_EQ(level.graph.node_weight[ab], 2.0);
    EXPECT_DOUBLE_EQ(level.graph.node_weight[c], 1.0);
    EXPECT_DOUBLE_EQ(level.graph.volume[ab], 11.0);
    EXPECT_DOUBLE_EQ(level.graph.volume[c], 1.0);
}

TEST(Coarsen, PreservesTotalsAndCut) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto fine = WeightedGraph::from_edges(16, random_weighted(16, 0.25, s));
        auto level = mkkm::coarsen(fine, s);
        double fine_nodes = 0.0;
        double coarse_nodes = 0.0;
        double fine_vol = 0.0;
        double coarse_vol = 0.0;
        for (std::size_t u = 0; u < fine.node_count(); ++u) {
            fine_nodes += fine.node_weight[u];
            fine_vol += fine.volume[u];
        }
        for (std::size_t u = 0; u < level.graph.node_count(); ++u) {
            coarse_nodes += level.graph.node_weight[u];
            coarse_vol += level.graph.volume[u];
        }
        EXPECT_DOUBLE_EQ(fine_nodes, coarse_nodes);
        EXPECT_DOUBLE_EQ(fine_vol, coarse_vol);
        // Any coarse partition has the same normalized cut on both levels.
        std::vector<ClusterId> coarse_labels(level.graph.node_count());
        for (std::size_t u = 0; u < coarse_labels.size(); ++u) coarse_labels[u] = u % 2;
        std::vector<ClusterId> fine_labels(fine.node_count());
        for (std::size_t u = 0; u < fine_labels.size(); ++u) fine_labels[u] = coarse_labels[level.mapping[u]];
        EXPECT_NEAR(mkkm::normalized_cut(level.graph, coarse_labels),
                    mkkm::normalized_cut(fine, fine_labels), 1e-12);
    }
}

TEST(NormalizedCut, MatchesOracle) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto edges = random_weighted(12, 0.3, s);
        auto g = WeightedGraph::from_edges(12, edges);
        std::vector<ClusterId> labels(12);
        std::vector<std::size_t> plain(12);
        for (std::size_t u = 0; u < 12; ++u) plain[u] = labels[u] = (u * 5 + s) % 3;
        EXPECT_NEAR(mkkm::normalized_cut(g, labels), oracle::normalized_cut(12, edges, plain), 1e-12);
    }
}

TEST(NormalizedCut, TwoTrianglesSplit) {
    auto g = two_triangles();
    std::vector<ClusterId> labels{0, 0, 0, 1, 1, 1};
    EXPECT_DOUBLE_EQ(mkkm::normalized_cut(g, labels), 2.0 / 7.0);
}

TEST(Refine, ZeroSweepsReturnsInput) {
    auto g = two_triangles();
    std::vector<ClusterId> labels{0, 1, 0, 1, 0, 1};
    EXPECT_EQ(mkkm::refine(g, labels, 0), labels);
}

TEST(Refine, ObjectiveNeverIncreasesAndClustersStayNonempty) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto g = WeightedGraph::from_edges(14, random_weighted(14, 0.3, s));
        std::vector<ClusterId> labels(14);
        for (std::size_t u = 0; u < 14; ++u) labels[u] = (u + s) % 3;
        mkkm::RefineStats stats;
        auto out = mkkm::refine(g, labels, 50, &stats);
        ASSERT_FALSE(stats.objective.empty());
        for (std::size_t i = 1; i < stats.objective.size(); ++i) {
            EXPECT_LE(stats.objective[i], stats.objective[i - 1] + 1e-12);
        }
        EXPECT_NEAR(stats.objective.back(), mkkm::normalized_cut(g, out), 1e-9);
        std::set<ClusterId> used(out.begin(), out.end());
        EXPECT_EQ(used.size(), 3u);
    }
}

TEST(Refine, FindsExhaustiveOptimumOnTwoTriangles) {
    auto g = two_triangles();
    double best = 1e9;
    for (unsigned mask = 1; mask < (1u << 6) - 1; ++mask) {
        std::vector<ClusterId> labels(6);
        for (std::size_t u = 0; u < 6; ++u) labels[u] = mask >> u & 1;
        best = std::min(best, mkkm::normalized_cut(g, labels));
    }
    mkkm::Params p;
    p.k = 2;
    auto c = mkkm::cluster(g, p);
    EXPECT_NEAR(mkkm::normalized_cut(g, c.labels(6)), best, 1e-12);
    EXPECT_EQ(c.clusters[0], (std::vector<NodeId>{0, 1, 2}));
}

TEST(Refine, ReachesExhaustiveTwoWayOptimumOnSmallGraphs) {
    // Two dense blocks with a few cross links: the optimum is unique and clear.
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto planted = synthetic::planted_partition(2, 6, 0.8, 0.05, s);
        auto g = WeightedGraph::from_citation_graph(planted.graph);
        double best = 1e9;
        for (unsigned mask = 1; mask < (1u << 12) - 1; ++mask) {
            std::vector<ClusterId> labels(12);
            for (std::size_t u = 0; u < 12; ++u) labels[u] = mask >> u & 1;
            best = std::min(best, mkkm::normalized_cut(g, labels));
        }
        mkkm::Params p;
        p.k = 2;
        p.seed = s;
        auto c = mkkm::cluster(g, p);
        EXPECT_NEAR(mkkm::normalized_cut(g, c.labels(12)), best, 1e-9) << "seed " << s;
    }
}

TEST(MkkmCluster, KEqualsOne) {
    auto c = mkkm::cluster(two_triangles(), {.k = 1});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.clusters[0].size(), 6u);
}

TEST(MkkmCluster, KEqualsNodeCount) {
    auto c = mkkm::cluster(two_triangles(), {.k = 6});
    EXPECT_EQ(c.size(), 6u);
    EXPECT_TRUE(is_partition(c, 6));
}

TEST(MkkmCluster, KZeroIsRejected) {
    EXPECT_THROW(mkkm::cluster(two_triangles(), {.k = 0}), DomainError);
}

TEST(MkkmCluster, SameSeedSameResult) {
    auto planted = synthetic::planted_partition(4, 25, 0.3, 0.02, 9);
    mkkm::Params p{.k = 4, .seed = 3};
    auto a = mkkm::cluster(planted.graph, p);
    auto b = mkkm::cluster(planted.graph, p);
    EXPECT_EQ(a.clusters, b.clusters);
    EXPECT_EQ(a.provenance.params, b.provenance.params);
    EXPECT_EQ(a.provenance.engine, "mkkm");
}

TEST(ChooseK, HalfRoundedUp) {
    EXPECT_EQ(mkkm::choose_k(10568), 5284u);
    EXPECT_EQ(mkkm::choose_k(1), 1u);
    EXPECT_EQ(mkkm::choose_k(7), 4u);
    EXPECT_EQ(mkkm::choose_k(0), 1u);
}
