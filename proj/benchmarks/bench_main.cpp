#include "invcol/coherence.hpp"
#include "invcol/mcl.hpp"
#include "invcol/mkkm.hpp"
#include "invcol/null_model.hpp"
#include "invcol/synthetic.hpp"
#include "invcol/text.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

using namespace invcol;

namespace {

synthetic::PlantedGraph planted(std::size_t blocks) {
    return synthetic::planted_partition(blocks, 50, 0.3, 0.005, 20240601);
}

void BM_MclCluster(benchmark::State& state) {
    auto g = planted(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mcl::cluster(g.graph));
    state.SetLabel(std::to_string(g.graph.node_count()) + " nodes");
}
BENCHMARK(BM_MclCluster)->Arg(4)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MclExpand(benchmark::State& state) {
    auto g = planted(10);
    auto m = mcl::build_transition_matrix(g.graph);
    mcl::ColumnStochasticMatrix cur = mcl::inflate(mcl::expand(m, 2), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(mcl::expand(cur, 2));
}
BENCHMARK(BM_MclExpand)->Unit(benchmark::kMillisecond);

void BM_MkkmCluster(benchmark::State& state) {
    const auto blocks = static_cast<std::size_t>(state.range(0));
    auto g = planted(blocks);
    mkkm::Params p;
    p.k = blocks;
    for (auto _ : state) benchmark::DoNotOptimize(mkkm::cluster(g.graph, p));
}
BENCHMARK(BM_MkkmCluster)->Arg(4)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Jsd(benchmark::State& state) {
    const auto terms = static_cast<text::TermId>(state.range(0));
    std::vector<std::pair<text::TermId, std::uint32_t>> a;
    std::vector<std::pair<text::TermId, std::uint32_t>> b;
    for (text::TermId t = 0; t < terms; ++t) {
        if (t % 2 == 0) a.emplace_back(t, 1 + t % 5);
        if (t % 3 == 0) b.emplace_back(t, 1 + t % 7);
    }
    auto p = text::TermVector::from_counts(a);
    auto q = text::TermVector::from_counts(b);
    for (auto _ : state) benchmark::DoNotOptimize(text::jsd(p, q));
}
BENCHMARK(BM_Jsd)->Arg(100)->Arg(10000);

void BM_RandomBaseline(benchmark::State& state) {
    auto g = planted(10);
    auto records = synthetic::topic_records(g.graph, g.truth, {}, 3, "2000");
    auto corpus = Corpus::build(records);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(jsd_random_baseline(corpus, n, 50, 1));
}
BENCHMARK(BM_RandomBaseline)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Shuffle(benchmark::State& state) {
    auto g = planted(static_cast<std::size_t>(state.range(0)));
    const std::size_t swaps = 10 * g.graph.edge_count();
    for (auto _ : state) benchmark::DoNotOptimize(shuffle_citations(g.graph, swaps, 5));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * swaps));
}
BENCHMARK(BM_Shuffle)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
