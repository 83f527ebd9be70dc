#include "invcol/error.hpp"
#include "invcol/text.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace invcol;
using namespace invcol::text;

namespace {

std::vector<std::string> norm(const char* title, const StopList& stop = StopList{}) {
    return normalize_text(std::string_view(title), std::nullopt, stop);
}

TermVector vec(std::vector<std::pair<TermId, std::uint32_t>> counts) {
    return TermVector::from_counts(std::move(counts));
}

}  // namespace

TEST(NormalizeToken, SuffixExamples) {
    EXPECT_EQ(normalize_token("growing"), "grow");
    EXPECT_EQ(normalize_token("cells"), "cell");
    EXPECT_EQ(normalize_token("growth"), "growth");
    EXPECT_EQ(normalize_token("grows"), "grow");
    EXPECT_EQ(normalize_token("quickly"), "quick");
    EXPECT_EQ(normalize_token("class"), "class");
    EXPECT_EQ(normalize_token("is"), "is");
}

TEST(NormalizeToken, IsIdempotent) {
    for (const char* w : {"growing", "processes", "classes", "tested", "boxes", "ringings", "kindly",
                          "nesses", "sings", "stressed", "analyses", "bus", "ss", "dresses"}) {
        const std::string once = normalize_token(w);
        EXPECT_EQ(normalize_token(once), once) << w;
    }
}

TEST(NormalizeText, ExamplesFromTitles) {
    EXPECT_EQ(norm("growing cells"), (std::vector<std::string>{"grow", "cell"}));
    EXPECT_EQ(norm("Growth grows"), (std::vector<std::string>{"growth", "grow"}));
}

TEST(NormalizeText, StopWordsAndShortTokensDropped) {
    StopList stop({"the", "of"});
    EXPECT_EQ(norm("The growth of a cell", stop), (std::vector<std::string>{"growth", "cell"}));
    EXPECT_TRUE(StopList::defaults().contains("the"));
    EXPECT_EQ(normalize_text(std::string_view("the of and"), std::nullopt).size(), 0u);
}

TEST(NormalizeText, TitleAndAbstractConcatenated) {
    auto t = normalize_text(std::string_view("Cells"), std::string_view("grow-fast; in vitro!"), StopList{});
    EXPECT_EQ(t, (std::vector<std::string>{"cell", "grow", "fast", "in", "vitro"}));
    EXPECT_TRUE(normalize_text(std::nullopt, std::nullopt).empty());
}

TEST(StopList, LoadSkipsCommentsAndLowercases) {
    auto path = std::filesystem::temp_directory_path() / "invcol-text-test" / "stop.txt";
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << "# comment\nThe\n\nOF\n";
    auto s = StopList::load(path);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_TRUE(s.contains("the"));
    EXPECT_TRUE(s.contains("of"));
}

TEST(TermVector, CountsAreSortedAndZeroFree) {
    std::vector<TermId> terms{3, 1, 3, 3};
    auto v = TermVector::from_terms(terms);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v.entries()[0], (std::pair<TermId, std::uint32_t>{1, 1}));
    EXPECT_EQ(v.count(3), 3u);
    EXPECT_EQ(v.total(), 4u);
    EXPECT_EQ(vec({{2, 0}, {1, 1}, {1, 2}}), vec({{1, 3}}));
}

TEST(Jsd, HandComputedValue) {
    // P = (1/2, 1/2), Q = (1, 0): JSD = 1.5 - 0.75 log2 3.
    const double expected = 1.5 - 0.75 * std::log2(3.0);
    EXPECT_NEAR(jsd(vec({{0, 1}, {1, 1}}), vec({{0, 1}})), expected, 1e-12);
    EXPECT_NEAR(expected, 0.3113, 5e-5);
}

TEST(Jsd, BoundsAndSymmetry) {
    EXPECT_DOUBLE_EQ(jsd(vec({{0, 2}, {1, 6}}), vec({{0, 1}, {1, 3}})), 0.0);
    EXPECT_DOUBLE_EQ(jsd(vec({{0, 1}}), vec({{1, 1}})), 1.0);
    auto p = vec({{0, 3}, {1, 1}, {4, 2}});
    auto q = vec({{1, 5}, {2, 1}, {4, 1}});
    EXPECT_DOUBLE_EQ(jsd(p, q), jsd(q, p));
    EXPECT_THROW(jsd(TermVector{}, q), DomainError);
}

TEST(ClusterTermStats, SingletonTermsDropped) {
    std::vector<TermVector> articles{vec({{0, 1}, {1, 1}}), vec({{0, 1}, {2, 2}})};
    auto stats = cluster_term_stats(articles);
    EXPECT_EQ(stats.dropped_terms, 1u);
    EXPECT_EQ(stats.cluster, vec({{0, 2}, {2, 2}}));
    EXPECT_EQ(stats.articles[0], vec({{0, 1}}));
    ASSERT_TRUE(mean_article_jsd(stats).has_value());

    std::vector<TermVector> lonely{vec({{0, 1}}), vec({{1, 1}})};
    EXPECT_FALSE(mean_article_jsd(cluster_term_stats(lonely)).has_value());
}

TEST(Vocabulary, InternIsStable) {
    Vocabulary v;
    EXPECT_EQ(v.intern("cell"), 0u);
    EXPECT_EQ(v.intern("grow"), 1u);
    EXPECT_EQ(v.intern("cell"), 0u);
    EXPECT_EQ(v.token(1), "grow");
    EXPECT_FALSE(v.find("x").has_value());
}
