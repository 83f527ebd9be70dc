#pragma once

// Textual coherence of article clusters against size-matched random baselines.

#include "invcol/clustering.hpp"
#include "invcol/graph.hpp"
#include "invcol/text.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace invcol {

/// Tokenized articles that have a title or an abstract.
class Corpus {
public:
    static Corpus build(std::span<const PubRecord> records,
                        const text::StopList& stop_list = text::StopList::defaults());

    std::size_t size() const noexcept { return articles_.size(); }
    const text::TermVector& article(std::size_t i) const { return articles_[i]; }
    const std::string& pub_id(std::size_t i) const { return pub_ids_[i]; }
    std::optional<std::size_t> find(std::string_view pub_id) const;
    const text::Vocabulary& vocabulary() const noexcept { return vocabulary_; }

    /// Digest of the tokenized content; identifies the corpus in baseline caches.
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

private:
    std::vector<text::TermVector> articles_;
    std::vector<std::string> pub_ids_;
    std::unordered_map<std::string, std::size_t> index_;
    text::Vocabulary vocabulary_;
    std::uint64_t fingerprint_ = 0;
};

/// Mean article-to-cluster JSD over the given corpus articles. Empty when no
/// term occurs more than once in the set.
std::optional<double> cluster_jsd(const Corpus& corpus, std::span<const std::size_t> articles);

struct BaselineEstimate {
    std::size_t n = 0;
    std::size_t reps_used = 0;
    double mean = 0.0;
    double stddev = 0.0;     // spread of single random-set values
    double std_error = 0.0;  // stddev / sqrt(reps_used)
};

/// Mean cluster_jsd over `reps` uniformly drawn n-subsets of the corpus.
/// Throws DomainError when n is 0 or exceeds the corpus size.
BaselineEstimate jsd_random_baseline(const Corpus& corpus, std::size_t n, std::size_t reps,
                                     std::uint64_t seed);

/// Thread-safe memo of baselines keyed by (corpus, n, reps, seed).
class BaselineCache {
public:
    BaselineEstimate get(const Corpus& corpus, std::size_t n, std::size_t reps, std::uint64_t seed);
    std::size_t size() const;

private:
    using Key = std::tuple<std::uint64_t, std::size_t, std::size_t, std::uint64_t>;
    mutable std::shared_mutex mutex_;
    std::map<Key, BaselineEstimate> entries_;
};

struct CoherenceSettings {
    std::size_t reps = 50;
    std::uint64_t seed = 1;
    // Clusters need strictly more than this many articles with text.
    std::size_t min_articles_exclusive = 10;
};

enum class CoherenceStatus { Ok, TooSmall, Undefined };

std::string_view to_string(CoherenceStatus status);

struct CoherenceResult {
    ClusterId cluster_id = 0;
    std::size_t n_used = 0;
    double jsd_cluster = 0.0;
    double jsd_random = 0.0;
    double jsd_random_sd = 0.0;
    double coherence = 0.0;  // jsd_random - jsd_cluster; larger is more coherent
    CoherenceStatus status = CoherenceStatus::Ok;
};

/// Coherence of a cluster given by publication ids; members without text are ignored.
CoherenceResult coherence(ClusterId cluster_id, std::span<const std::string> members,
                          const Corpus& corpus, BaselineCache& cache,
                          const CoherenceSettings& settings);

/// Coherence of every cluster of a clustering over `graph`, in cluster order.
std::vector<CoherenceResult> coherence_table(const Clustering& clustering,
                                             const CitationGraph& graph, const Corpus& corpus,
                                             BaselineCache& cache,
                                             const CoherenceSettings& settings,
                                             unsigned threads = 1);

/// CSV `cluster_id,n_used,jsd_cluster,jsd_random,coherence`; undefined values are NA.
void write_coherence_csv(std::span<const CoherenceResult> rows, const std::filesystem::path& path);
std::vector<CoherenceResult> read_coherence_csv(const std::filesystem::path& path);

}  // namespace invcol
