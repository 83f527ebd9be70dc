#pragma once

// Tokenization, term vectors and Jensen-Shannon divergence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace invcol::text {

class StopList {
public:
    StopList() = default;
    explicit StopList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    /// The bundled English list (function words plus common abstract boilerplate).
    static const StopList& defaults();
    /// One token per line; blank lines and '#' comments ignored; entries lowercased.
    static StopList load(const std::filesystem::path& path);

    bool contains(std::string_view token) const { return words_.contains(std::string(token)); }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Suffix normalizer standing in for lemmatization. Strips the longest of
/// "ing", "es", "ed", "ly", "s" that leaves a stem of at least three characters
/// ("s" is not stripped after another "s"), repeating until nothing applies.
std::string normalize_token(std::string_view token);

/// Concatenates title and abstract, lowercases ASCII, splits on characters that are
/// neither ASCII alphanumerics nor UTF-8 bytes, normalizes each token and drops
/// stop-words and tokens shorter than two bytes.
std::vector<std::string> normalize_text(std::optional<std::string_view> title,
                                        std::optional<std::string_view> abstract,
                                        const StopList& stop_list = StopList::defaults());

using TermId = std::uint32_t;

class Vocabulary {
public:
    TermId intern(std::string_view token);
    std::optional<TermId> find(std::string_view token) const;
    const std::string& token(TermId id) const { return tokens_[id]; }
    std::size_t size() const noexcept { return tokens_.size(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TermId> index_;
};

/// Sparse term counts sorted by term id; zero counts are never stored.
class TermVector {
public:
    TermVector() = default;
    /// Counts from a list of term ids (any order, repeats allowed).
    static TermVector from_terms(std::span<const TermId> terms);
    /// From (term, count) pairs; zero counts dropped, repeats summed.
    static TermVector from_counts(std::vector<std::pair<TermId, std::uint32_t>> counts);

    std::span<const std::pair<TermId, std::uint32_t>> entries() const { return entries_; }
    std::uint32_t count(TermId term) const;
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    friend bool operator==(const TermVector&, const TermVector&) = default;

private:
    std::vector<std::pair<TermId, std::uint32_t>> entries_;
    std::uint64_t total_ = 0;
};

TermVector sum(std::span<const TermVector> vectors);

/// Jensen-Shannon divergence (base-2 logs) between the distributions obtained by
/// normalizing each vector. Throws DomainError if either vector is empty.
double jsd(const TermVector& p, const TermVector& q);

struct ClusterTermStats {
    std::vector<TermVector> articles;
    TermVector cluster;
    std::size_t dropped_terms = 0;  // distinct terms occurring once in the whole cluster
};

/// Drops terms that occur exactly once across the cluster; the cluster vector is
/// the sum of the filtered article vectors.
ClusterTermStats cluster_term_stats(std::span<const TermVector> articles);

/// Mean JSD between each nonempty filtered article vector and the cluster vector.
/// Empty when no article keeps a term.
std::optional<double> mean_article_jsd(const ClusterTermStats& stats);

}  // namespace invcol::text
