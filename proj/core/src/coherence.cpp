#include "invcol/coherence.hpp"

#include "invcol/error.hpp"
#include "invcol/rng.hpp"
#include "io_util.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace invcol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Corpus Corpus::build(std::span<const PubRecord> records, const text::StopList& stop_list) {
    Corpus corpus;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<text::TermId> ids;
    for (const auto& r : records) {
        if (!r.has_text()) continue;
        if (corpus.index_.contains(r.pub_id)) {
            throw DomainError("duplicate pub_id '" + r.pub_id + "' in corpus");
        }
        const auto tokens = text::normalize_text(
            r.title ? std::optional<std::string_view>(*r.title) : std::nullopt,
            r.abstract ? std::optional<std::string_view>(*r.abstract) : std::nullopt, stop_list);
        ids.clear();
        h = fnv1a(h, r.pub_id);
        h = fnv1a(h, "\x1f");
        for (const auto& t : tokens) {
            ids.push_back(corpus.vocabulary_.intern(t));
            h = fnv1a(h, t);
            h = fnv1a(h, " ");
        }
        h = fnv1a(h, "\x1e");
        corpus.index_.emplace(r.pub_id, corpus.articles_.size());
        corpus.pub_ids_.push_back(r.pub_id);
        corpus.articles_.push_back(text::TermVector::from_terms(ids));
    }
    corpus.fingerprint_ = h;
    return corpus;
}

std::optional<std::size_t> Corpus::find(std::string_view pub_id) const {
    auto it = index_.find(std::string(pub_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> cluster_jsd(const Corpus& corpus, std::span<const std::size_t> articles) {
    std::vector<text::TermVector> vectors;
    vectors.reserve(articles.size());
    for (std::size_t i : articles) {
        if (i >= corpus.size()) throw DomainError("corpus index out of range");
        vectors.push_back(corpus.article(i));
    }
    return text::mean_article_jsd(text::cluster_term_stats(vectors));
}

BaselineEstimate jsd_random_baseline(const Corpus& corpus, std::size_t n, std::size_t reps,
                                     std::uint64_t seed) {
    if (n == 0) throw DomainError("baseline subset size must be >= 1");
    if (n > corpus.size()) {
        throw DomainError("baseline subset size " + std::to_string(n) + " exceeds corpus size " +
                          std::to_string(corpus.size()));
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
    std::vector<std::size_t> pool(corpus.size());
    std::vector<double> values;
    values.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(subset.begin(), subset.end());
        if (auto v = cluster_jsd(corpus, subset)) values.push_back(*v);
    }

    BaselineEstimate est;
    est.n = n;
    est.reps_used = values.size();
    if (values.empty()) {
        est.mean = est.stddev = est.std_error = kNaN;
        return est;
    }
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.mean) * (v - est.mean);
        est.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    est.std_error = est.stddev / std::sqrt(static_cast<double>(values.size()));
    return est;
}

BaselineEstimate BaselineCache::get(const Corpus& corpus, std::size_t n, std::size_t reps,
                                    std::uint64_t seed) {
    const Key key{corpus.fingerprint(), n, reps, seed};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    // Computed outside the lock; a concurrent duplicate computes the identical value.
    BaselineEstimate est = jsd_random_baseline(corpus, n, reps, seed);
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, est).first->second;
}

std::size_t BaselineCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::string_view to_string(CoherenceStatus status) {
    switch (status) {
        case CoherenceStatus::Ok: return "ok";
        case CoherenceStatus::TooSmall: return "too_small";
        case CoherenceStatus::Undefined: return "undefined";
    }
    return "unknown";
}

CoherenceResult coherence(ClusterId cluster_id, std::span<const std::string> members,
                          const Corpus& corpus, BaselineCache& cache,
                          const CoherenceSettings& settings) {
    CoherenceResult result;
    result.cluster_id = cluster_id;
    std::vector<std::size_t> articles;
    for (const auto& id : members) {
        if (auto i = corpus.find(id)) articles.push_back(*i);
    }
    std::sort(articles.begin(), articles.end());
    articles.erase(std::unique(articles.begin(), articles.end()), articles.end());
    result.n_used = articles.size();
    result.jsd_cluster = result.jsd_random = result.jsd_random_sd = result.coherence = kNaN;

    if (result.n_used <= settings.min_articles_exclusive) {
        result.status = CoherenceStatus::TooSmall;
        return result;
    }
    auto jsd_x = cluster_jsd(corpus, articles);
    if (!jsd_x) {
        result.status = CoherenceStatus::Undefined;
        return result;
    }
    result.jsd_cluster = *jsd_x;
    const BaselineEstimate base = cache.get(corpus, result.n_used, settings.reps, settings.seed);
    if (base.reps_used == 0) {
        result.status = CoherenceStatus::Undefined;
        return result;
    }
    result.jsd_random = base.mean;
    result.jsd_random_sd = base.stddev;
    result.coherence = base.mean - *jsd_x;
    result.status = CoherenceStatus::Ok;
    return result;
}

std::vector<CoherenceResult> coherence_table(const Clustering& clustering,
                                             const CitationGraph& graph, const Corpus& corpus,
                                             BaselineCache& cache,
                                             const CoherenceSettings& settings, unsigned threads) {
    std::vector<CoherenceResult> rows(clustering.size());
    detail::parallel_for(clustering.size(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::string> ids;
        for (std::size_t c = begin; c < end; ++c) {
            ids.clear();
            for (NodeId u : clustering.clusters[c]) ids.push_back(graph.id(u));
            rows[c] = coherence(c, ids, corpus, cache, settings);
        }
    });
    return rows;
}

void write_coherence_csv(std::span<const CoherenceResult> rows, const std::filesystem::path& path) {
    std::string out = "cluster_id,n_used,jsd_cluster,jsd_random,coherence\n";
    for (const auto& r : rows) {
        out += std::to_string(r.cluster_id) + ',' + std::to_string(r.n_used) + ',' +
               detail::format_fixed(r.jsd_cluster, 6) + ',' + detail::format_fixed(r.jsd_random, 6) +
               ',' + detail::format_fixed(r.coherence, 6) + '\n';
    }
    detail::write_file(path, out);
}

std::vector<CoherenceResult> read_coherence_csv(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    auto rows = detail::lines(text);
    if (rows.empty() || rows[0] != "cluster_id,n_used,jsd_cluster,jsd_random,coherence") {
        throw ParseError("'" + path.string() + "' is not a coherence CSV", 1);
    }
    auto value = [](std::string_view f, double& out) {
        if (f == "NA") {
            out = kNaN;
            return true;
        }
        return detail::parse_double(f, out);
    };
    std::vector<CoherenceResult> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        auto f = detail::split(rows[i], ',');
        CoherenceResult r;
        if (f.size() != 5 || !detail::parse_int(f[0], r.cluster_id) ||
            !detail::parse_int(f[1], r.n_used) || !value(f[2], r.jsd_cluster) ||
            !value(f[3], r.jsd_random) || !value(f[4], r.coherence)) {
            throw ParseError("malformed coherence row", i + 1);
        }
        r.status = std::isnan(r.coherence) ? CoherenceStatus::Undefined : CoherenceStatus::Ok;
        out.push_back(r);
    }
    return out;
}

}  // namespace invcol
