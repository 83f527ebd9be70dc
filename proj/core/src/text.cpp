#include "invcol/text.hpp"

#include "invcol/error.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace invcol::text {

namespace {

// English function words plus boilerplate that dominates biomedical abstracts.
constexpr std::array kDefaultStopWords = {
    "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an", "and", "any",
    "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between",
    "both", "but", "by", "can", "couldn", "d", "did", "didn", "do", "does", "doesn", "doing",
    "don", "down", "during", "each", "few", "for", "from", "further", "had", "hadn", "has",
    "hasn", "have", "haven", "having", "he", "her", "here", "hers", "herself", "him", "himself",
    "his", "how", "i", "if", "in", "into", "is", "isn", "it", "its", "itself", "just", "ll", "m",
    "ma", "me", "mightn", "more", "most", "mustn", "my", "myself", "needn", "no", "nor", "not",
    "now", "o", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "re", "s", "same", "shan", "she", "should", "shouldn", "so", "some",
    "such", "t", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there",
    "these", "they", "this", "those", "through", "to", "too", "under", "until", "up", "ve",
    "very", "was", "wasn", "we", "were", "weren", "what", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "won", "wouldn", "y", "you", "your", "yours",
    "yourself", "yourselves",
    // abstract boilerplate
    "also", "although", "among", "analysis", "approximately", "conclusion", "conclusions",
    "data", "et", "al", "however", "may", "method", "methods", "obtained", "observed",
    "paper", "performed", "present", "previously", "result", "results", "several", "show",
    "shown", "showed", "significant", "significantly", "studies", "study", "suggest",
    "thus", "two", "using", "used", "use", "various", "whereas", "within", "without"};

bool is_token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

constexpr std::array<std::string_view, 5> kSuffixes = {"ing", "es", "ed", "ly", "s"};
constexpr std::size_t kMinStem = 3;

}  // namespace

const StopList& StopList::defaults() {
    static const StopList list = [] {
        std::unordered_set<std::string> words;
        for (const char* w : kDefaultStopWords) words.emplace(w);
        return StopList(std::move(words));
    }();
    return list;
}

StopList StopList::load(const std::filesystem::path& path) {
    const std::string content = detail::read_file(path);
    std::unordered_set<std::string> words;
    for (std::string_view line : detail::lines(content)) {
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::string w(line);
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) {
            return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
        });
        words.insert(std::move(w));
    }
    return StopList(std::move(words));
}

std::string normalize_token(std::string_view token) {
    std::string t(token);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::string_view suffix : kSuffixes) {
            if (t.size() < suffix.size() + kMinStem || !t.ends_with(suffix)) continue;
            if (suffix == "s" && t[t.size() - 2] == 's') continue;
            t.resize(t.size() - suffix.size());
            changed = true;
            break;
        }
    }
    return t;
}

std::vector<std::string> normalize_text(std::optional<std::string_view> title,
                                        std::optional<std::string_view> abstract,
                                        const StopList& stop_list) {
    std::string joined;
    if (title) joined += *title;
    if (title && abstract) joined += ' ';
    if (abstract) joined += *abstract;

    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (!stop_list.contains(current)) {
            std::string normalized = normalize_token(current);
            if (normalized.size() >= 2 && !stop_list.contains(normalized)) {
                tokens.push_back(std::move(normalized));
            }
        }
        current.clear();
    };
    for (unsigned char c : joined) {
        if (is_token_byte(c)) {
            current += (c < 0x80) ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

TermId Vocabulary::intern(std::string_view token) {
    auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<TermId>(tokens_.size()));
    if (inserted) tokens_.emplace_back(token);
    return it->second;
}

std::optional<TermId> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TermVector TermVector::from_terms(std::span<const TermId> terms) {
    std::vector<TermId> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end());
    TermVector v;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        v.entries_.emplace_back(sorted[i], static_cast<std::uint32_t>(j - i));
        i = j;
    }
    v.total_ = sorted.size();
    return v;
}

TermVector TermVector::from_counts(std::vector<std::pair<TermId, std::uint32_t>> counts) {
    std::sort(counts.begin(), counts.end());
    TermVector v;
    for (const auto& [term, c] : counts) {
        if (c == 0) continue;
        if (!v.entries_.empty() && v.entries_.back().first == term) {
            v.entries_.back().second += c;
        } else {
            v.entries_.emplace_back(term, c);
        }
        v.total_ += c;
    }
    return v;
}

std::uint32_t TermVector::count(TermId term) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                               [](const auto& e, TermId t) { return e.first < t; });
    return (it != entries_.end() && it->first == term) ? it->second : 0;
}

TermVector sum(std::span<const TermVector> vectors) {
    std::vector<std::pair<TermId, std::uint32_t>> all;
    for (const auto& v : vectors) all.insert(all.end(), v.entries().begin(), v.entries().end());
    return TermVector::from_counts(std::move(all));
}

double jsd(const TermVector& p, const TermVector& q) {
    if (p.empty() || q.empty()) throw DomainError("jsd requires nonempty term vectors");
    const double tp = static_cast<double>(p.total());
    const double tq = static_cast<double>(q.total());
    auto pe = p.entries();
    auto qe = q.entries();
    double kl_p = 0.0;
    double kl_q = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < pe.size() || j < qe.size()) {
        double pi = 0.0;
        double qi = 0.0;
        if (j == qe.size() || (i < pe.size() && pe[i].first < qe[j].first)) {
            pi = pe[i++].second / tp;
        } else if (i == pe.size() || qe[j].first < pe[i].first) {
            qi = qe[j++].second / tq;
        } else {
            pi = pe[i++].second / tp;
            qi = qe[j++].second / tq;
        }
        const double mi = 0.5 * (pi + qi);
        if (pi > 0.0) kl_p += pi * std::log2(pi / mi);
        if (qi > 0.0) kl_q += qi * std::log2(qi / mi);
    }
    return 0.5 * kl_p + 0.5 * kl_q;
}

ClusterTermStats cluster_term_stats(std::span<const TermVector> articles) {
    ClusterTermStats stats;
    const TermVector raw = sum(articles);
    std::vector<TermId> singletons;
    for (const auto& [term, c] : raw.entries()) {
        if (c == 1) singletons.push_back(term);
    }
    stats.dropped_terms = singletons.size();
    stats.articles.reserve(articles.size());
    for (const auto& a : articles) {
        std::vector<std::pair<TermId, std::uint32_t>> kept;
        kept.reserve(a.size());
        for (const auto& e : a.entries()) {
            if (!std::binary_search(singletons.begin(), singletons.end(), e.first)) kept.push_back(e);
        }
        stats.articles.push_back(TermVector::from_counts(std::move(kept)));
    }
    stats.cluster = sum(stats.articles);
    return stats;
}

std::optional<double> mean_article_jsd(const ClusterTermStats& stats) {
    if (stats.cluster.empty()) return std::nullopt;
    double total = 0.0;
    std::size_t used = 0;
    for (const auto& a : stats.articles) {
        if (a.empty()) continue;
        total += jsd(a, stats.cluster);
        ++used;
    }
    if (used == 0) return std::nullopt;
    return total / static_cast<double>(used);
}

}  // namespace invcol::text
