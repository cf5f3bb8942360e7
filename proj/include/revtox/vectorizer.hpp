#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "revtox/errors.hpp"

namespace revtox {

/// Whitespace tokenizer for preprocessed text. Leading and trailing
/// sentence punctuation (. , ! ? ') is stripped from each token; empty
/// tokens are dropped.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    auto is_punct = [](char c) {
        return c == '.' || c == ',' || c == '!' || c == '?' || c == '\'';
    };
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        std::size_t b = start, e = i;
        while (b < e && is_punct(text[b])) ++b;
        while (e > b && is_punct(text[e - 1])) --e;
        if (e > b) tokens.emplace_back(text.substr(b, e - b));
    }
    return tokens;
}

/// Fitted term space: retained terms with document frequencies and idf
/// weights idf(t) = ln(n_docs / df(t)). Terms are kept in lexicographic
/// order so the mapping is stable and serializable. Immutable after fit.
struct Vocabulary {
    std::vector<std::string> terms;  // sorted
    std::vector<std::uint64_t> df;
    std::vector<double> idf;
    std::uint64_t n_docs = 0;
    std::uint64_t min_df = 0;
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const { return terms.size(); }

    void rebuild_index() {
        index.clear();
        index.reserve(terms.size());
        for (std::uint32_t i = 0; i < terms.size(); ++i) index.emplace(terms[i], i);
    }

    bool operator==(const Vocabulary& other) const {
        return terms == other.terms && df == other.df && idf == other.idf &&
               n_docs == other.n_docs && min_df == other.min_df;
    }
};

/// Sparse tf-idf vector. `indices` are strictly increasing; zero weights
/// are not stored. When a profane-word count is attached it occupies one
/// extra dimension at index |terms|.
struct FeatureVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
    std::uint32_t dim = 0;

    double at(std::uint32_t feature) const {
        auto it = std::lower_bound(indices.begin(), indices.end(), feature);
        if (it == indices.end() || *it != feature) return 0.0;
        return values[static_cast<std::size_t>(it - indices.begin())];
    }
};

inline constexpr std::uint64_t kDefaultMinDf = 20;

/// Fits the term space over preprocessed documents; terms appearing in
/// fewer than `min_df` documents are discarded. An empty corpus is an
/// error; a min_df no term reaches yields an empty vocabulary and a
/// warning on stderr.
inline Vocabulary fit_vocabulary(const std::vector<std::string>& corpus,
                                 std::uint64_t min_df = kDefaultMinDf) {
    if (corpus.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
    std::map<std::string, std::uint64_t> doc_freq;
    std::vector<std::string> doc_terms;
    for (const auto& doc : corpus) {
        doc_terms = tokenize(doc);
        std::sort(doc_terms.begin(), doc_terms.end());
        doc_terms.erase(std::unique(doc_terms.begin(), doc_terms.end()), doc_terms.end());
        for (auto& t : doc_terms) ++doc_freq[t];
    }
    Vocabulary vocab;
    vocab.n_docs = corpus.size();
    vocab.min_df = min_df;
    for (auto& [term, df] : doc_freq) {
        if (df >= min_df) {
            vocab.terms.push_back(term);
            vocab.df.push_back(df);
            vocab.idf.push_back(std::log(static_cast<double>(vocab.n_docs) /
                                         static_cast<double>(df)));
        }
    }
    if (vocab.terms.empty() && min_df > corpus.size())
        std::cerr << "warning: min_df " << min_df << " exceeds the corpus size "
                  << corpus.size() << "; the vocabulary is empty\n";
    vocab.rebuild_index();
    return vocab;
}

/// Maps a preprocessed text to its tf-idf vector:
/// weight(t) = [count(t) / total tokens] * idf(t). Out-of-vocabulary
/// tokens still count toward the token total but produce no dimension.
/// A supplied profane count is appended as the final dimension.
inline FeatureVector transform(const std::string& text, const Vocabulary& vocab,
                               std::optional<int> profane_count = std::nullopt) {
    FeatureVector fv;
    fv.dim = static_cast<std::uint32_t>(vocab.size()) + (profane_count ? 1u : 0u);
    auto tokens = tokenize(text);
    if (!tokens.empty()) {
        std::unordered_map<std::uint32_t, std::uint32_t> counts;
        for (const auto& tok : tokens) {
            auto it = vocab.index.find(tok);
            if (it != vocab.index.end()) ++counts[it->second];
        }
        std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted(counts.begin(), counts.end());
        std::sort(sorted.begin(), sorted.end());
        double total = static_cast<double>(tokens.size());
        for (auto& [term_idx, count] : sorted) {
            double weight = (static_cast<double>(count) / total) * vocab.idf[term_idx];
            if (weight != 0.0) {
                fv.indices.push_back(term_idx);
                fv.values.push_back(weight);
            }
        }
    }
    if (profane_count && *profane_count != 0) {
        fv.indices.push_back(static_cast<std::uint32_t>(vocab.size()));
        fv.values.push_back(static_cast<double>(*profane_count));
    }
    return fv;
}

}  // namespace revtox
