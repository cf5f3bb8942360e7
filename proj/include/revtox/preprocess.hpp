#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "revtox/lexicon.hpp"

namespace revtox {

/// Switches for the optional preprocessing steps. The mandatory steps
/// (URL removal, contraction expansion, obfuscation normalization,
/// repetition collapse, symbol removal) always run.
struct PreprocessConfig {
    bool split_identifiers = false;
    bool remove_keywords = false;
    bool count_profanity = false;

    bool operator==(const PreprocessConfig&) const = default;
};

namespace detail {

inline bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
inline char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline std::string lower_copy(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = lower(c);
    return out;
}

inline bool matches_at(const std::string& text, std::size_t pos, const char* pat) {
    for (std::size_t i = 0; pat[i]; ++i) {
        if (pos + i >= text.size() || lower(text[pos + i]) != pat[i]) return false;
    }
    return true;
}

}  // namespace detail

/// Removes URLs: an http://, https:// or ftp:// scheme, or a token starting
/// with "www.", up to the next whitespace. Other text is left untouched.
inline std::string remove_urls(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        bool at_token_start = (i == 0) || detail::is_space(text[i - 1]);
        bool url = detail::matches_at(text, i, "http://") || detail::matches_at(text, i, "https://") ||
                   detail::matches_at(text, i, "ftp://") ||
                   (at_token_start && detail::matches_at(text, i, "www."));
        if (url) {
            while (i < text.size() && !detail::is_space(text[i])) ++i;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

/// Expands the 153 bundled contractions, matched case-insensitively on
/// whole apostrophe-words ("shouldn't" -> "should not").
inline std::string expand_contractions(const std::string& text, const LexiconSet& lex) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (detail::is_letter(c) || c == '\'') {
            std::size_t start = i;
            bool has_letter = false;
            while (i < text.size() && (detail::is_letter(text[i]) || text[i] == '\'')) {
                has_letter = has_letter || detail::is_letter(text[i]);
                ++i;
            }
            std::string token = text.substr(start, i - start);
            if (has_letter) {
                std::string key = detail::lower_copy(token);
                auto it = lex.contractions.find(key);
                if (it == lex.contractions.end()) {
                    // retry without enclosing quote marks ('word')
                    std::size_t b = 0, e = key.size();
                    while (b < e && key[b] == '\'') ++b;
                    while (e > b && key[e - 1] == '\'') --e;
                    auto trimmed = key.substr(b, e - b);
                    auto it2 = lex.contractions.find(trimmed);
                    if (it2 != lex.contractions.end()) {
                        out += key.substr(0, b);
                        out += it2->second;
                        out += key.substr(e);
                        continue;
                    }
                } else {
                    out += it->second;
                    continue;
                }
            }
            out += token;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

/// Replaces every character outside the retained set (ASCII letters,
/// digits, whitespace and . , ! ? ') with a single space.
inline std::string remove_symbols(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        bool keep = detail::is_letter(c) || detail::is_digit(c) || detail::is_space(c) ||
                    c == '.' || c == ',' || c == '!' || c == '?' || c == '\'';
        if (!keep) c = ' ';
    }
    return out;
}

namespace detail {

// Collapse letter runs in `word`. mode 0: every run to one letter;
// mode 1: runs of >=3 to one; mode 2: runs of >=3 to two.
inline std::string collapse_word(const std::string& word, int mode) {
    std::string out;
    std::size_t i = 0;
    while (i < word.size()) {
        std::size_t j = i;
        while (j < word.size() && lower(word[j]) == lower(word[i])) ++j;
        std::size_t run = j - i;
        std::size_t keep = run;
        if (mode == 0)
            keep = 1;
        else if (run >= 3)
            keep = (mode == 1) ? 1 : 2;
        out.append(word, i, keep);
        i = j;
    }
    return out;
}

}  // namespace detail

/// Collapses character repetitions used for emphasis or to disguise a word.
/// For a word with any letter repeated three or more times in a row, the
/// fully squeezed form is checked against the profanity list first
/// ("duumbbbb" -> "dumb"); otherwise runs of >=3 collapse to one letter when
/// that yields a known word ("looooooooser" -> "loser") and to two letters
/// when it does not. Runs of >=3 identical punctuation collapse to two
/// ("haha..." -> "haha..").
inline std::string collapse_repetitions(const std::string& text, const LexiconSet& lex) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (detail::is_letter(c)) {
            std::size_t start = i;
            bool has_triple = false;
            std::size_t run = 0;
            char prev = 0;
            while (i < text.size() && detail::is_letter(text[i])) {
                if (detail::lower(text[i]) == prev) {
                    if (++run >= 3) has_triple = true;
                } else {
                    prev = detail::lower(text[i]);
                    run = 1;
                }
                ++i;
            }
            std::string word = text.substr(start, i - start);
            if (!has_triple) {
                out += word;
            } else {
                std::string squeezed = detail::collapse_word(word, 0);
                std::string to_one = detail::collapse_word(word, 1);
                if (lex.is_profanity(detail::lower_copy(squeezed)))
                    out += squeezed;
                else if (lex.is_known_word(detail::lower_copy(to_one)))
                    out += to_one;
                else
                    out += detail::collapse_word(word, 2);
            }
        } else if (!detail::is_digit(c) && !detail::is_space(c)) {
            std::size_t start = i;
            while (i < text.size() && text[i] == c) ++i;
            std::size_t run = i - start;
            out.append(run >= 3 ? 2 : run, c);
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

namespace detail {

// Candidate letters an obfuscation symbol may stand for. '*' and '#' may
// also hide no letter at all (shi*tty -> shitty); that case is handled in
// find_deobfuscation.
inline const char* substitution_candidates(char c) {
    switch (c) {
        case '*': return "abcdefghijklmnopqrstuvwxyz";
        case '#': return "abcdefghijklmnopqrstuvwxyz";
        case '@': return "a";
        case '!': return "i";
        case '1': return "il";
        case '0': return "o";
        case '3': return "e";
        case '4': return "a";
        case '5': return "s";
        case '$': return "s";
        case '7': return "t";
        case '+': return "t";
        default: return nullptr;
    }
}

inline bool is_obfuscation_symbol(char c) { return substitution_candidates(c) != nullptr; }

// Depth-first candidate expansion; returns true and fills `match` with the
// first expansion found in the profanity list. Deterministic order.
inline bool find_deobfuscation(const std::string& token, std::size_t pos, std::string& acc,
                               const LexiconSet& lex, std::string& match, int& budget) {
    if (budget <= 0) return false;
    if (pos == token.size()) {
        --budget;
        if (lex.is_profanity(acc)) {
            match = acc;
            return true;
        }
        return false;
    }
    char c = lower(token[pos]);
    if (is_letter(c)) {
        acc.push_back(c);
        bool found = find_deobfuscation(token, pos + 1, acc, lex, match, budget);
        acc.pop_back();
        return found;
    }
    const char* cands = substitution_candidates(c);
    if (cands == nullptr) return false;
    for (const char* p = cands; *p; ++p) {
        acc.push_back(*p);
        if (find_deobfuscation(token, pos + 1, acc, lex, match, budget)) {
            acc.pop_back();
            return true;
        }
        acc.pop_back();
    }
    if (c == '*' || c == '#') {
        // the symbol may hide no letter at all
        if (find_deobfuscation(token, pos + 1, acc, lex, match, budget)) return true;
    }
    return false;
}

}  // namespace detail

/// Normalizes disguised profanities: symbol substitutions ("sh*t", "b!tch")
/// are resolved against the profanity list, and slang acronyms ("stfu")
/// are spelled out. Plain words never change.
inline std::string normalize_adversarial(const std::string& text, const LexiconSet& lex) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        bool token_char = detail::is_letter(c) || detail::is_digit(c) ||
                          detail::is_obfuscation_symbol(c);
        if (!token_char) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t start = i;
        bool has_letter = false, has_symbol = false, pure_letters = true;
        while (i < text.size() && (detail::is_letter(text[i]) || detail::is_digit(text[i]) ||
                                   detail::is_obfuscation_symbol(text[i]))) {
            if (detail::is_letter(text[i])) {
                has_letter = true;
            } else {
                pure_letters = false;
                if (detail::is_obfuscation_symbol(text[i])) has_symbol = true;
            }
            ++i;
        }
        std::string token = text.substr(start, i - start);
        if (pure_letters) {
            auto it = lex.acronyms.find(detail::lower_copy(token));
            if (it != lex.acronyms.end()) {
                out += it->second;
                continue;
            }
            out += token;
            continue;
        }
        if (has_letter && has_symbol) {
            std::string acc, match;
            int budget = 4096;
            if (detail::find_deobfuscation(token, 0, acc, lex, match, budget)) {
                out += match;
                continue;
            }
        }
        out += token;
    }
    return out;
}

/// Splits identifiers: each underscore becomes a space and a space is
/// inserted at every lowercase-to-uppercase boundary ("isCrap" ->
/// "is Crap", "is_shitty" -> "is shitty"). Digit boundaries do not split;
/// all-caps runs stay together.
inline std::string split_identifiers(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 8);
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '_') {
            out.push_back(' ');
            continue;
        }
        if (i > 0 && c >= 'A' && c <= 'Z' && text[i - 1] >= 'a' && text[i - 1] <= 'z')
            out.push_back(' ');
        out.push_back(c);
    }
    return out;
}

/// Removes whole-word, case-sensitive occurrences of the 90 programming
/// keywords. Occurrences inside longer words are kept.
inline std::string remove_keywords(const std::string& text, const LexiconSet& lex) {
    std::string out;
    out.reserve(text.size());
    auto is_word_char = [](char c) {
        return detail::is_letter(c) || detail::is_digit(c) || c == '_';
    };
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_word_char(text[i])) ++i;
        std::string token = text.substr(start, i - start);
        if (lex.keywords.count(token) == 0) out += token;
    }
    return out;
}

/// Counts whole-word profanity occurrences. Meant to run on text that has
/// already been through the mandatory steps, so obfuscations are counted
/// in their canonical spelling.
inline int count_profanities(const std::string& text, const LexiconSet& lex) {
    int count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!detail::is_letter(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && detail::is_letter(text[i])) ++i;
        std::string word = detail::lower_copy(text.substr(start, i - start));
        if (lex.is_profanity(word)) ++count;
    }
    return count;
}

struct PipelineResult {
    std::string text;
    std::optional<int> profane_count;
};

namespace detail {

inline std::string collapse_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace detail

/// Full preprocessing pipeline. Text is lowercased up front (every lexicon
/// is lowercase), then run through the mandatory steps in a fixed order:
/// URL removal, contraction expansion, obfuscation normalization (before
/// symbol removal, so "sh*t" is restored before '*' is stripped),
/// repetition collapse, symbol removal. Enabled optional steps follow, the
/// profane-word count is taken on the post-mandatory text, and whitespace
/// runs collapse to single spaces at the end.
inline PipelineResult run_pipeline(const std::string& text, const PreprocessConfig& cfg,
                                   const LexiconSet& lex) {
    std::string t = detail::lower_copy(text);
    t = remove_urls(t);
    t = expand_contractions(t, lex);
    t = normalize_adversarial(t, lex);
    t = collapse_repetitions(t, lex);
    t = remove_symbols(t);

    PipelineResult result;
    if (cfg.count_profanity) result.profane_count = count_profanities(t, lex);
    if (cfg.split_identifiers) t = split_identifiers(t);
    if (cfg.remove_keywords) t = remove_keywords(t, lex);
    result.text = detail::collapse_whitespace(t);
    return result;
}

}  // namespace revtox
