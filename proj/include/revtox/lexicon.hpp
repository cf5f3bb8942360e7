#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "revtox/errors.hpp"

namespace revtox {

inline constexpr std::size_t kContractionCount = 153;
inline constexpr std::size_t kProfanityCount = 85;
inline constexpr std::size_t kKeywordCount = 90;

/// Bundled word resources: contraction expansions, the profane-word list
/// plus its obfuscation matchers (symbol substitutions and slang acronyms),
/// the programming-keyword list, and a small plain-English word list used
/// to confirm repetition collapses. Immutable after load and safe to share
/// across threads. All entries are lowercase.
class LexiconSet {
public:
    std::unordered_map<std::string, std::string> contractions;
    std::vector<std::string> profanities;  // sorted, unique
    std::unordered_set<std::string> profanity_set;
    std::unordered_map<std::string, std::string> acronyms;  // slang -> spelled-out form
    std::unordered_set<std::string> keywords;
    std::unordered_set<std::string> dictionary;

    bool is_profanity(const std::string& word) const {
        return profanity_set.count(word) != 0;
    }
    bool is_known_word(const std::string& word) const {
        return profanity_set.count(word) != 0 || dictionary.count(word) != 0;
    }

    /// Loads the five data files from `dir`. The contraction, profanity and
    /// keyword files must hold exactly 153, 85 and 90 entries; other sizes
    /// mean the resources are out of sync with the code and are rejected.
    static LexiconSet load_dir(const std::string& dir) {
        LexiconSet lex;
        for (auto& [key, value] : read_tsv(dir + "/contractions.tsv")) {
            if (!lex.contractions.emplace(key, value).second)
                throw DataError("duplicate contraction entry: " + key);
        }
        for (auto& word : read_lines(dir + "/profanities.txt")) {
            if (!lex.profanity_set.insert(word).second)
                throw DataError("duplicate profanity entry: " + word);
            lex.profanities.push_back(word);
        }
        std::sort(lex.profanities.begin(), lex.profanities.end());
        for (auto& word : read_lines(dir + "/keywords.txt")) {
            if (!lex.keywords.insert(word).second)
                throw DataError("duplicate keyword entry: " + word);
        }
        for (auto& [key, value] : read_tsv(dir + "/acronyms.tsv"))
            lex.acronyms.emplace(key, value);
        for (auto& word : read_lines(dir + "/wordlist.txt")) lex.dictionary.insert(word);

        check_count("contractions", lex.contractions.size(), kContractionCount);
        check_count("profanities", lex.profanities.size(), kProfanityCount);
        check_count("keywords", lex.keywords.size(), kKeywordCount);
        return lex;
    }

private:
    static void check_count(const char* what, std::size_t got, std::size_t want) {
        if (got != want)
            throw DataError(std::string(what) + ": expected " + std::to_string(want) +
                            " entries, found " + std::to_string(got));
    }

    static std::vector<std::string> read_lines(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open lexicon file: " + path);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) lines.push_back(line);
        }
        return lines;
    }

    static std::vector<std::pair<std::string, std::string>> read_tsv(const std::string& path) {
        std::vector<std::pair<std::string, std::string>> entries;
        for (auto& line : read_lines(path)) {
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw DataError(path + ": entry without a tab separator: " + line);
            entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
        return entries;
    }
};

}  // namespace revtox
