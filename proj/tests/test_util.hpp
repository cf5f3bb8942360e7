#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "revtox/lexicon.hpp"

namespace testutil {

inline std::string source_dir() { return REVTOX_SOURCE_DIR; }
inline std::string data_dir() { return source_dir() + "/data"; }

inline const revtox::LexiconSet& lexicon() {
    static revtox::LexiconSet lex = revtox::LexiconSet::load_dir(data_dir());
    return lex;
}

/// Scratch file removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& name, const std::string& content = "") {
        path_ = (std::filesystem::temp_directory_path() / name).string();
        if (!content.empty()) {
            std::ofstream out(path_, std::ios::binary);
            out << content;
        }
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace testutil
