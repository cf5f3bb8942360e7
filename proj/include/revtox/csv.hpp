#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revtox/errors.hpp"

namespace revtox {

/// Comma-delimited reader. Quoted fields may contain commas, newlines and
/// doubled quotes. Accepts \n and \r\n line endings; a UTF-8 byte-order
/// mark at the start of the file is stripped.
class CsvReader {
public:
    explicit CsvReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw DataError("cannot open file: " + path);
        char bom[3] = {0, 0, 0};
        in_.read(bom, 3);
        if (!(in_.gcount() == 3 && bom[0] == '\xef' && bom[1] == '\xbb' && bom[2] == '\xbf')) {
            in_.clear();
            in_.seekg(0);
        }
    }

    /// Reads one record into `fields`. Returns false at end of input.
    /// line() afterwards reports the 1-based line the record started on.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        record_line_ = line_;
        std::string field;
        bool quoted = false;
        while (true) {
            if (c == EOF) {
                fields.push_back(std::move(field));
                if (quoted) throw DataError(path_ + ": unterminated quote at line " +
                                            std::to_string(record_line_));
                return true;
            }
            char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    int peek = in_.get();
                    if (peek == '"') {
                        field.push_back('"');
                    } else {
                        quoted = false;
                        c = peek;
                        continue;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
            } else if (ch == '"' && field.empty()) {
                quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (ch == '\r') {
                // swallow; handled with the following \n (or alone)
            } else if (ch == '\n') {
                ++line_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(ch);
            }
            c = in_.get();
        }
    }

    std::size_t line() const { return record_line_; }

private:
    std::ifstream in_;
    std::string path_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

inline std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += "\"";
    return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace revtox
