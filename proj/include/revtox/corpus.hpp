#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revtox/csv.hpp"
#include "revtox/errors.hpp"
#include "revtox/fsio.hpp"
#include "revtox/rng.hpp"

namespace revtox {

/// One review comment. `label` is absent for classification-only input.
struct LabeledComment {
    std::string id;
    std::string text;
    std::optional<int> label;  // 0 = non-toxic, 1 = toxic
};

struct Dataset {
    std::vector<LabeledComment> comments;
    std::array<std::size_t, 2> class_counts{0, 0};

    std::size_t size() const { return comments.size(); }

    void recount() {
        class_counts = {0, 0};
        for (const auto& c : comments)
            if (c.label) ++class_counts[static_cast<std::size_t>(*c.label)];
    }
};

/// Stratified fold assignment for one repetition of k-fold evaluation.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::uint32_t> assignments;  // fold index per comment
    std::uint64_t seed = 0;
};

inline constexpr const char* kDefaultTextColumn = "message";
inline constexpr const char* kDefaultLabelColumn = "is_toxic";

/// Loads a comma-delimited dataset with a header row. Row order is
/// preserved; ids default to the 1-based data row number when the file has
/// no "id" column. When `allow_missing_label_column` is set and the label
/// column is not in the header, the comments are loaded unlabeled.
inline Dataset load_dataset(const std::string& path,
                            const std::string& text_column = kDefaultTextColumn,
                            const std::string& label_column = kDefaultLabelColumn,
                            bool allow_missing_label_column = false) {
    CsvReader reader(path);
    std::vector<std::string> header;
    if (!reader.next(header)) throw DataError(path + ": empty dataset file");

    int text_idx = -1, label_idx = -1, id_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == text_column) text_idx = static_cast<int>(i);
        if (header[i] == label_column) label_idx = static_cast<int>(i);
        if (header[i] == "id") id_idx = static_cast<int>(i);
    }
    if (text_idx < 0)
        throw ConfigError(path + ": missing text column \"" + text_column + "\"");
    if (label_idx < 0 && !allow_missing_label_column)
        throw ConfigError(path + ": missing label column \"" + label_column + "\"");

    Dataset ds;
    std::vector<std::string> row;
    std::size_t row_number = 0;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;  // blank line
        ++row_number;
        if (row.size() <= static_cast<std::size_t>(text_idx))
            throw DataError(path + ": line " + std::to_string(reader.line()) +
                            ": too few fields");
        LabeledComment c;
        c.text = row[static_cast<std::size_t>(text_idx)];
        c.id = (id_idx >= 0 && static_cast<std::size_t>(id_idx) < row.size())
                   ? row[static_cast<std::size_t>(id_idx)]
                   : std::to_string(row_number);
        if (label_idx >= 0) {
            if (row.size() <= static_cast<std::size_t>(label_idx))
                throw DataError(path + ": line " + std::to_string(reader.line()) +
                                ": too few fields");
            const std::string& raw = row[static_cast<std::size_t>(label_idx)];
            if (raw == "0")
                c.label = 0;
            else if (raw == "1")
                c.label = 1;
            else
                throw DataError(path + ": line " + std::to_string(reader.line()) +
                                ": label \"" + raw + "\" is not 0 or 1");
        }
        ds.comments.push_back(std::move(c));
    }
    if (ds.comments.empty()) throw DataError(path + ": empty dataset file");
    ds.recount();
    return ds;
}

inline void save_dataset(const Dataset& ds, const std::string& path,
                         const std::string& text_column = kDefaultTextColumn,
                         const std::string& label_column = kDefaultLabelColumn) {
    std::string out = csv_row({"id", text_column, label_column});
    for (const auto& c : ds.comments) {
        out += csv_row({c.id, c.text, c.label ? std::to_string(*c.label) : std::string()});
    }
    write_file_atomic(path, out);
}

/// Deterministic stratified assignment: indices are grouped by class,
/// each group is Fisher-Yates shuffled with mt19937_64(seed ^ class mix),
/// then dealt round-robin into k folds. Per-fold class counts end up
/// within one of n_class / k.
inline FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2");
    std::array<std::vector<std::uint32_t>, 2> by_class;
    for (std::size_t i = 0; i < ds.comments.size(); ++i) {
        const auto& c = ds.comments[i];
        if (!c.label) throw DataError("cannot build folds over unlabeled comments");
        by_class[static_cast<std::size_t>(*c.label)].push_back(static_cast<std::uint32_t>(i));
    }
    for (int cls = 0; cls < 2; ++cls) {
        if (by_class[static_cast<std::size_t>(cls)].size() < k)
            throw DataError("class " + std::to_string(cls) + " has " +
                            std::to_string(by_class[static_cast<std::size_t>(cls)].size()) +
                            " members, fewer than k=" + std::to_string(k));
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(ds.comments.size(), 0);
    for (int cls = 0; cls < 2; ++cls) {
        auto& group = by_class[static_cast<std::size_t>(cls)];
        SeededRng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        fisher_yates(group, rng);
        for (std::size_t pos = 0; pos < group.size(); ++pos)
            plan.assignments[group[pos]] = static_cast<std::uint32_t>(pos % k);
    }
    return plan;
}

/// (train, test) partition for one fold. Original row order is preserved
/// within each side.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const FoldPlan& plan,
                                                    std::size_t test_fold) {
    if (test_fold >= plan.k)
        throw ConfigError("test fold " + std::to_string(test_fold) + " out of range [0, " +
                          std::to_string(plan.k) + ")");
    if (plan.assignments.size() != ds.comments.size())
        throw DataError("fold plan does not match dataset size");
    Dataset train, test;
    for (std::size_t i = 0; i < ds.comments.size(); ++i) {
        if (plan.assignments[i] == test_fold)
            test.comments.push_back(ds.comments[i]);
        else
            train.comments.push_back(ds.comments[i]);
    }
    train.recount();
    test.recount();
    return {std::move(train), std::move(test)};
}

}  // namespace revtox
