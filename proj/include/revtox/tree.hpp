#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "revtox/rng.hpp"
#include "revtox/vectorizer.hpp"

namespace revtox {

/// One node of a binary tree over sparse feature vectors. Samples with
/// x[feature] <= threshold go left. feature == -1 marks a leaf; `value` is
/// the class-1 fraction for classification trees and the fitted leaf step
/// for boosted regression trees.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const FeatureVector& x) const {
        std::uint32_t at = 0;
        while (nodes[at].feature >= 0) {
            double v = x.at(static_cast<std::uint32_t>(nodes[at].feature));
            at = (v <= nodes[at].threshold) ? nodes[at].left : nodes[at].right;
        }
        return nodes[at].value;
    }
};

struct TreeParams {
    std::uint32_t max_depth = 0;         // 0 = unbounded
    std::uint32_t min_samples_split = 2;
    std::uint32_t max_features = 0;      // 0 = all features
};

/// Column view of the training rows: per feature, the (row, value) pairs
/// sorted by value. Built once and shared by every tree of a forest or
/// boosting run, so node-level split search can walk one column instead of
/// re-gathering row by row.
struct SparseColumns {
    std::vector<std::vector<std::pair<double, std::uint32_t>>> cols;  // (value, row)

    static SparseColumns build(const std::vector<FeatureVector>& rows, std::uint32_t dim) {
        SparseColumns sc;
        sc.cols.resize(dim);
        for (std::uint32_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            for (std::size_t j = 0; j < row.indices.size(); ++j)
                sc.cols[row.indices[j]].emplace_back(row.values[j], r);
        }
        for (auto& col : sc.cols) std::sort(col.begin(), col.end());
        return sc;
    }
};

namespace detail {

struct SplitResult {
    bool found = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
};

// Work buffers reused across the nodes of one tree.
struct TreeScratch {
    std::vector<std::int32_t> slot_of_feature;  // feature -> candidate slot, -1 otherwise
    std::vector<std::vector<std::pair<double, double>>> slots;  // (value, target)
    std::vector<std::uint32_t> features;
    std::vector<std::uint32_t> feature_pool;  // persistent identity permutation
    std::vector<std::uint32_t> swap_log;
    std::vector<std::uint32_t> multiplicity;  // per-row count within the node
    std::vector<std::uint32_t> epoch;
    std::uint32_t current_epoch = 0;

    void ensure(std::uint32_t dim, std::size_t n_rows) {
        if (slot_of_feature.size() < dim) slot_of_feature.assign(dim, -1);
        if (feature_pool.size() != dim) {
            feature_pool.resize(dim);
            for (std::uint32_t f = 0; f < dim; ++f) feature_pool[f] = f;
        }
        if (multiplicity.size() < n_rows) {
            multiplicity.assign(n_rows, 0);
            epoch.assign(n_rows, 0);
        }
    }
};

// Weighted Gini impurity of a side holding `n` samples with `pos` class-1
// members, scaled by n (so sides add up without renormalizing).
inline double gini_side(double n, double pos) {
    if (n <= 0.0) return 0.0;
    double neg = n - pos;
    return n - (pos * pos + neg * neg) / n;
}

}  // namespace detail

/// CART builder. `targets` holds 0/1 labels for classification or gradient
/// residuals for regression; `hessians` is null for classification (counts
/// are used) and per-sample curvature for boosted trees, in which case leaf
/// values are the Newton step sum(g)/sum(h). Feature values must be
/// non-negative; absent entries are implicit zeros.
class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& rows, const std::vector<double>& targets,
                const std::vector<double>* hessians, std::uint32_t dim,
                const SparseColumns* columns = nullptr)
        : rows_(rows), targets_(targets), hessians_(hessians), dim_(dim), columns_(columns) {
        if (columns_ == nullptr) {
            owned_columns_ = SparseColumns::build(rows, dim);
            columns_ = &owned_columns_;
        }
        scratch_.ensure(dim_, rows.size());
    }

    Tree build(std::vector<std::uint32_t> sample_ids, const TreeParams& params, SeededRng& rng) {
        Tree tree;
        struct Pending {
            std::uint32_t node;
            std::vector<std::uint32_t> samples;
            std::uint32_t depth;
        };
        tree.nodes.emplace_back();
        std::vector<Pending> stack;
        stack.push_back({0, std::move(sample_ids), 0});

        while (!stack.empty()) {
            Pending item = std::move(stack.back());
            stack.pop_back();
            auto& samples = item.samples;

            double sum = 0.0;
            for (auto s : samples) sum += targets_[s];
            bool splittable = samples.size() >= params.min_samples_split &&
                              (params.max_depth == 0 || item.depth < params.max_depth);
            if (hessians_ == nullptr) {
                // classification: a pure node cannot improve
                if (sum == 0.0 || sum == static_cast<double>(samples.size())) splittable = false;
            }

            detail::SplitResult split;
            if (splittable) split = find_split(samples, sum, params, rng);

            if (!split.found) {
                tree.nodes[item.node].feature = -1;
                tree.nodes[item.node].value = leaf_value(samples, sum);
                continue;
            }

            std::vector<std::uint32_t> left, right;
            left.reserve(samples.size());
            right.reserve(samples.size());
            for (auto s : samples) {
                double v = rows_[s].at(static_cast<std::uint32_t>(split.feature));
                (v <= split.threshold ? left : right).push_back(s);
            }
            std::uint32_t left_id = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            std::uint32_t right_id = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[item.node];  // after any reallocation
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = right_id;
            // right pushed first so the left child is processed next (pinned
            // construction order keeps node ids reproducible)
            stack.push_back({right_id, std::move(right), item.depth + 1});
            stack.push_back({left_id, std::move(left), item.depth + 1});
        }
        return tree;
    }

private:
    double leaf_value(const std::vector<std::uint32_t>& samples, double sum) const {
        if (hessians_ == nullptr)
            return sum / static_cast<double>(samples.size());
        double hess = 0.0;
        for (auto s : samples) hess += (*hessians_)[s];
        if (hess < 1e-12) hess = 1e-12;
        return sum / hess;
    }

    // Draws `count` distinct features into scratch_.features (ascending) by
    // a partial Fisher-Yates over a persistent identity pool, undone
    // afterwards. The rng consumption is one bounded draw per slot.
    void sample_features(std::uint32_t count, SeededRng& rng) {
        auto& pool = scratch_.feature_pool;
        auto& log = scratch_.swap_log;
        auto& feats = scratch_.features;
        log.clear();
        for (std::uint32_t i = 0; i < count; ++i) {
            std::uint32_t j =
                i + static_cast<std::uint32_t>(rng.next_below(dim_ - i));
            std::swap(pool[i], pool[j]);
            log.push_back(j);
        }
        feats.assign(pool.begin(), pool.begin() + count);
        std::sort(feats.begin(), feats.end());
        for (std::uint32_t i = count; i-- > 0;) std::swap(pool[i], pool[log[i]]);
    }

    detail::SplitResult find_split(const std::vector<std::uint32_t>& samples, double sum,
                                   const TreeParams& params, SeededRng& rng) {
        auto& feats = scratch_.features;
        if (params.max_features == 0 || params.max_features >= dim_) {
            feats.resize(dim_);
            for (std::uint32_t f = 0; f < dim_; ++f) feats[f] = f;
        } else {
            sample_features(params.max_features, rng);
        }

        auto& slots = scratch_.slots;
        if (slots.size() < feats.size()) slots.resize(feats.size());
        for (std::size_t k = 0; k < feats.size(); ++k) slots[k].clear();

        // Either walk the pre-sorted columns of the selected features,
        // filtering by node membership, or gather row-wise over the node's
        // samples. Column entries arrive value-sorted; the row path must
        // sort afterwards, hence its factor of two.
        std::size_t column_cost = samples.size();
        for (auto f : feats) column_cost += (*columns_).cols[f].size();
        std::size_t row_cost = 0;
        for (auto s : samples) row_cost += rows_[s].indices.size();
        row_cost *= 2;

        bool presorted = false;
        if (column_cost < row_cost) {
            presorted = true;  // columns are sorted by value already
            auto& mult = scratch_.multiplicity;
            auto& epoch = scratch_.epoch;
            std::uint32_t cur = ++scratch_.current_epoch;
            for (auto s : samples) {
                if (epoch[s] != cur) {
                    epoch[s] = cur;
                    mult[s] = 0;
                }
                ++mult[s];
            }
            for (std::size_t k = 0; k < feats.size(); ++k) {
                auto& entries = slots[k];
                for (const auto& [value, row] : (*columns_).cols[feats[k]]) {
                    if (epoch[row] == cur)
                        entries.insert(entries.end(), mult[row], {value, targets_[row]});
                }
            }
        } else {
            auto& slot_of = scratch_.slot_of_feature;
            for (std::size_t k = 0; k < feats.size(); ++k)
                slot_of[feats[k]] = static_cast<std::int32_t>(k);
            for (auto s : samples) {
                const auto& row = rows_[s];
                for (std::size_t j = 0; j < row.indices.size(); ++j) {
                    std::int32_t slot = slot_of[row.indices[j]];
                    if (slot >= 0)
                        slots[static_cast<std::size_t>(slot)].emplace_back(row.values[j],
                                                                           targets_[s]);
                }
            }
            for (auto f : feats) slot_of[f] = -1;
        }

        double total_n = static_cast<double>(samples.size());
        double parent_score = impurity_score(total_n, sum);

        detail::SplitResult best;
        for (std::size_t k = 0; k < feats.size(); ++k)
            evaluate_feature(feats[k], slots[k], presorted, total_n, sum, parent_score, best);
        return best;
    }

    // For classification the score to maximize is the negated weighted Gini
    // impurity; for regression it is the variance-reduction surrogate
    // sum^2/n. Both make "children score - parent score" the split gain.
    double impurity_score(double n, double sum) const {
        if (hessians_ == nullptr) return -detail::gini_side(n, sum);
        return (sum * sum) / n;
    }

    void evaluate_feature(std::uint32_t feature, std::vector<std::pair<double, double>>& entries,
                          bool presorted, double total_n, double total_sum, double parent_score,
                          detail::SplitResult& best) {
        if (entries.empty()) return;  // feature is constant zero across the node
        if (!presorted) std::sort(entries.begin(), entries.end());

        double zero_n = total_n - static_cast<double>(entries.size());
        double zero_sum = total_sum;
        for (auto& [v, t] : entries) zero_sum -= t;

        // Walk candidate thresholds between adjacent distinct values, with
        // the implicit zero block leading the sorted order. Iterating
        // features ascending and accepting only strictly better scores pins
        // equal-gain ties to the lowest feature index and lowest threshold.
        double left_n = 0.0, left_sum = 0.0;
        double prev_value = 0.0;
        bool have_left = false;
        if (zero_n > 0.0) {
            left_n = zero_n;
            left_sum = zero_sum;
            prev_value = 0.0;
            have_left = true;
        }

        auto consider = [&](double next_value) {
            if (!have_left || left_n >= total_n) return;
            double threshold = prev_value + (next_value - prev_value) / 2.0;
            if (!(threshold > prev_value) || !(threshold < next_value)) return;
            double score = impurity_score(left_n, left_sum) +
                           impurity_score(total_n - left_n, total_sum - left_sum);
            if (score > parent_score + 1e-12 && score > best.score + 1e-12) {
                best.found = true;
                best.feature = static_cast<std::int32_t>(feature);
                best.threshold = threshold;
                best.score = score;
            }
        };

        std::size_t i = 0;
        while (i < entries.size()) {
            double v = entries[i].first;
            consider(v);
            while (i < entries.size() && entries[i].first == v) {
                left_n += 1.0;
                left_sum += entries[i].second;
                ++i;
            }
            prev_value = v;
            have_left = true;
        }
    }

    const std::vector<FeatureVector>& rows_;
    const std::vector<double>& targets_;
    const std::vector<double>* hessians_;
    std::uint32_t dim_;
    const SparseColumns* columns_;
    SparseColumns owned_columns_;
    detail::TreeScratch scratch_;
};

}  // namespace revtox
