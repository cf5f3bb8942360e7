#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "revtox/linear.hpp"
#include "revtox/rng.hpp"
#include "revtox/tree.hpp"

namespace revtox {

/// Bootstrap-bagged CART forest with a random feature subset per split.
/// Each tree votes with its leaf majority; the forest score is the
/// fraction of trees voting class 1.
struct ForestModel {
    std::vector<Tree> trees;

    double score(const FeatureVector& x) const {
        if (trees.empty()) return 0.0;
        std::size_t votes = 0;
        for (const auto& tree : trees)
            if (tree.predict(x) >= 0.5) ++votes;
        return static_cast<double>(votes) / static_cast<double>(trees.size());
    }
};

struct ForestParams {
    std::uint32_t n_trees = 100;
    std::uint32_t min_samples_split = 5;
    std::uint32_t max_features = 0;  // 0 = floor(sqrt(dim))
    std::uint32_t max_depth = 0;
    bool bootstrap = true;
};

/// Trains the forest. Tree t draws its own rng seeded from (seed, t), so
/// results are identical no matter how many worker threads run.
inline ForestModel train_forest(const std::vector<FeatureVector>& rows,
                                const std::vector<int>& labels, std::uint32_t dim,
                                const ForestParams& params, std::uint64_t seed) {
    std::vector<double> targets(labels.begin(), labels.end());
    TreeParams tree_params;
    tree_params.min_samples_split = params.min_samples_split;
    tree_params.max_depth = params.max_depth;
    tree_params.max_features = params.max_features != 0
                                   ? params.max_features
                                   : static_cast<std::uint32_t>(std::sqrt(static_cast<double>(dim)));
    if (tree_params.max_features == 0) tree_params.max_features = 1;

    ForestModel forest;
    forest.trees.resize(params.n_trees);
    SparseColumns columns = SparseColumns::build(rows, dim);

    auto fit_tree = [&](std::uint32_t t) {
        SeededRng rng(derive_seed(seed, t));
        std::vector<std::uint32_t> sample_ids;
        std::uint32_t n = static_cast<std::uint32_t>(rows.size());
        sample_ids.reserve(n);
        if (params.bootstrap) {
            for (std::uint32_t i = 0; i < n; ++i)
                sample_ids.push_back(static_cast<std::uint32_t>(rng.next_below(n)));
        } else {
            for (std::uint32_t i = 0; i < n; ++i) sample_ids.push_back(i);
        }
        TreeBuilder builder(rows, targets, nullptr, dim, &columns);
        forest.trees[t] = builder.build(std::move(sample_ids), tree_params, rng);
    };

    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), params.n_trees);
    if (workers <= 1) {
        for (std::uint32_t t = 0; t < params.n_trees; ++t) fit_tree(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint32_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint32_t t = next.fetch_add(1); t < params.n_trees;
                     t = next.fetch_add(1))
                    fit_tree(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

/// Stagewise boosted regression trees on the logistic loss. Trees fit the
/// negative gradient (y - p) and leaves take the Newton step
/// sum(residual) / sum(p (1-p)); the score is the sigmoid of the staged sum.
struct GbtModel {
    double base_score = 0.0;  // prior log-odds
    double learning_rate = 0.1;
    std::vector<Tree> stages;

    double raw(const FeatureVector& x) const {
        double f = base_score;
        for (const auto& tree : stages) f += learning_rate * tree.predict(x);
        return f;
    }
    double score(const FeatureVector& x) const { return sigmoid(raw(x)); }
};

struct GbtParams {
    std::uint32_t n_stages = 100;
    double learning_rate = 0.1;
    std::uint32_t max_depth = 3;
    std::uint32_t early_stop_rounds = 5;  // 0 disables early stopping
    double validation_fraction = 0.1;
};

inline GbtModel train_gbt(const std::vector<FeatureVector>& rows, const std::vector<int>& labels,
                          std::uint32_t dim, const GbtParams& params, std::uint64_t seed) {
    std::uint32_t n = static_cast<std::uint32_t>(rows.size());

    // Stratified seeded carve-out used to monitor validation accuracy for
    // early stopping.
    std::vector<std::uint32_t> fit_ids, val_ids;
    if (params.early_stop_rounds > 0) {
        std::array<std::vector<std::uint32_t>, 2> by_class;
        for (std::uint32_t i = 0; i < n; ++i)
            by_class[static_cast<std::size_t>(labels[i])].push_back(i);
        SeededRng rng(derive_seed(seed, 0x6b5));
        for (auto& group : by_class) {
            fisher_yates(group, rng);
            auto take = static_cast<std::size_t>(
                params.validation_fraction * static_cast<double>(group.size()));
            for (std::size_t i = 0; i < group.size(); ++i)
                (i < take ? val_ids : fit_ids).push_back(group[i]);
        }
        std::sort(fit_ids.begin(), fit_ids.end());
        std::sort(val_ids.begin(), val_ids.end());
        if (val_ids.empty() || fit_ids.size() < 2) {
            fit_ids.resize(n);
            for (std::uint32_t i = 0; i < n; ++i) fit_ids[i] = i;
            val_ids.clear();
        }
    } else {
        fit_ids.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) fit_ids[i] = i;
    }

    double pos = 0.0;
    for (auto i : fit_ids) pos += labels[i];
    double p0 = pos / static_cast<double>(fit_ids.size());
    p0 = std::min(std::max(p0, 1e-9), 1.0 - 1e-9);

    GbtModel model;
    model.learning_rate = params.learning_rate;
    model.base_score = std::log(p0 / (1.0 - p0));

    std::vector<double> raw(n, model.base_score);
    std::vector<double> residuals(n, 0.0), hessians(n, 0.0);

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_split = 2;

    double best_val_acc = -1.0;
    std::uint32_t stages_since_improve = 0;
    SeededRng rng(derive_seed(seed, 0x9b7));
    SparseColumns columns = SparseColumns::build(rows, dim);

    for (std::uint32_t stage = 0; stage < params.n_stages; ++stage) {
        for (auto i : fit_ids) {
            double p = sigmoid(raw[i]);
            residuals[i] = static_cast<double>(labels[i]) - p;
            hessians[i] = std::max(p * (1.0 - p), 1e-12);
        }
        TreeBuilder builder(rows, residuals, &hessians, dim, &columns);
        Tree tree = builder.build(fit_ids, tree_params, rng);

        for (std::uint32_t i = 0; i < n; ++i)
            raw[i] += params.learning_rate * tree.predict(rows[i]);
        model.stages.push_back(std::move(tree));

        if (!val_ids.empty()) {
            std::size_t correct = 0;
            for (auto i : val_ids) {
                int pred = sigmoid(raw[i]) >= 0.5 ? 1 : 0;
                if (pred == labels[i]) ++correct;
            }
            double acc = static_cast<double>(correct) / static_cast<double>(val_ids.size());
            if (acc > best_val_acc) {
                best_val_acc = acc;
                stages_since_improve = 0;
            } else if (++stages_since_improve >= params.early_stop_rounds) {
                break;
            }
        }
    }
    return model;
}

}  // namespace revtox
