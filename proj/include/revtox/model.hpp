#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "revtox/ensemble.hpp"
#include "revtox/errors.hpp"
#include "revtox/lexicon.hpp"
#include "revtox/linear.hpp"
#include "revtox/preprocess.hpp"
#include "revtox/tree.hpp"
#include "revtox/vectorizer.hpp"

namespace revtox {

enum class Algorithm : std::uint8_t { DT = 0, LR = 1, SVM = 2, RF = 3, GBT = 4 };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::DT: return "DT";
        case Algorithm::LR: return "LR";
        case Algorithm::SVM: return "SVM";
        case Algorithm::RF: return "RF";
        case Algorithm::GBT: return "GBT";
    }
    return "?";
}

inline std::optional<Algorithm> algorithm_from_name(std::string name) {
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (name == "DT") return Algorithm::DT;
    if (name == "LR") return Algorithm::LR;
    if (name == "SVM") return Algorithm::SVM;
    if (name == "RF") return Algorithm::RF;
    if (name == "GBT") return Algorithm::GBT;
    return std::nullopt;
}

struct Hyperparams {
    std::uint32_t rf_n_trees = 100;
    std::uint32_t rf_min_samples_split = 5;
    std::uint32_t rf_max_features = 0;  // 0 = floor(sqrt(dim))
    bool rf_bootstrap = true;           // test hook; off makes one tree match DT

    std::uint32_t gbt_n_stages = 100;
    double gbt_learning_rate = 0.1;
    std::uint32_t gbt_max_depth = 3;
    std::uint32_t gbt_early_stop_rounds = 5;

    double lr_l2_strength = 1.0;
    std::uint32_t lr_max_iters = 500;

    double svm_regularization = 1.0;
    std::uint32_t svm_max_iters = 1000;

    std::uint32_t dt_max_depth = 0;  // 0 = unbounded

    double decision_threshold = 0.5;
    std::uint64_t seed = 0;

    bool operator==(const Hyperparams&) const = default;

    void validate() const {
        if (rf_n_trees == 0 || gbt_n_stages == 0 || lr_max_iters == 0 || svm_max_iters == 0 ||
            rf_min_samples_split < 2 || gbt_max_depth == 0)
            throw ConfigError("hyperparameter counts must be positive");
        if (gbt_learning_rate <= 0.0 || lr_l2_strength < 0.0 || svm_regularization <= 0.0)
            throw ConfigError("hyperparameter rates must be positive");
        if (decision_threshold < 0.0 || decision_threshold > 1.0)
            throw ConfigError("decision threshold must lie in [0,1]");
    }
};

struct Prediction {
    double score = 0.0;  // class-1 likelihood in [0,1]
    int label = 0;       // 1 iff score >= threshold
};

struct TrainingMeta {
    double train_seconds = 0.0;
    std::uint64_t n_rows = 0;
    std::array<std::uint64_t, 2> class_counts{0, 0};

    bool operator==(const TrainingMeta&) const = default;
};

/// A fitted classifier bound to the vocabulary and preprocessing flags it
/// was trained with. Immutable after training; prediction is const and
/// thread-safe.
struct TrainedModel {
    Algorithm algorithm = Algorithm::RF;
    Hyperparams hyperparams;
    PreprocessConfig preprocess;
    Vocabulary vocab;
    TrainingMeta meta;
    std::uint32_t input_dim = 0;

    bool degenerate = false;      // single-class training data
    double constant_score = 0.0;  // score emitted when degenerate

    Tree tree;           // DT
    ForestModel forest;  // RF
    GbtModel gbt;        // GBT
    LinearModel linear;  // LR and SVM
};

/// Trains one of the five learners on already-vectorized rows. Labels must
/// be binary; single-class data yields a constant predictor and a warning
/// rather than an error.
inline TrainedModel train(Algorithm algorithm, const std::vector<FeatureVector>& rows,
                          const std::vector<int>& labels, const Hyperparams& hp) {
    hp.validate();
    if (rows.size() != labels.size()) throw DataError("feature/label count mismatch");
    if (rows.size() < 2) throw DataError("training needs at least two samples");
    std::uint32_t dim = rows.front().dim;
    for (const auto& row : rows)
        if (row.dim != dim) throw DataError("inconsistent feature dimensions in training data");

    TrainedModel model;
    model.algorithm = algorithm;
    model.hyperparams = hp;
    model.input_dim = dim;
    model.meta.n_rows = rows.size();
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
        ++model.meta.class_counts[static_cast<std::size_t>(y)];
    }

    if (model.meta.class_counts[0] == 0 || model.meta.class_counts[1] == 0) {
        std::cerr << "warning: training data has a single class; returning a constant predictor\n";
        model.degenerate = true;
        model.constant_score = model.meta.class_counts[1] > 0 ? 1.0 : 0.0;
        return model;
    }

    switch (algorithm) {
        case Algorithm::DT: {
            std::vector<double> targets(labels.begin(), labels.end());
            TreeParams params;
            params.max_depth = hp.dt_max_depth;
            params.min_samples_split = 2;
            params.max_features = 0;
            TreeBuilder builder(rows, targets, nullptr, dim);
            std::vector<std::uint32_t> ids(rows.size());
            for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
            SeededRng rng(derive_seed(hp.seed, 0xd7));
            model.tree = builder.build(std::move(ids), params, rng);
            break;
        }
        case Algorithm::RF: {
            ForestParams params;
            params.n_trees = hp.rf_n_trees;
            params.min_samples_split = hp.rf_min_samples_split;
            params.max_features = hp.rf_max_features;
            params.bootstrap = hp.rf_bootstrap;
            model.forest = train_forest(rows, labels, dim, params, hp.seed);
            break;
        }
        case Algorithm::GBT: {
            GbtParams params;
            params.n_stages = hp.gbt_n_stages;
            params.learning_rate = hp.gbt_learning_rate;
            params.max_depth = hp.gbt_max_depth;
            params.early_stop_rounds = hp.gbt_early_stop_rounds;
            model.gbt = train_gbt(rows, labels, dim, params, hp.seed);
            break;
        }
        case Algorithm::LR:
            model.linear = train_logistic(rows, labels, dim, hp.lr_l2_strength, hp.lr_max_iters);
            break;
        case Algorithm::SVM:
            model.linear = train_svm(rows, labels, dim, hp.svm_regularization, hp.svm_max_iters);
            break;
    }
    return model;
}

/// Scores one vector. DT: leaf class fraction; RF: fraction of trees voting
/// class 1; LR: sigmoid of the affine map; SVM: the margin mapped through
/// clamp(0.5 + margin/2, 0, 1), which keeps "score >= 0.5" equivalent to a
/// non-negative margin; GBT: sigmoid of the staged sum.
inline Prediction predict(const TrainedModel& model, const FeatureVector& x) {
    if (x.dim != model.input_dim)
        throw DataError("feature dimension " + std::to_string(x.dim) +
                        " does not match the model (" + std::to_string(model.input_dim) + ")");
    double score = 0.0;
    if (model.degenerate) {
        score = model.constant_score;
    } else {
        switch (model.algorithm) {
            case Algorithm::DT: score = model.tree.predict(x); break;
            case Algorithm::RF: score = model.forest.score(x); break;
            case Algorithm::GBT: score = model.gbt.score(x); break;
            case Algorithm::LR: score = sigmoid(model.linear.margin(x)); break;
            case Algorithm::SVM: {
                double margin = model.linear.margin(x);
                score = std::min(std::max(0.5 + margin / 2.0, 0.0), 1.0);
                break;
            }
        }
    }
    Prediction p;
    p.score = score;
    p.label = score >= model.hyperparams.decision_threshold ? 1 : 0;
    return p;
}

/// End-to-end classification of a raw comment: runs the preprocessing
/// pipeline with the model's own flags, vectorizes against the model's
/// vocabulary, and scores.
inline Prediction classify_text(const TrainedModel& model, const std::string& raw_text,
                                const LexiconSet& lexicon) {
    PipelineResult pre = run_pipeline(raw_text, model.preprocess, lexicon);
    FeatureVector x = transform(pre.text, model.vocab,
                                model.preprocess.count_profanity ? pre.profane_count
                                                                 : std::nullopt);
    return predict(model, x);
}

}  // namespace revtox
