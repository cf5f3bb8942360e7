#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "revtox/model.hpp"
#include "revtox/rng.hpp"
#include "test_util.hpp"

using namespace revtox;
using Catch::Matchers::WithinAbs;

namespace {

FeatureVector vec(std::uint32_t dim, std::vector<std::pair<std::uint32_t, double>> entries) {
    FeatureVector fv;
    fv.dim = dim;
    for (auto& [i, v] : entries) {
        fv.indices.push_back(i);
        fv.values.push_back(v);
    }
    return fv;
}

// Random sparse rows whose label follows the sign-of-feature-0 rule plus a
// little structure on the other coordinates.
void make_separable(SeededRng& rng, std::uint32_t dim, std::size_t n,
                    std::vector<FeatureVector>& rows, std::vector<int>& labels) {
    rows.clear();
    labels.clear();
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(rng.next_below(2));
        FeatureVector fv;
        fv.dim = dim;
        if (label == 1) {
            fv.indices.push_back(0);
            fv.values.push_back(0.5 + rng.next_unit());
        }
        for (std::uint32_t f = 1; f < dim; ++f) {
            if (rng.next_unit() < 0.4) {
                fv.indices.push_back(f);
                fv.values.push_back(rng.next_unit());
            }
        }
        rows.push_back(std::move(fv));
        labels.push_back(label);
    }
}

}  // namespace

TEST_CASE("single-class training data yields a constant predictor") {
    std::vector<FeatureVector> rows = {vec(2, {{0, 1.0}}), vec(2, {{1, 1.0}})};
    std::vector<int> labels = {0, 0};
    Hyperparams hp;
    for (auto algo : {Algorithm::DT, Algorithm::LR, Algorithm::SVM, Algorithm::RF,
                      Algorithm::GBT}) {
        TrainedModel model = train(algo, rows, labels, hp);
        CHECK(model.degenerate);
        CHECK(predict(model, vec(2, {{0, 3.0}})).score == 0.0);
        CHECK(predict(model, vec(2, {})).label == 0);
    }
}

TEST_CASE("decision tree separates a linearly separable toy set in one split") {
    // class = sign of feature 1 (index 0): 6 samples, cleanly split
    std::vector<FeatureVector> rows = {
        vec(2, {{0, 1.0}}),          vec(2, {{0, 0.8}, {1, 0.3}}), vec(2, {{0, 1.2}}),
        vec(2, {{1, 0.5}}),          vec(2, {}),                   vec(2, {{1, 0.9}}),
    };
    std::vector<int> labels = {1, 1, 1, 0, 0, 0};
    Hyperparams hp;
    TrainedModel dt = train(Algorithm::DT, rows, labels, hp);
    REQUIRE(dt.tree.nodes.size() == 3);
    CHECK(dt.tree.nodes[0].feature == 0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(predict(dt, rows[i]).label == labels[i]);
}

TEST_CASE("training is deterministic under a fixed seed") {
    SeededRng rng(2024);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 12, 80, rows, labels);
    std::vector<FeatureVector> probes;
    std::vector<int> probe_labels;
    make_separable(rng, 12, 40, probes, probe_labels);

    Hyperparams hp;
    hp.seed = 99;
    hp.rf_n_trees = 25;
    hp.gbt_n_stages = 20;
    for (auto algo : {Algorithm::DT, Algorithm::LR, Algorithm::SVM, Algorithm::RF,
                      Algorithm::GBT}) {
        TrainedModel a = train(algo, rows, labels, hp);
        TrainedModel b = train(algo, rows, labels, hp);
        for (const auto& probe : probes) {
            CHECK(predict(a, probe).score == predict(b, probe).score);
        }
    }
}

TEST_CASE("random forest score is the fraction of trees voting toxic") {
    SeededRng rng(5);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 6, 60, rows, labels);
    Hyperparams hp;
    hp.rf_n_trees = 16;
    TrainedModel rf = train(Algorithm::RF, rows, labels, hp);
    REQUIRE(rf.forest.trees.size() == 16);
    for (const auto& probe : rows) {
        std::size_t votes = 0;
        for (const auto& tree : rf.forest.trees)
            if (tree.predict(probe) >= 0.5) ++votes;
        double expected = static_cast<double>(votes) / 16.0;
        CHECK(predict(rf, probe).score == expected);
    }
}

TEST_CASE("forest with one unbagged tree over all features equals the plain tree") {
    SeededRng rng(31);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 8, 70, rows, labels);

    Hyperparams hp;
    hp.seed = 17;
    hp.rf_n_trees = 1;
    hp.rf_bootstrap = false;
    hp.rf_max_features = 8;        // all features
    hp.rf_min_samples_split = 2;   // align with the plain tree's rule
    TrainedModel rf = train(Algorithm::RF, rows, labels, hp);
    TrainedModel dt = train(Algorithm::DT, rows, labels, hp);

    std::vector<FeatureVector> probes;
    std::vector<int> unused;
    make_separable(rng, 8, 50, probes, unused);
    for (const auto& probe : probes)
        CHECK(predict(rf, probe).label == predict(dt, probe).label);
}

TEST_CASE("logistic regression with zero weights scores one half") {
    TrainedModel lr;
    lr.algorithm = Algorithm::LR;
    lr.input_dim = 4;
    lr.linear.weights.assign(4, 0.0);
    lr.linear.bias = 0.0;
    CHECK(predict(lr, vec(4, {{2, 5.0}})).score == 0.5);
    CHECK(predict(lr, vec(4, {{2, 5.0}})).label == 1);  // score >= threshold goes toxic
}

TEST_CASE("logistic gradient matches central finite differences") {
    SeededRng rng(12);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 5, 30, rows, labels);
    double l2 = 1.0;

    LinearModel point;
    point.weights.resize(5);
    for (auto& w : point.weights) w = rng.next_unit() - 0.5;
    point.bias = rng.next_unit() - 0.5;

    std::vector<double> grad;
    double grad_b = logistic_gradient(rows, labels, point, l2, grad);

    const double h = 1e-6;
    for (std::size_t f = 0; f < 5; ++f) {
        LinearModel up = point, down = point;
        up.weights[f] += h;
        down.weights[f] -= h;
        double fd = (logistic_loss(rows, labels, up, l2) -
                     logistic_loss(rows, labels, down, l2)) /
                    (2.0 * h);
        double denom = std::max(std::fabs(fd), 1e-8);
        CHECK(std::fabs(grad[f] - fd) / denom < 1e-5);
    }
    LinearModel up = point, down = point;
    up.bias += h;
    down.bias -= h;
    double fd_b = (logistic_loss(rows, labels, up, l2) -
                   logistic_loss(rows, labels, down, l2)) /
                  (2.0 * h);
    CHECK(std::fabs(grad_b - fd_b) / std::max(std::fabs(fd_b), 1e-8) < 1e-5);
}

TEST_CASE("logistic regression fits a separable problem") {
    SeededRng rng(7);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 6, 120, rows, labels);
    Hyperparams hp;
    TrainedModel lr = train(Algorithm::LR, rows, labels, hp);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (predict(lr, rows[i]).label == labels[i]) ++correct;
    CHECK(correct >= 114);  // >= 95% training accuracy
}

TEST_CASE("svm labels follow the sign of the margin") {
    SeededRng rng(8);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 6, 120, rows, labels);
    Hyperparams hp;
    TrainedModel svm = train(Algorithm::SVM, rows, labels, hp);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Prediction p = predict(svm, rows[i]);
        double margin = svm.linear.margin(rows[i]);
        CHECK(p.label == (margin >= 0.0 ? 1 : 0));
        CHECK(p.score >= 0.0);
        CHECK(p.score <= 1.0);
        if (p.label == labels[i]) ++correct;
    }
    CHECK(correct >= 114);
}

TEST_CASE("gbt training loss is non-increasing before the early stop") {
    SeededRng rng(9);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 6, 80, rows, labels);

    GbtParams params;
    params.n_stages = 40;
    params.early_stop_rounds = 0;  // watch the pure boosting trajectory
    GbtModel model = train_gbt(rows, labels, 6, params, 3);

    // replay the staged raw scores and check the logistic loss monotonically
    std::vector<double> raw(rows.size(), model.base_score);
    auto loss_of = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double s = labels[i] == 1 ? 1.0 : -1.0;
            double z = -s * raw[i];
            loss += z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        }
        return loss / static_cast<double>(rows.size());
    };
    double prev = loss_of();
    for (const auto& stage : model.stages) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            raw[i] += model.learning_rate * stage.predict(rows[i]);
        double cur = loss_of();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("gbt stops early when validation accuracy stalls") {
    SeededRng rng(10);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 4, 200, rows, labels);
    Hyperparams hp;
    hp.gbt_n_stages = 100;
    hp.gbt_early_stop_rounds = 5;
    TrainedModel gbt = train(Algorithm::GBT, rows, labels, hp);
    // a separable set converges almost immediately, so the stage count
    // must land well under the cap
    CHECK(gbt.gbt.stages.size() < 100);
    CHECK(gbt.gbt.stages.size() >= 1);
}

TEST_CASE("prediction scores stay in [0,1] and match the threshold rule") {
    SeededRng rng(11);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    make_separable(rng, 6, 60, rows, labels);
    Hyperparams hp;
    hp.rf_n_trees = 10;
    hp.gbt_n_stages = 10;
    hp.decision_threshold = 0.3;
    for (auto algo : {Algorithm::DT, Algorithm::LR, Algorithm::SVM, Algorithm::RF,
                      Algorithm::GBT}) {
        TrainedModel model = train(algo, rows, labels, hp);
        for (const auto& probe : rows) {
            Prediction p = predict(model, probe);
            CHECK(p.score >= 0.0);
            CHECK(p.score <= 1.0);
            CHECK(p.label == (p.score >= 0.3 ? 1 : 0));
        }
    }
}

TEST_CASE("classify_text equals pipeline + transform + predict") {
    const auto& lex = testutil::lexicon();
    std::vector<std::string> raw = {
        "this code is total crap, rewrite it",
        "thank you for the information",
        "sh*t, the build broke again",
        "looks good, merging now",
        "you are duumbbbb",
        "clean patch, nice work",
    };
    std::vector<int> labels = {1, 0, 1, 0, 1, 0};
    PreprocessConfig cfg;
    cfg.count_profanity = true;

    std::vector<std::string> texts;
    std::vector<std::optional<int>> counts;
    for (const auto& r : raw) {
        auto pre = run_pipeline(r, cfg, lex);
        texts.push_back(pre.text);
        counts.push_back(pre.profane_count);
    }
    Vocabulary vocab = fit_vocabulary(texts, 1);
    std::vector<FeatureVector> rows;
    for (std::size_t i = 0; i < texts.size(); ++i)
        rows.push_back(transform(texts[i], vocab, counts[i]));

    Hyperparams hp;
    hp.rf_n_trees = 10;
    TrainedModel model = train(Algorithm::RF, rows, labels, hp);
    model.vocab = vocab;
    model.preprocess = cfg;

    for (const auto& r : raw) {
        auto pre = run_pipeline(r, cfg, lex);
        FeatureVector x = transform(pre.text, vocab, pre.profane_count);
        Prediction via_parts = predict(model, x);
        Prediction via_text = classify_text(model, r, lex);
        CHECK(via_text.score == via_parts.score);
        CHECK(via_text.label == via_parts.label);
    }
    CHECK(classify_text(model, "thank you for the information", lex).label == 0);
}

TEST_CASE("degenerate model classifies anything, including empty text, as its class") {
    const auto& lex = testutil::lexicon();
    std::vector<FeatureVector> rows = {vec(3, {{0, 1.0}}), vec(3, {{1, 1.0}})};
    TrainedModel model = train(Algorithm::RF, rows, {0, 0}, Hyperparams{});
    model.vocab = fit_vocabulary({"some words here", "more words"}, 1);
    model.input_dim = static_cast<std::uint32_t>(model.vocab.size());
    CHECK(classify_text(model, "", lex).label == 0);
    CHECK(classify_text(model, "anything at all", lex).score == 0.0);
}

TEST_CASE("train and predict reject malformed inputs") {
    std::vector<FeatureVector> rows = {vec(3, {{0, 1.0}}), vec(3, {{1, 1.0}})};
    std::vector<int> ok = {0, 1};
    Hyperparams hp;
    CHECK_THROWS_AS(train(Algorithm::DT, rows, {0}, hp), DataError);
    CHECK_THROWS_AS(train(Algorithm::DT, {rows[0]}, {0}, hp), DataError);
    std::vector<FeatureVector> ragged = {vec(3, {{0, 1.0}}), vec(4, {{1, 1.0}})};
    CHECK_THROWS_AS(train(Algorithm::DT, ragged, ok, hp), DataError);
    CHECK_THROWS_AS(train(Algorithm::DT, rows, {0, 2}, hp), DataError);

    TrainedModel model = train(Algorithm::DT, rows, ok, hp);
    CHECK_THROWS_AS(predict(model, vec(7, {})), DataError);

    Hyperparams bad;
    bad.decision_threshold = 1.5;
    CHECK_THROWS_AS(train(Algorithm::DT, rows, ok, bad), ConfigError);
}
