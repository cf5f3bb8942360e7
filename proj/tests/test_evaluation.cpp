#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "revtox/evaluation.hpp"
#include "test_util.hpp"

using namespace revtox;
using Catch::Matchers::WithinAbs;

namespace {

const LexiconSet& lex() { return testutil::lexicon(); }

Dataset synthetic() {
    static Dataset ds = load_dataset(testutil::data_dir() + "/synthetic_reviews.csv");
    return ds;
}

Clock zero_clock = [] { return 0.0; };

}  // namespace

TEST_CASE("confusion matrix hand counts") {
    ConfusionMatrix cm = confusion({1, 1, 0, 0}, {1, 0, 0, 1});
    CHECK(cm.tp == 1);
    CHECK(cm.fn == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 1);

    ConfusionMatrix perfect = confusion({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    CHECK_THROWS_AS(confusion({1, 0}, {1}), DataError);
}

TEST_CASE("metrics from the published best-model confusion counts") {
    // tp=3259 fn=483 fp=373 tn=15446; the ratios recomputed by hand are
    // P1 = 3259/3632 and R1 = 3259/3742
    ConfusionMatrix cm;
    cm.tp = 3259;
    cm.fn = 483;
    cm.fp = 373;
    cm.tn = 15446;
    MetricSet m = metrics(cm);
    CHECK_THAT(m.p1, WithinAbs(0.8973, 1e-4));
    CHECK_THAT(m.r1, WithinAbs(0.8709, 1e-4));
    CHECK_THAT(m.p1, WithinAbs(3259.0 / 3632.0, 1e-12));
    CHECK_THAT(m.r1, WithinAbs(3259.0 / 3742.0, 1e-12));
    CHECK_THAT(m.accuracy, WithinAbs((3259.0 + 15446.0) / 19561.0, 1e-12));
    CHECK_THAT(m.accuracy, WithinAbs(0.957, 0.01));
    // harmonic-mean identity
    CHECK_THAT(m.f1_1, WithinAbs(2.0 * m.p1 * m.r1 / (m.p1 + m.r1), 1e-12));
    CHECK_THAT(m.f1_0, WithinAbs(2.0 * m.p0 * m.r0 / (m.p0 + m.r0), 1e-12));
}

TEST_CASE("metric conventions on degenerate counts") {
    SECTION("perfect prediction") {
        ConfusionMatrix cm;
        cm.tp = 5;
        cm.tn = 10;
        MetricSet m = metrics(cm);
        CHECK(m.p1 == 1.0);
        CHECK(m.r1 == 1.0);
        CHECK(m.f1_1 == 1.0);
        CHECK(m.accuracy == 1.0);
    }
    SECTION("no positive predictions and no positives") {
        ConfusionMatrix cm;
        cm.tn = 7;
        cm.fn = 3;
        MetricSet m = metrics(cm);
        CHECK(m.p1 == 0.0);  // tp+fp = 0 -> convention
        CHECK(m.f1_1 == 0.0);
    }
    SECTION("empty matrix is an error") {
        CHECK_THROWS_AS(metrics(ConfusionMatrix{}), DataError);
    }
}

TEST_CASE("cross-validation separates the profanity-determined corpus") {
    PreprocessConfig cfg;
    cfg.count_profanity = true;
    Hyperparams hp;
    EvalReport report = cross_validate(synthetic(), Algorithm::RF, cfg, hp, lex(),
                                       10, 2, 11, 5, zero_clock);
    REQUIRE(report.runs.size() == 20);
    CHECK(report.mean.accuracy == 1.0);
    CHECK(report.mean.f1_1 == 1.0);
}

TEST_CASE("cross-validation is deterministic given the seed") {
    Hyperparams hp;
    hp.rf_n_trees = 15;
    EvalReport a = cross_validate(synthetic(), Algorithm::RF, {}, hp, lex(), 5, 2, 77, 5,
                                  zero_clock);
    EvalReport b = cross_validate(synthetic(), Algorithm::RF, {}, hp, lex(), 5, 2, 77, 5,
                                  zero_clock);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].m.accuracy == b.runs[i].m.accuracy);
        CHECK(a.runs[i].m.f1_1 == b.runs[i].m.f1_1);
    }
    CHECK(results_csv(a, false) == results_csv(b, false));
}

TEST_CASE("partition sequence is identical across algorithms") {
    // cross_validate derives every repeat's fold plan from
    // detail::fold_plan_seed(seed, r) alone, so two algorithms evaluated
    // with one seed see the same partitions; replaying the derivation
    // twice must give identical plans
    Dataset ds = synthetic();
    for (std::uint32_t r = 0; r < 3; ++r) {
        FoldPlan plan_a = stratified_folds(ds, 10, revtox::detail::fold_plan_seed(123, r));
        FoldPlan plan_b = stratified_folds(ds, 10, revtox::detail::fold_plan_seed(123, r));
        CHECK(plan_a.assignments == plan_b.assignments);
        FoldPlan next = stratified_folds(ds, 10, revtox::detail::fold_plan_seed(123, r + 1));
        CHECK(plan_a.assignments != next.assignments);
    }
}

TEST_CASE("report means equal recomputed means of the per-run list") {
    Hyperparams hp;
    hp.rf_n_trees = 10;
    EvalReport report = cross_validate(synthetic(), Algorithm::DT, {}, hp, lex(), 5, 3, 9, 5,
                                       zero_clock);
    REQUIRE(report.runs.size() == 15);
    double acc = 0.0, f1 = 0.0;
    for (const auto& r : report.runs) {
        acc += r.m.accuracy;
        f1 += r.m.f1_1;
    }
    CHECK_THAT(report.mean.accuracy, WithinAbs(acc / 15.0, 1e-12));
    CHECK_THAT(report.mean.f1_1, WithinAbs(f1 / 15.0, 1e-12));
}

TEST_CASE("vocabulary fitting never sees test-fold texts") {
    // plant a sentinel term in exactly one comment; whenever that comment
    // is in the test fold, the fitted vocabulary must not contain it
    Dataset ds = synthetic();
    ds.comments[17].text += " zzsentinelzz";
    PreprocessConfig cfg;
    for (std::uint32_t f = 0; f < 10; ++f) {
        FoldPlan plan = stratified_folds(ds, 10, 5);
        auto [train_ds, test_ds] = split_train_test(ds, plan, f);
        std::vector<std::string> corpus;
        for (const auto& c : train_ds.comments)
            corpus.push_back(run_pipeline(c.text, cfg, lex()).text);
        Vocabulary vocab = fit_vocabulary(corpus, 1);

        bool sentinel_in_train = false;
        for (const auto& c : train_ds.comments)
            if (c.text.find("zzsentinelzz") != std::string::npos) sentinel_in_train = true;
        CHECK(vocab.index.count("zzsentinelzz") == (sentinel_in_train ? 1u : 0u));

        // leakage guard: every retained term occurs in the training corpus
        for (std::size_t t = 0; t < vocab.size(); ++t) {
            std::uint64_t df = 0;
            for (const auto& doc : corpus) {
                auto tokens = tokenize(doc);
                if (std::find(tokens.begin(), tokens.end(), vocab.terms[t]) != tokens.end())
                    ++df;
            }
            CHECK(df == vocab.df[t]);
            CHECK(df > 0);
        }
    }
}

TEST_CASE("retro export lists false positives then false negatives") {
    Dataset ds;
    ds.comments = {{"a", "true negative", 0},
                   {"b", "false positive", 0},
                   {"c", "false negative", 1},
                   {"d", "true positive", 1},
                   {"e", "another fp", 0}};
    ds.recount();
    std::vector<Prediction> preds = {{0.1, 0}, {0.9, 1}, {0.2, 0}, {0.8, 1}, {0.7, 1}};

    testutil::TempFile file("revtox_retro.csv");
    retro_export(ds, preds, file.path());
    std::string content = read_file(file.path());
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        lines.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    REQUIRE(lines.size() == 4);  // header + 2 FP + 1 FN
    CHECK(lines[0] == "id,text,true_label,predicted_label,score");
    CHECK(lines[1].substr(0, 2) == "b,");
    CHECK(lines[2].substr(0, 2) == "e,");
    CHECK(lines[3].substr(0, 2) == "c,");
}

TEST_CASE("retro export with perfect predictions holds only the header") {
    Dataset ds;
    ds.comments = {{"a", "x", 0}, {"b", "y", 1}};
    ds.recount();
    std::vector<Prediction> preds = {{0.0, 0}, {1.0, 1}};
    testutil::TempFile file("revtox_retro_empty.csv");
    retro_export(ds, preds, file.path());
    CHECK(read_file(file.path()) == "id,text,true_label,predicted_label,score\n");
}

TEST_CASE("retro export rejects misaligned predictions") {
    Dataset ds;
    ds.comments = {{"a", "x", 0}};
    ds.recount();
    CHECK_THROWS_AS(retro_export(ds, {}, "/tmp/unused.csv"), DataError);
}

TEST_CASE("tuning sweep produces all eight combinations, ranked") {
    Hyperparams hp;
    hp.rf_n_trees = 20;
    auto entries = tuning_sweep(synthetic(), Algorithm::RF, hp, lex(), 5, 2, 21, 5,
                                zero_clock);
    REQUIRE(entries.size() == 8);
    std::set<int> combos;
    for (const auto& e : entries) {
        combos.insert((e.cfg.count_profanity ? 1 : 0) | (e.cfg.remove_keywords ? 2 : 0) |
                      (e.cfg.split_identifiers ? 4 : 0));
    }
    CHECK(combos.size() == 8);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        bool ordered =
            entries[i - 1].report.mean.f1_1 > entries[i].report.mean.f1_1 ||
            (entries[i - 1].report.mean.f1_1 == entries[i].report.mean.f1_1 &&
             entries[i - 1].report.mean.accuracy >= entries[i].report.mean.accuracy);
        CHECK(ordered);
    }
}

TEST_CASE("profane-count combinations win on a profanity-dominated corpus") {
    // corpus where only rare profane tokens carry signal: without the
    // count feature the term is below min_df, so the baseline misses it
    Dataset ds;
    SeededRng rng(3);
    std::vector<std::string> fillers = {"alpha", "beta", "gamma", "delta", "epsilon",
                                        "zeta",  "eta",  "theta", "iota",  "kappa"};
    std::vector<std::string> profane = {"fuck",  "shit",  "crap",   "dumb",  "stupid",
                                        "idiot", "moron", "bitch",  "loser", "jerk",
                                        "sucks", "damn",  "wanker", "twat",  "prick"};
    for (int i = 0; i < 120; ++i) {
        LabeledComment c;
        c.id = std::to_string(i);
        bool toxic = i % 2 == 0;
        std::string text;
        for (int w = 0; w < 6; ++w) {
            if (w) text += " ";
            text += fillers[rng.next_below(fillers.size())];
        }
        if (toxic) text += " " + profane[i / 2 % profane.size()];
        c.text = text;
        c.label = toxic ? 1 : 0;
        ds.comments.push_back(std::move(c));
    }
    ds.recount();

    Hyperparams hp;
    hp.rf_n_trees = 30;
    auto entries = tuning_sweep(ds, Algorithm::RF, hp, lex(), 5, 2, 33, 20, zero_clock);
    REQUIRE(entries.size() == 8);
    CHECK(entries.front().cfg.count_profanity);
    // every profane-count combination must beat every non-profane one
    double worst_with = 1.0, best_without = 0.0;
    for (const auto& e : entries) {
        if (e.cfg.count_profanity)
            worst_with = std::min(worst_with, e.report.mean.f1_1);
        else
            best_without = std::max(best_without, e.report.mean.f1_1);
    }
    CHECK(worst_with > best_without);
    for (const auto& e : entries) {
        if (e.cfg.count_profanity) {
            CHECK(e.significant);
            CHECK(e.p_value < 0.05);
        }
    }
}

TEST_CASE("keyword removal is not significant when labels ignore keywords") {
    // labels depend on a profane token; keywords appear uniformly at random
    Dataset ds;
    SeededRng rng(4);
    std::vector<std::string> fillers = {"merge", "branch", "review", "commit", "deploy"};
    std::vector<std::string> kw = {"static", "while", "return", "class", "import"};
    for (int i = 0; i < 100; ++i) {
        LabeledComment c;
        c.id = std::to_string(i);
        bool toxic = i % 2 == 0;
        std::string text = fillers[rng.next_below(fillers.size())];
        text += " " + kw[rng.next_below(kw.size())];
        text += " " + fillers[rng.next_below(fillers.size())];
        if (toxic) text += " crap";
        c.text = text;
        c.label = toxic ? 1 : 0;
        ds.comments.push_back(std::move(c));
    }
    ds.recount();

    Hyperparams hp;
    hp.rf_n_trees = 20;
    auto entries = tuning_sweep(ds, Algorithm::RF, hp, lex(), 5, 2, 5, 2, zero_clock);
    for (const auto& e : entries) {
        if (e.cfg.remove_keywords && !e.cfg.count_profanity && !e.cfg.split_identifiers)
            CHECK_FALSE(e.significant);
    }
}

TEST_CASE("results spreadsheet layout") {
    Hyperparams hp;
    hp.rf_n_trees = 5;
    EvalReport report = cross_validate(synthetic(), Algorithm::DT, {}, hp, lex(), 5, 1, 2, 5,
                                       zero_clock);
    std::string with_timing = results_csv(report, true);
    std::string without = results_csv(report, false);
    CHECK(with_timing.find("train_seconds") != std::string::npos);
    CHECK(without.find("train_seconds") == std::string::npos);
    CHECK(without.find("mean,") != std::string::npos);
    CHECK(without.find("stddev,") != std::string::npos);
    // 1 header + 5 runs + mean + stddev
    CHECK(std::count(without.begin(), without.end(), '\n') == 8);
}
