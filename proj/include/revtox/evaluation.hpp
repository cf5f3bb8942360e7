#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "revtox/corpus.hpp"
#include "revtox/csv.hpp"
#include "revtox/metrics.hpp"
#include "revtox/model.hpp"
#include "revtox/stats.hpp"
#include "revtox/vectorizer.hpp"

namespace revtox {

/// Seconds-resolution clock used to time model training. Injectable so
/// tests and reproducibility checks can run with a fixed clock.
using Clock = std::function<double()>;

inline double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct RunRecord {
    std::uint32_t repeat = 0;
    std::uint32_t fold = 0;
    MetricSet m;
    double train_seconds = 0.0;
};

struct EvalReport {
    // configuration fingerprint
    Algorithm algorithm = Algorithm::RF;
    PreprocessConfig preprocess;
    std::uint64_t seed = 0;
    std::uint32_t k = 10;
    std::uint32_t repeats = 5;
    std::uint64_t min_df = kDefaultMinDf;

    std::vector<RunRecord> runs;  // k * repeats entries, ordered (repeat, fold)
    MetricSet mean, stddev;
    double mean_train_seconds = 0.0;

    // out-of-fold predictions from the first repeat, aligned with the
    // dataset; feeds the misclassification export
    std::vector<Prediction> first_repeat_predictions;

    std::vector<double> per_run(double MetricSet::* field) const {
        std::vector<double> xs;
        xs.reserve(runs.size());
        for (const auto& r : runs) xs.push_back(r.m.*field);
        return xs;
    }
};

namespace detail {

inline void aggregate(EvalReport& report) {
    auto fields = {&MetricSet::p0, &MetricSet::r0, &MetricSet::f1_0, &MetricSet::p1,
                   &MetricSet::r1, &MetricSet::f1_1, &MetricSet::accuracy};
    double n = static_cast<double>(report.runs.size());
    for (auto field : fields) {
        double mean = 0.0;
        for (const auto& r : report.runs) mean += r.m.*field;
        mean /= n;
        double ss = 0.0;
        for (const auto& r : report.runs) ss += (r.m.*field - mean) * (r.m.*field - mean);
        report.mean.*field = mean;
        report.stddev.*field = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    double t = 0.0;
    for (const auto& r : report.runs) t += r.train_seconds;
    report.mean_train_seconds = t / n;
}

// Seed scheme, pinned for reproducibility: the fold plan of repeat r uses
// derive_seed(seed, r) -- independent of the algorithm, so every algorithm
// sees the same partition sequence -- and the model trained on (r, f) uses
// derive_seed(seed, 1000003 * (r + 1) + f).
inline std::uint64_t fold_plan_seed(std::uint64_t seed, std::uint32_t repeat) {
    return derive_seed(seed, repeat);
}
inline std::uint64_t model_seed(std::uint64_t seed, std::uint32_t repeat, std::uint32_t fold) {
    return derive_seed(seed, 1000003ull * (repeat + 1ull) + fold);
}

}  // namespace detail

/// Repeated seeded stratified cross-validation. For every repeat and fold,
/// the vocabulary is fitted on the training partition only, the model is
/// trained there, and metrics are taken on the held-out fold.
inline EvalReport cross_validate(const Dataset& ds, Algorithm algorithm,
                                 const PreprocessConfig& cfg, const Hyperparams& hp,
                                 const LexiconSet& lexicon, std::uint32_t k = 10,
                                 std::uint32_t repeats = 5, std::uint64_t seed = 0,
                                 std::uint64_t min_df = kDefaultMinDf,
                                 const Clock& clock = steady_seconds) {
    EvalReport report;
    report.algorithm = algorithm;
    report.preprocess = cfg;
    report.seed = seed;
    report.k = k;
    report.repeats = repeats;
    report.min_df = min_df;

    const std::size_t n = ds.size();
    // preprocessing is pure per text, so run it once up front
    std::vector<std::string> texts(n);
    std::vector<std::optional<int>> counts(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!ds.comments[i].label) throw DataError("cross_validate needs labeled comments");
        labels[i] = *ds.comments[i].label;
        PipelineResult pre = run_pipeline(ds.comments[i].text, cfg, lexicon);
        texts[i] = std::move(pre.text);
        if (cfg.count_profanity) counts[i] = pre.profane_count;
    }

    report.first_repeat_predictions.resize(n);
    for (std::uint32_t r = 0; r < repeats; ++r) {
        FoldPlan plan = stratified_folds(ds, k, detail::fold_plan_seed(seed, r));
        for (std::uint32_t f = 0; f < k; ++f) {
            std::vector<std::uint32_t> train_ids, test_ids;
            for (std::uint32_t i = 0; i < n; ++i)
                (plan.assignments[i] == f ? test_ids : train_ids).push_back(i);

            std::vector<std::string> train_corpus;
            train_corpus.reserve(train_ids.size());
            for (auto i : train_ids) train_corpus.push_back(texts[i]);
            Vocabulary vocab = fit_vocabulary(train_corpus, min_df);

            std::vector<FeatureVector> x_train;
            std::vector<int> y_train;
            x_train.reserve(train_ids.size());
            y_train.reserve(train_ids.size());
            for (auto i : train_ids) {
                x_train.push_back(transform(texts[i], vocab, counts[i]));
                y_train.push_back(labels[i]);
            }

            Hyperparams run_hp = hp;
            run_hp.seed = detail::model_seed(seed, r, f);
            double t0 = clock();
            TrainedModel model = train(algorithm, x_train, y_train, run_hp);
            double train_seconds = clock() - t0;
            model.vocab = std::move(vocab);
            model.preprocess = cfg;

            std::vector<int> y_true, y_pred;
            y_true.reserve(test_ids.size());
            y_pred.reserve(test_ids.size());
            for (auto i : test_ids) {
                FeatureVector x = transform(texts[i], model.vocab, counts[i]);
                Prediction p = predict(model, x);
                y_true.push_back(labels[i]);
                y_pred.push_back(p.label);
                if (r == 0) report.first_repeat_predictions[i] = p;
            }

            RunRecord record;
            record.repeat = r;
            record.fold = f;
            record.m = metrics(confusion(y_true, y_pred));
            record.train_seconds = train_seconds;
            report.runs.push_back(record);
        }
    }
    detail::aggregate(report);
    return report;
}

namespace detail {

inline void append_metric_fields(std::vector<std::string>& row, const MetricSet& m) {
    char buf[32];
    for (double v : {m.p0, m.r0, m.f1_0, m.p1, m.r1, m.f1_1, m.accuracy}) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        row.emplace_back(buf);
    }
}

}  // namespace detail

/// Renders the per-run results spreadsheet: one row per (repeat, fold) with
/// the seven metrics, plus mean and stddev aggregate rows. The training-time
/// column is included only when `include_timing` is set, so reproducibility
/// checks can compare files byte for byte.
inline std::string results_csv(const EvalReport& report, bool include_timing = true) {
    std::vector<std::string> header = {"repeat", "fold",  "p0", "r0",      "f1_0",
                                       "p1",     "r1",    "f1_1", "accuracy"};
    if (include_timing) header.push_back("train_seconds");
    std::string out = csv_row(header);

    char buf[32];
    for (const auto& r : report.runs) {
        std::vector<std::string> row = {std::to_string(r.repeat), std::to_string(r.fold)};
        detail::append_metric_fields(row, r.m);
        if (include_timing) {
            std::snprintf(buf, sizeof(buf), "%.6f", r.train_seconds);
            row.emplace_back(buf);
        }
        out += csv_row(row);
    }

    std::vector<std::string> mean_row = {"mean", ""};
    detail::append_metric_fields(mean_row, report.mean);
    if (include_timing) {
        std::snprintf(buf, sizeof(buf), "%.6f", report.mean_train_seconds);
        mean_row.emplace_back(buf);
    }
    out += csv_row(mean_row);

    std::vector<std::string> sd_row = {"stddev", ""};
    detail::append_metric_fields(sd_row, report.stddev);
    if (include_timing) sd_row.emplace_back("");
    out += csv_row(sd_row);
    return out;
}

/// Writes every misclassified comment (id, text, true label, predicted
/// label, score), false positives first and false negatives after, each
/// group in dataset order. Predictions must align with the dataset rows.
inline void retro_export(const Dataset& ds, const std::vector<Prediction>& predictions,
                         const std::string& path) {
    if (predictions.size() != ds.size())
        throw DataError("retro_export: predictions do not align with the dataset");
    std::string out = csv_row({"id", "text", "true_label", "predicted_label", "score"});
    char buf[32];
    auto emit = [&](bool want_fp) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& c = ds.comments[i];
            if (!c.label) continue;
            const auto& p = predictions[i];
            bool is_fp = (*c.label == 0 && p.label == 1);
            bool is_fn = (*c.label == 1 && p.label == 0);
            if ((want_fp && !is_fp) || (!want_fp && !is_fn)) continue;
            std::snprintf(buf, sizeof(buf), "%.6f", p.score);
            out += csv_row({c.id, c.text, std::to_string(*c.label), std::to_string(p.label),
                            buf});
        }
    };
    emit(true);
    emit(false);
    write_file_atomic(path, out);
}

struct SweepEntry {
    PreprocessConfig cfg;
    EvalReport report;
    // paired t-test of per-run toxic-class F1 against the all-optional-off
    // baseline; significant when the mean improves and p < 0.05
    double p_value = 1.0;
    bool significant = false;
};

/// Evaluates all eight optional-preprocessing combinations and ranks them
/// by mean toxic-class F1, then mean accuracy. All combinations run with
/// the same seed, so per-run metrics pair up across configurations.
inline std::vector<SweepEntry> tuning_sweep(const Dataset& ds, Algorithm algorithm,
                                            const Hyperparams& hp, const LexiconSet& lexicon,
                                            std::uint32_t k = 10, std::uint32_t repeats = 5,
                                            std::uint64_t seed = 0,
                                            std::uint64_t min_df = kDefaultMinDf,
                                            const Clock& clock = steady_seconds) {
    std::vector<SweepEntry> entries;
    entries.reserve(8);
    for (std::uint32_t bits = 0; bits < 8; ++bits) {
        PreprocessConfig cfg;
        cfg.count_profanity = (bits & 1) != 0;
        cfg.remove_keywords = (bits & 2) != 0;
        cfg.split_identifiers = (bits & 4) != 0;
        SweepEntry entry;
        entry.cfg = cfg;
        entry.report = cross_validate(ds, algorithm, cfg, hp, lexicon, k, repeats, seed,
                                      min_df, clock);
        entries.push_back(std::move(entry));
    }

    const auto baseline_f1 = entries.front().report.per_run(&MetricSet::f1_1);
    for (auto& entry : entries) {
        if (entry.cfg == PreprocessConfig{}) continue;
        auto f1 = entry.report.per_run(&MetricSet::f1_1);
        auto test = stats::paired_t_test(f1, baseline_f1);
        entry.p_value = test.p;
        entry.significant = test.mean_difference > 0.0 && test.p < 0.05;
    }

    std::stable_sort(entries.begin(), entries.end(), [](const SweepEntry& a, const SweepEntry& b) {
        if (a.report.mean.f1_1 != b.report.mean.f1_1)
            return a.report.mean.f1_1 > b.report.mean.f1_1;
        return a.report.mean.accuracy > b.report.mean.accuracy;
    });
    return entries;
}

/// Spreadsheet for the tuning sweep: one row per combination, ranked.
inline std::string sweep_csv(const std::vector<SweepEntry>& entries) {
    std::string out = csv_row({"rank", "profane_count", "kwrd_remove", "id_split", "mean_f1_1",
                               "mean_accuracy", "p_value_vs_baseline", "significant"});
    char buf[32];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        std::vector<std::string> row;
        row.push_back(std::to_string(i + 1));
        row.push_back(e.cfg.count_profanity ? "1" : "0");
        row.push_back(e.cfg.remove_keywords ? "1" : "0");
        row.push_back(e.cfg.split_identifiers ? "1" : "0");
        std::snprintf(buf, sizeof(buf), "%.6f", e.report.mean.f1_1);
        row.emplace_back(buf);
        std::snprintf(buf, sizeof(buf), "%.6f", e.report.mean.accuracy);
        row.emplace_back(buf);
        std::snprintf(buf, sizeof(buf), "%.6f", e.p_value);
        row.emplace_back(buf);
        row.push_back(e.significant ? "1" : "0");
        out += csv_row(row);
    }
    return out;
}

}  // namespace revtox
