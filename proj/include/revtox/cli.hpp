#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "revtox/cli_config.hpp"
#include "revtox/corpus.hpp"
#include "revtox/evaluation.hpp"
#include "revtox/model_io.hpp"

namespace revtox {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitInternal = 4;

namespace detail {

inline Hyperparams hyperparams_from(const RunConfig& cfg) {
    Hyperparams hp;
    hp.decision_threshold = cfg.threshold;
    hp.seed = cfg.seed;
    return hp;
}

inline int run_eval(const RunConfig& cfg, const LexiconSet& lexicon, std::ostream& out) {
    Dataset ds = load_dataset(cfg.data, cfg.text_column, cfg.label_column);
    EvalReport report = cross_validate(ds, cfg.algo, cfg.preprocess(), hyperparams_from(cfg),
                                       lexicon, cfg.folds, cfg.repeat, cfg.seed, cfg.min_df);
    std::string results_path = cfg.output + "/results_" + algorithm_name(cfg.algo) + ".csv";
    write_file_atomic(results_path, results_csv(report, cfg.timing));
    out << "wrote " << results_path << "\n";
    out << "mean accuracy " << report.mean.accuracy << ", mean toxic-class F1 "
        << report.mean.f1_1 << " over " << report.runs.size() << " runs\n";
    if (cfg.retro) {
        std::string retro_path = cfg.output + "/retro_" + algorithm_name(cfg.algo) + ".csv";
        retro_export(ds, report.first_repeat_predictions, retro_path);
        out << "wrote " << retro_path << "\n";
    }
    return kExitOk;
}

inline int run_retrain(const RunConfig& cfg, const LexiconSet& lexicon, std::ostream& out) {
    Dataset ds = load_dataset(cfg.data, cfg.text_column, cfg.label_column);
    PreprocessConfig pre = cfg.preprocess();

    std::vector<std::string> texts;
    std::vector<std::optional<int>> counts;
    std::vector<int> labels;
    texts.reserve(ds.size());
    counts.reserve(ds.size());
    labels.reserve(ds.size());
    for (const auto& c : ds.comments) {
        if (!c.label) throw DataError("retrain needs labeled comments");
        PipelineResult p = run_pipeline(c.text, pre, lexicon);
        texts.push_back(std::move(p.text));
        counts.push_back(pre.count_profanity ? p.profane_count : std::nullopt);
        labels.push_back(*c.label);
    }
    Vocabulary vocab = fit_vocabulary(texts, cfg.min_df);
    std::vector<FeatureVector> rows;
    rows.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i)
        rows.push_back(transform(texts[i], vocab, counts[i]));

    double t0 = steady_seconds();
    TrainedModel model = train(cfg.algo, rows, labels, hyperparams_from(cfg));
    model.meta.train_seconds = steady_seconds() - t0;
    model.vocab = std::move(vocab);
    model.preprocess = pre;
    save_model(model, cfg.model);
    out << "trained " << algorithm_name(cfg.algo) << " on " << ds.size() << " comments in "
        << model.meta.train_seconds << " s; wrote " << cfg.model << "\n";
    return kExitOk;
}

inline int run_tuning(const RunConfig& cfg, const LexiconSet& lexicon, std::ostream& out) {
    Dataset ds = load_dataset(cfg.data, cfg.text_column, cfg.label_column);
    auto entries = tuning_sweep(ds, cfg.algo, hyperparams_from(cfg), lexicon, cfg.folds,
                                cfg.repeat, cfg.seed, cfg.min_df);
    std::string path = cfg.output + "/tuning_" + algorithm_name(cfg.algo) + ".csv";
    write_file_atomic(path, sweep_csv(entries));
    out << "wrote " << path << "\n";
    const auto& best = entries.front();
    out << "best combination: profane-count=" << best.cfg.count_profanity
        << " kwrd-remove=" << best.cfg.remove_keywords
        << " id-split=" << best.cfg.split_identifiers << " (mean F1_1 "
        << best.report.mean.f1_1 << ", mean accuracy " << best.report.mean.accuracy << ")\n";
    return kExitOk;
}

inline int run_classify(const RunConfig& cfg, const LexiconSet& lexicon, std::istream& in,
                        std::ostream& out) {
    TrainedModel model = load_model(cfg.model);
    auto classify_stream = [&](std::istream& stream) {
        std::string line;
        while (std::getline(stream, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            Prediction p = classify_text(model, line, lexicon);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f", p.score);
            out << p.label << "\t" << buf << "\n";
        }
    };
    if (cfg.data.empty() || cfg.data == "-") {
        classify_stream(in);
    } else {
        std::ifstream file(cfg.data);
        if (!file) throw DataError("cannot open input file: " + cfg.data);
        classify_stream(file);
    }
    return kExitOk;
}

}  // namespace detail

/// Executes a parsed configuration. Returns the process exit code; all
/// diagnostics go to `err`.
inline int run(const RunConfig& cfg, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        LexiconSet lexicon = LexiconSet::load_dir(cfg.resolved_lexicon_dir());
        switch (cfg.mode) {
            case Mode::Eval: return detail::run_eval(cfg, lexicon, out);
            case Mode::Retrain: return detail::run_retrain(cfg, lexicon, out);
            case Mode::Tuning: return detail::run_tuning(cfg, lexicon, out);
            case Mode::Classify: return detail::run_classify(cfg, lexicon, in, out);
        }
        return kExitInternal;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace revtox
