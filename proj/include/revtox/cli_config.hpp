#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revtox/errors.hpp"
#include "revtox/model.hpp"

namespace revtox {

enum class Mode { Eval, Retrain, Tuning, Classify };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Eval: return "eval";
        case Mode::Retrain: return "retrain";
        case Mode::Tuning: return "tuning";
        case Mode::Classify: return "classify";
    }
    return "?";
}

/// Parsed command-line configuration. A key=value config file (--config)
/// can pre-seed any option; explicit command-line flags win.
struct RunConfig {
    Mode mode = Mode::Eval;
    Algorithm algo = Algorithm::RF;
    std::uint32_t repeat = 5;
    std::string embed = "tfidf";
    bool split = false;
    bool keyword = false;
    bool profanity = false;
    bool retro = false;
    std::uint64_t seed = 42;
    std::string data;
    std::string model;
    std::string output = "results";
    std::uint32_t folds = 10;
    std::uint64_t min_df = 20;
    double threshold = 0.5;
    bool timing = true;
    std::string lexicon_dir;  // empty = REVTOX_DATA_DIR or "data"
    std::string text_column = "message";
    std::string label_column = "is_toxic";

    bool operator==(const RunConfig&) const = default;

    PreprocessConfig preprocess() const {
        PreprocessConfig cfg;
        cfg.split_identifiers = split;
        cfg.remove_keywords = keyword;
        cfg.count_profanity = profanity;
        return cfg;
    }

    std::string resolved_lexicon_dir() const {
        if (!lexicon_dir.empty()) return lexicon_dir;
        if (const char* env = std::getenv("REVTOX_DATA_DIR")) return env;
        return "data";
    }
};

/// Thrown when --help is requested; carries the rendered help text.
struct HelpRequested {
    std::string text;
};

namespace detail {

inline void build_cli(CLI::App& app, RunConfig& cfg, std::string& mode_str,
                      std::string& algo_str) {
    app.option_defaults()->ignore_case();
    app.set_config("--config", "", "key=value file pre-seeding any option (command line wins)");
    app.add_option("--mode", mode_str, "execution mode: eval, retrain, tuning or classify")
        ->default_str("eval");
    app.add_option("--algo", algo_str, "algorithm: DT, LR, SVM, RF or GBT")->default_str("RF");
    app.add_option("--repeat", cfg.repeat, "repetitions of the k-fold cross-validation")
        ->default_val(5u);
    app.add_option("--embed", cfg.embed, "text vectorizer (only tfidf is available)")
        ->default_str("tfidf");
    app.add_flag("--split", cfg.split, "optional step: split camelCase/under_score identifiers");
    app.add_flag("--keyword", cfg.keyword, "optional step: remove programming keywords");
    app.add_flag("--profanity", cfg.profanity,
                 "optional step: append the profane-word count feature");
    app.add_flag("--retro", cfg.retro, "export misclassified texts for manual diagnosis");
    app.add_option("--seed", cfg.seed, "seed for every random decision")->default_val(42ull);
    app.add_option("--data", cfg.data, "input dataset (CSV; classify mode: one text per line)");
    app.add_option("--model", cfg.model, "model file to write (retrain) or read (classify)");
    app.add_option("--output", cfg.output, "directory for result spreadsheets")
        ->default_str("results");
    app.add_option("--folds", cfg.folds, "number of cross-validation folds")->default_val(10u);
    app.add_option("--min-df", cfg.min_df,
                   "discard terms appearing in fewer than this many documents")
        ->default_val(20ull);
    app.add_option("--threshold", cfg.threshold, "decision threshold on the toxic score")
        ->default_val(0.5);
    app.add_flag("!--no-timing", cfg.timing,
                 "omit the training-time column so outputs are byte-reproducible");
    app.add_option("--lexicon-dir", cfg.lexicon_dir,
                   "directory with the bundled lexicon files (default: $REVTOX_DATA_DIR or data)");
    app.add_option("--text-column", cfg.text_column, "dataset column with the comment text")
        ->default_str("message");
    app.add_option("--label-column", cfg.label_column, "dataset column with the 0/1 label")
        ->default_str("is_toxic");
}

}  // namespace detail

/// Parses command-line arguments (argv[0] excluded). Throws ConfigError on
/// any invalid input and HelpRequested for --help.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::string mode_str = "eval";
    std::string algo_str = "RF";
    CLI::App app{"revtox - toxicity classifier for code review comments"};
    detail::build_cli(app, cfg, mode_str, algo_str);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    if (mode_str == "eval")
        cfg.mode = Mode::Eval;
    else if (mode_str == "retrain")
        cfg.mode = Mode::Retrain;
    else if (mode_str == "tuning")
        cfg.mode = Mode::Tuning;
    else if (mode_str == "classify")
        cfg.mode = Mode::Classify;
    else
        throw ConfigError("unknown mode \"" + mode_str +
                          "\" (expected eval, retrain, tuning or classify)");

    auto algo = algorithm_from_name(algo_str);
    if (!algo)
        throw ConfigError("unknown algorithm \"" + algo_str +
                          "\" (expected DT, LR, SVM, RF or GBT)");
    cfg.algo = *algo;

    if (cfg.embed != "tfidf")
        throw ConfigError("unsupported vectorizer \"" + cfg.embed +
                          "\": this build provides tfidf only");
    if (cfg.repeat == 0) throw ConfigError("--repeat must be positive");
    if (cfg.folds < 2) throw ConfigError("--folds must be at least 2");
    if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
        throw ConfigError("--threshold must lie in [0,1]");

    switch (cfg.mode) {
        case Mode::Eval:
        case Mode::Tuning:
            if (cfg.data.empty()) throw ConfigError("--data is required in this mode");
            break;
        case Mode::Retrain:
            if (cfg.data.empty()) throw ConfigError("--data is required in retrain mode");
            if (cfg.model.empty())
                throw ConfigError("--model (output path) is required in retrain mode");
            break;
        case Mode::Classify:
            if (cfg.model.empty()) throw ConfigError("--model is required in classify mode");
            break;
    }
    return cfg;
}

/// Canonical argv for a config; parse_args(render_args(cfg)) == cfg.
inline std::vector<std::string> render_args(const RunConfig& cfg) {
    std::vector<std::string> args;
    auto opt = [&](const char* name, const std::string& value) {
        args.emplace_back(name);
        args.push_back(value);
    };
    opt("--mode", mode_name(cfg.mode));
    opt("--algo", algorithm_name(cfg.algo));
    opt("--repeat", std::to_string(cfg.repeat));
    opt("--embed", cfg.embed);
    if (cfg.split) args.emplace_back("--split");
    if (cfg.keyword) args.emplace_back("--keyword");
    if (cfg.profanity) args.emplace_back("--profanity");
    if (cfg.retro) args.emplace_back("--retro");
    opt("--seed", std::to_string(cfg.seed));
    if (!cfg.data.empty()) opt("--data", cfg.data);
    if (!cfg.model.empty()) opt("--model", cfg.model);
    opt("--output", cfg.output);
    opt("--folds", std::to_string(cfg.folds));
    opt("--min-df", std::to_string(cfg.min_df));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", cfg.threshold);
    opt("--threshold", buf);
    if (!cfg.timing) args.emplace_back("--no-timing");
    if (!cfg.lexicon_dir.empty()) opt("--lexicon-dir", cfg.lexicon_dir);
    opt("--text-column", cfg.text_column);
    opt("--label-column", cfg.label_column);
    return args;
}

}  // namespace revtox
