#include <catch2/catch_amalgamated.hpp>

#include "revtox/model_io.hpp"
#include "revtox/rng.hpp"
#include "test_util.hpp"

using namespace revtox;

namespace {

struct Fixture {
    std::vector<std::string> texts;
    std::vector<int> labels;
    Vocabulary vocab;
    std::vector<FeatureVector> rows;
    std::vector<std::string> probes;

    Fixture() {
        SeededRng rng(404);
        std::vector<std::string> toxic_pool = {"shit", "crap", "stupid", "dumb"};
        std::vector<std::string> clean_pool = {"merge", "branch", "review", "test",
                                               "build", "clean", "quick", "ready"};
        auto sentence = [&](bool toxic) {
            std::string s;
            for (int w = 0; w < 6; ++w) {
                if (w) s += " ";
                s += clean_pool[rng.next_below(clean_pool.size())];
            }
            if (toxic) s += " " + toxic_pool[rng.next_below(toxic_pool.size())];
            return s;
        };
        for (int i = 0; i < 60; ++i) {
            bool toxic = i % 2 == 0;
            texts.push_back(sentence(toxic));
            labels.push_back(toxic ? 1 : 0);
        }
        vocab = fit_vocabulary(texts, 2);
        for (const auto& t : texts) rows.push_back(transform(t, vocab));
        for (int i = 0; i < 100; ++i) probes.push_back(sentence(rng.next_below(2) == 0));
    }
};

}  // namespace

TEST_CASE("save/load round-trip preserves predictions bit-exactly") {
    Fixture fx;
    Hyperparams hp;
    hp.seed = 1;
    hp.rf_n_trees = 20;
    hp.gbt_n_stages = 15;
    for (auto algo : {Algorithm::DT, Algorithm::LR, Algorithm::SVM, Algorithm::RF,
                      Algorithm::GBT}) {
        TrainedModel model = train(algo, fx.rows, fx.labels, hp);
        model.vocab = fx.vocab;
        model.preprocess = PreprocessConfig{};

        testutil::TempFile file(std::string("revtox_model_") + algorithm_name(algo) + ".bin");
        save_model(model, file.path());
        TrainedModel back = load_model(file.path());

        CHECK(back.algorithm == model.algorithm);
        CHECK(back.hyperparams == model.hyperparams);
        CHECK(back.preprocess == model.preprocess);
        CHECK(back.vocab == model.vocab);
        CHECK(back.input_dim == model.input_dim);
        for (const auto& text : fx.probes) {
            FeatureVector x = transform(text, model.vocab);
            Prediction a = predict(model, x);
            Prediction b = predict(back, x);
            CHECK(a.score == b.score);  // bit-exact
            CHECK(a.label == b.label);
        }
    }
}

TEST_CASE("serialized bytes are identical across runs with one seed") {
    Fixture fx;
    Hyperparams hp;
    hp.seed = 55;
    hp.rf_n_trees = 10;
    TrainedModel a = train(Algorithm::RF, fx.rows, fx.labels, hp);
    TrainedModel b = train(Algorithm::RF, fx.rows, fx.labels, hp);
    a.vocab = fx.vocab;
    b.vocab = fx.vocab;
    CHECK(serialize_model(a) == serialize_model(b));
}

TEST_CASE("load rejects a wrong magic header") {
    testutil::TempFile file("revtox_badmagic.bin",
                            std::string("NOTAMODL") + std::string(64, '\0'));
    CHECK_THROWS_WITH(load_model(file.path()),
                      Catch::Matchers::ContainsSubstring("magic"));
}

TEST_CASE("load rejects a future schema version, naming supported versions") {
    Fixture fx;
    Hyperparams hp;
    TrainedModel model = train(Algorithm::DT, fx.rows, fx.labels, hp);
    std::string bytes = serialize_model(model);
    bytes[8] = 2;  // bump the version field
    // checksum must stay consistent so only the version check fires
    std::uint32_t crc = revtox::detail::crc32(
        reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size() - 4);
    for (int i = 0; i < 4; ++i)
        bytes[bytes.size() - 4 + static_cast<std::size_t>(i)] =
            static_cast<char>((crc >> (8 * i)) & 0xff);
    testutil::TempFile file("revtox_future.bin", bytes);
    CHECK_THROWS_WITH(load_model(file.path()),
                      Catch::Matchers::ContainsSubstring("version 2") &&
                          Catch::Matchers::ContainsSubstring("supported: 1"));
}

TEST_CASE("load rejects corrupted bytes via the checksum") {
    Fixture fx;
    Hyperparams hp;
    TrainedModel model = train(Algorithm::LR, fx.rows, fx.labels, hp);
    std::string bytes = serialize_model(model);
    bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x40);
    testutil::TempFile file("revtox_corrupt.bin", bytes);
    CHECK_THROWS_WITH(load_model(file.path()),
                      Catch::Matchers::ContainsSubstring("checksum"));
}

TEST_CASE("missing model file raises a model error") {
    CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), ModelError);
}
