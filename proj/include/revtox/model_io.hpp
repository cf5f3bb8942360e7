#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "revtox/fsio.hpp"
#include "revtox/model.hpp"

namespace revtox {

// Model files are a self-describing little-endian container:
//   magic "RVTXMDL\n", u32 schema version, algorithm + preprocess flags,
//   hyperparameters, vocabulary, training metadata, fitted parameters, and
//   a trailing CRC-32 over everything before it.
// The exact layout is documented in docs/model-format.md; it is stable
// within a schema version.
inline constexpr char kModelMagic[8] = {'R', 'V', 'T', 'X', 'M', 'D', 'L', '\n'};
inline constexpr std::uint32_t kModelSchemaVersion = 1;

namespace detail {

inline std::uint32_t crc32(const unsigned char* data, std::size_t size) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xffffffffu;
    for (std::size_t i = 0; i < size; ++i) crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(const char* data, std::size_t size) { buf_.append(data, size); }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(const std::string& data, std::size_t limit) : data_(data), limit_(limit) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        std::uint32_t len = u32();
        const char* p = take(len);
        return std::string(p, len);
    }
    std::size_t offset() const { return pos_; }

private:
    const char* take(std::size_t n) {
        if (pos_ + n > limit_) throw ModelError("model file truncated");
        const char* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    const std::string& data_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

inline void write_tree(ByteWriter& w, const Tree& tree) {
    w.u64(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.u32(n.left);
        w.u32(n.right);
        w.f64(n.value);
    }
}

inline Tree read_tree(ByteReader& r) {
    Tree tree;
    std::uint64_t count = r.u64();
    tree.nodes.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        TreeNode n;
        n.feature = r.i32();
        n.threshold = r.f64();
        n.left = r.u32();
        n.right = r.u32();
        n.value = r.f64();
        tree.nodes.push_back(n);
    }
    return tree;
}

}  // namespace detail

inline std::string serialize_model(const TrainedModel& m) {
    detail::ByteWriter w;
    w.raw(kModelMagic, sizeof(kModelMagic));
    w.u32(kModelSchemaVersion);
    w.u8(static_cast<std::uint8_t>(m.algorithm));
    std::uint8_t flags = 0;
    if (m.preprocess.split_identifiers) flags |= 1;
    if (m.preprocess.remove_keywords) flags |= 2;
    if (m.preprocess.count_profanity) flags |= 4;
    w.u8(flags);

    const Hyperparams& hp = m.hyperparams;
    w.u32(hp.rf_n_trees);
    w.u32(hp.rf_min_samples_split);
    w.u32(hp.rf_max_features);
    w.u8(hp.rf_bootstrap ? 1 : 0);
    w.u32(hp.gbt_n_stages);
    w.f64(hp.gbt_learning_rate);
    w.u32(hp.gbt_max_depth);
    w.u32(hp.gbt_early_stop_rounds);
    w.f64(hp.lr_l2_strength);
    w.u32(hp.lr_max_iters);
    w.f64(hp.svm_regularization);
    w.u32(hp.svm_max_iters);
    w.u32(hp.dt_max_depth);
    w.f64(hp.decision_threshold);
    w.u64(hp.seed);

    w.u64(m.vocab.n_docs);
    w.u64(m.vocab.min_df);
    w.u64(m.vocab.terms.size());
    for (const auto& t : m.vocab.terms) w.str(t);
    for (auto df : m.vocab.df) w.u64(df);
    for (auto idf : m.vocab.idf) w.f64(idf);

    w.f64(m.meta.train_seconds);
    w.u64(m.meta.n_rows);
    w.u64(m.meta.class_counts[0]);
    w.u64(m.meta.class_counts[1]);

    w.u32(m.input_dim);
    w.u8(m.degenerate ? 1 : 0);
    w.f64(m.constant_score);
    if (!m.degenerate) {
        switch (m.algorithm) {
            case Algorithm::DT: detail::write_tree(w, m.tree); break;
            case Algorithm::RF:
                w.u64(m.forest.trees.size());
                for (const auto& t : m.forest.trees) detail::write_tree(w, t);
                break;
            case Algorithm::GBT:
                w.f64(m.gbt.base_score);
                w.f64(m.gbt.learning_rate);
                w.u64(m.gbt.stages.size());
                for (const auto& t : m.gbt.stages) detail::write_tree(w, t);
                break;
            case Algorithm::LR:
            case Algorithm::SVM:
                w.u64(m.linear.weights.size());
                for (double v : m.linear.weights) w.f64(v);
                w.f64(m.linear.bias);
                break;
        }
    }

    std::uint32_t crc = detail::crc32(
        reinterpret_cast<const unsigned char*>(w.buffer().data()), w.buffer().size());
    w.u32(crc);
    return std::move(w.buffer());
}

inline TrainedModel deserialize_model(const std::string& bytes) {
    if (bytes.size() < sizeof(kModelMagic) + 8) throw ModelError("not a model file: too short");
    if (std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0)
        throw ModelError("not a model file: bad magic header");

    std::size_t body_size = bytes.size() - 4;
    std::uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i)
        stored_crc |= static_cast<std::uint32_t>(
                          static_cast<unsigned char>(bytes[body_size + static_cast<std::size_t>(i)]))
                      << (8 * i);
    std::uint32_t actual_crc =
        detail::crc32(reinterpret_cast<const unsigned char*>(bytes.data()), body_size);
    if (stored_crc != actual_crc) throw ModelError("model file corrupted: checksum mismatch");

    detail::ByteReader r(bytes, body_size);
    char magic[sizeof(kModelMagic)];
    for (std::size_t i = 0; i < sizeof(kModelMagic); ++i) magic[i] = static_cast<char>(r.u8());
    std::uint32_t version = r.u32();
    if (version != kModelSchemaVersion)
        throw ModelError("unsupported model schema version " + std::to_string(version) +
                         " (supported: " + std::to_string(kModelSchemaVersion) + ")");

    TrainedModel m;
    m.algorithm = static_cast<Algorithm>(r.u8());
    if (static_cast<std::uint8_t>(m.algorithm) > 4)
        throw ModelError("unknown algorithm tag in model file");
    std::uint8_t flags = r.u8();
    m.preprocess.split_identifiers = (flags & 1) != 0;
    m.preprocess.remove_keywords = (flags & 2) != 0;
    m.preprocess.count_profanity = (flags & 4) != 0;

    Hyperparams& hp = m.hyperparams;
    hp.rf_n_trees = r.u32();
    hp.rf_min_samples_split = r.u32();
    hp.rf_max_features = r.u32();
    hp.rf_bootstrap = r.u8() != 0;
    hp.gbt_n_stages = r.u32();
    hp.gbt_learning_rate = r.f64();
    hp.gbt_max_depth = r.u32();
    hp.gbt_early_stop_rounds = r.u32();
    hp.lr_l2_strength = r.f64();
    hp.lr_max_iters = r.u32();
    hp.svm_regularization = r.f64();
    hp.svm_max_iters = r.u32();
    hp.dt_max_depth = r.u32();
    hp.decision_threshold = r.f64();
    hp.seed = r.u64();

    m.vocab.n_docs = r.u64();
    m.vocab.min_df = r.u64();
    std::uint64_t n_terms = r.u64();
    m.vocab.terms.reserve(n_terms);
    for (std::uint64_t i = 0; i < n_terms; ++i) m.vocab.terms.push_back(r.str());
    m.vocab.df.reserve(n_terms);
    for (std::uint64_t i = 0; i < n_terms; ++i) m.vocab.df.push_back(r.u64());
    m.vocab.idf.reserve(n_terms);
    for (std::uint64_t i = 0; i < n_terms; ++i) m.vocab.idf.push_back(r.f64());
    m.vocab.rebuild_index();

    m.meta.train_seconds = r.f64();
    m.meta.n_rows = r.u64();
    m.meta.class_counts[0] = r.u64();
    m.meta.class_counts[1] = r.u64();

    m.input_dim = r.u32();
    m.degenerate = r.u8() != 0;
    m.constant_score = r.f64();
    if (!m.degenerate) {
        switch (m.algorithm) {
            case Algorithm::DT: m.tree = detail::read_tree(r); break;
            case Algorithm::RF: {
                std::uint64_t count = r.u64();
                m.forest.trees.reserve(count);
                for (std::uint64_t i = 0; i < count; ++i)
                    m.forest.trees.push_back(detail::read_tree(r));
                break;
            }
            case Algorithm::GBT: {
                m.gbt.base_score = r.f64();
                m.gbt.learning_rate = r.f64();
                std::uint64_t count = r.u64();
                m.gbt.stages.reserve(count);
                for (std::uint64_t i = 0; i < count; ++i)
                    m.gbt.stages.push_back(detail::read_tree(r));
                break;
            }
            case Algorithm::LR:
            case Algorithm::SVM: {
                std::uint64_t count = r.u64();
                m.linear.weights.reserve(count);
                for (std::uint64_t i = 0; i < count; ++i) m.linear.weights.push_back(r.f64());
                m.linear.bias = r.f64();
                break;
            }
        }
    }
    if (r.offset() != body_size) throw ModelError("model file has trailing garbage");
    return m;
}

inline void save_model(const TrainedModel& model, const std::string& path) {
    write_file_atomic(path, serialize_model(model));
}

inline TrainedModel load_model(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const DataError& e) {
        throw ModelError(e.what());
    }
    return deserialize_model(bytes);
}

}  // namespace revtox
