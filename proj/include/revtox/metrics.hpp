#pragma once

#include <cstdint>
#include <vector>

#include "revtox/errors.hpp"

namespace revtox {

/// Binary confusion counts with class 1 (toxic) as the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion: label lists differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            y_pred[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            y_pred[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

/// Per-class precision/recall/F1 plus accuracy. A precision or recall with
/// an empty denominator is 0 by convention, as is an F1 whose P + R is 0.
struct MetricSet {
    double p0 = 0, r0 = 0, f1_0 = 0;
    double p1 = 0, r1 = 0, f1_1 = 0;
    double accuracy = 0;
};

inline MetricSet metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("metrics: empty confusion matrix");
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    auto f1 = [](double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; };

    MetricSet m;
    double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
    double tn = static_cast<double>(cm.tn), fn = static_cast<double>(cm.fn);
    m.p1 = ratio(tp, tp + fp);
    m.r1 = ratio(tp, tp + fn);
    m.f1_1 = f1(m.p1, m.r1);
    m.p0 = ratio(tn, tn + fn);
    m.r0 = ratio(tn, tn + fp);
    m.f1_0 = f1(m.p0, m.r0);
    m.accuracy = (tp + tn) / static_cast<double>(cm.total());
    return m;
}

}  // namespace revtox
