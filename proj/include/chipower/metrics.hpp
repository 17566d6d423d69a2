#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "chipower/error.hpp"

namespace coda {

// Area under the ROC curve, Mann-Whitney form: the fraction of
// (positive, negative) pairs where the positive scores higher, ties counting
// one half. Computed from midranks; exact half-integer arithmetic, so it
// agrees with brute-force pair enumeration bit for bit.
inline double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& y) {
    if (scores.size() != y.size()) throw data_error("auc: score/response length mismatch");
    const Eigen::Index n = scores.size();
    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw data_error("auc: response must be 0/1");
        if (y(i) == 1.0) ++n_pos;
    }
    const Eigen::Index n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw data_error("auc: both classes are required");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores(order[j + 1]) == scores(order[i])) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1); // 1-based tied-group midrank
        for (std::size_t k = i; k <= j; ++k)
            if (y(order[k]) == 1.0) rank_sum_pos += midrank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

struct ClassifierMetrics {
    double auc = std::numeric_limits<double>::quiet_NaN();
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double threshold = 0.5;
    Eigen::Index true_pos = 0, true_neg = 0, false_pos = 0, false_neg = 0;
};

// Confusion-matrix quantities at the given threshold (predict positive when
// score >= threshold), plus the AUC. A single-class response leaves the AUC
// as NaN; the threshold-based quantities are still defined.
inline ClassifierMetrics metrics(const Eigen::VectorXd& scores, const Eigen::VectorXd& y,
                                 double threshold = 0.5) {
    if (scores.size() != y.size()) throw data_error("metrics: score/response length mismatch");
    ClassifierMetrics m;
    m.threshold = threshold;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw data_error("metrics: response must be 0/1");
        const bool predicted = scores(i) >= threshold;
        if (y(i) == 1.0)
            predicted ? ++m.true_pos : ++m.false_neg;
        else
            predicted ? ++m.false_pos : ++m.true_neg;
    }
    const Eigen::Index n = scores.size();
    if (n == 0) throw data_error("metrics: empty input");
    m.accuracy = static_cast<double>(m.true_pos + m.true_neg) / static_cast<double>(n);
    const Eigen::Index pos = m.true_pos + m.false_neg;
    const Eigen::Index neg = m.true_neg + m.false_pos;
    m.sensitivity = pos > 0 ? static_cast<double>(m.true_pos) / static_cast<double>(pos) : 0.0;
    m.specificity = neg > 0 ? static_cast<double>(m.true_neg) / static_cast<double>(neg) : 0.0;
    if (pos > 0 && neg > 0) m.auc = auc(scores, y);
    return m;
}

} // namespace coda
