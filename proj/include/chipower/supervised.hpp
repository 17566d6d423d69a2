#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/diagnostics.hpp"
#include "chipower/error.hpp"
#include "chipower/logistic.hpp"
#include "chipower/metrics.hpp"
#include "chipower/rng.hpp"
#include "chipower/sampling.hpp"
#include "chipower/transforms.hpp"

namespace coda {

struct CvResult {
    int k = 0;
    std::uint64_t seed = 0;
    double lambda = 1.0;
    std::vector<int> fold_assignment; // length n, fold id per sample
    std::vector<ClassifierMetrics> per_fold;
    std::vector<std::vector<Eigen::Index>> per_fold_selected;
    double mean_auc = 0.0;
    double mean_accuracy = 0.0;
};

// Seeded stratified fold assignment: each class is shuffled and dealt
// round-robin, the second class continuing where the first stopped, so fold
// sizes differ by at most one overall and per class.
inline std::vector<int> stratified_folds(const Eigen::VectorXd& y, int k, std::uint64_t seed) {
    if (k < 2) throw data_error("cross-validation needs k >= 2, got " + std::to_string(k));
    const Eigen::Index n = y.size();
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < n; ++i) (y(i) == 1.0 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw data_error("stratified folds require both classes");
    if (static_cast<int>(pos.size()) < k || static_cast<int>(neg.size()) < k)
        throw data_error("fold too small: k = " + std::to_string(k) +
                         " exceeds the size of the minority class");

    const auto shuffle = [](std::vector<Eigen::Index>& v, SeededRng rng) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[static_cast<std::size_t>(rng.next_below(i))]);
    };
    shuffle(pos, SeededRng::derive(seed, 1, 0));
    shuffle(neg, SeededRng::derive(seed, 0, 0));

    std::vector<int> fold(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (Eigen::Index i : pos) fold[static_cast<std::size_t>(i)] = next++ % k;
    for (Eigen::Index i : neg) fold[static_cast<std::size_t>(i)] = next++ % k;
    return fold;
}

// Stratified k-fold cross-validation of the power-tuned stepwise model:
// per fold, the predictors are the lambda-powered closed compositions, the
// model is selected by stepwise BIC on the training rows only, and the
// held-out rows are scored. Fold assignment depends only on (y, k, seed), so
// different methods can be compared on identical folds.
inline CvResult cross_validate(const CompositionMatrix& m, const Eigen::VectorXd& y, double lambda,
                               int k = 10, std::uint64_t seed = 0) {
    if (y.size() != m.rows()) throw data_error("cross_validate: response length mismatch");
    CvResult cv;
    cv.k = k;
    cv.seed = seed;
    cv.lambda = lambda;
    cv.fold_assignment = stratified_folds(y, k, seed);

    const TransformedMatrix predictors = power_only(m, lambda); // row-local, no fold leakage
    const Eigen::Index n = m.rows();

    double auc_sum = 0.0, acc_sum = 0.0;
    for (int f = 0; f < k; ++f) {
        std::vector<Eigen::Index> train, test;
        for (Eigen::Index i = 0; i < n; ++i)
            (cv.fold_assignment[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);

        Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train.size()), m.cols());
        Eigen::VectorXd y_train(static_cast<Eigen::Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
            x_train.row(static_cast<Eigen::Index>(i)) = predictors.values.row(train[i]);
            y_train(static_cast<Eigen::Index>(i)) = y(train[i]);
        }
        const LogisticModel model = stepwise_bic(x_train, y_train, m.part_labels);

        Eigen::VectorXd scores(static_cast<Eigen::Index>(test.size()));
        Eigen::VectorXd y_test(static_cast<Eigen::Index>(test.size()));
        for (std::size_t i = 0; i < test.size(); ++i) {
            Eigen::VectorXd row(model.predictor_count());
            for (Eigen::Index j = 0; j < model.predictor_count(); ++j)
                row(j) = predictors.values(test[i], model.predictor_indices[static_cast<std::size_t>(j)]);
            scores(static_cast<Eigen::Index>(i)) = detail::sigmoid(linear_predictor(model, row));
            y_test(static_cast<Eigen::Index>(i)) = y(test[i]);
        }
        cv.per_fold.push_back(metrics(scores, y_test));
        cv.per_fold_selected.push_back(model.predictor_indices);
        auc_sum += cv.per_fold.back().auc;
        acc_sum += cv.per_fold.back().accuracy;
    }
    cv.mean_auc = auc_sum / static_cast<double>(k);
    cv.mean_accuracy = acc_sum / static_cast<double>(k);
    return cv;
}

struct TuneResult {
    double optimal_lambda = 1.0;
    std::vector<double> lambdas;
    std::vector<CvResult> results;
};

// Uses the power as a tuning parameter: cross-validates every lambda on the
// identical folds and picks the one with the highest mean AUC. Ties go to the
// larger lambda (the weaker transform).
inline TuneResult tune_power(const CompositionMatrix& m, const Eigen::VectorXd& y,
                             std::vector<double> lambda_grid, int k = 10, std::uint64_t seed = 0) {
    TuneResult tune;
    tune.lambdas = detail::normalize_grid(std::move(lambda_grid)); // descending
    double best_auc = -1.0;
    for (double lambda : tune.lambdas) {
        tune.results.push_back(cross_validate(m, y, lambda, k, seed));
        // strict > on a descending grid leaves ties with the larger lambda
        if (tune.results.back().mean_auc > best_auc) {
            best_auc = tune.results.back().mean_auc;
            tune.optimal_lambda = lambda;
        }
    }
    return tune;
}

struct StabilityReplicate {
    std::vector<Index> parts; // the sampled subcomposition
    Eigen::VectorXd std_coefficients;
    double auc = 0.0;
    double accuracy = 0.0;
    bool failed = false;
    std::string failure_reason;
};

struct CoefficientStability {
    std::string label;
    double base = 0.0;    // standardized coefficient in the base model
    double ci_lo = 0.0;   // base +- 1.96 SE
    double ci_hi = 0.0;
    double min = 0.0, q025 = 0.0, median = 0.0, q975 = 0.0, max = 0.0;
    double fraction_within_ci = 0.0;
};

struct StabilityReport {
    LogisticModel base_standardized;
    std::uint64_t seed = 0;
    std::vector<StabilityReplicate> replicates;
    std::vector<CoefficientStability> coefficients;
    double auc_base = 0.0, auc_q025 = 0.0, auc_median = 0.0, auc_q975 = 0.0;
    double acc_base = 0.0, acc_q025 = 0.0, acc_median = 0.0, acc_q975 = 0.0;
    std::size_t n_failed = 0;
};

// How much would the fitted model change had a subcomposition been observed
// instead of the full composition? Every sampled subcomposition (always
// containing the model's parts) is re-closed, power-transformed with the same
// lambda, and the same predictor set is refitted; standardized coefficients
// and full-data AUC/accuracy are collected and judged against the base
// model's 95% confidence intervals.
inline StabilityReport model_subcomposition_stability(const CompositionMatrix& m,
                                                      const Eigen::VectorXd& y,
                                                      const LogisticModel& base_model, double lambda,
                                                      const SubcompositionPlan& plan) {
    if (y.size() != m.rows()) throw data_error("stability: response length mismatch");
    {
        std::vector<Index> a = plan.must_include;
        std::vector<Index> b = base_model.predictor_indices;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            throw data_error("stability: plan.must_include must equal the base model's predictors");
    }

    StabilityReport report;
    report.seed = plan.seed;

    const TransformedMatrix full = power_only(m, lambda);
    Eigen::MatrixXd base_x(m.rows(), base_model.predictor_count());
    for (Eigen::Index j = 0; j < base_model.predictor_count(); ++j)
        base_x.col(j) = full.values.col(base_model.predictor_indices[static_cast<std::size_t>(j)]);
    report.base_standardized =
        base_model.standardization ? base_model : standardized_model(base_model, full.values);
    {
        const Eigen::VectorXd p = fitted_probabilities(base_model, base_x);
        const ClassifierMetrics base_metrics = metrics(p, y);
        report.auc_base = base_metrics.auc;
        report.acc_base = base_metrics.accuracy;
    }

    const auto sets = sample_subcompositions(m, plan);
    const std::size_t n_coef = static_cast<std::size_t>(base_model.predictor_count());
    std::vector<std::vector<double>> coef_samples(n_coef);
    std::vector<double> aucs, accs;

    for (const auto& set : sets) {
        StabilityReplicate rep;
        rep.parts = set;
        try {
            const CompositionMatrix sub = subcomposition(m, set);
            const TransformedMatrix t = power_only(sub, lambda);
            // positions of the model parts inside the sorted subcomposition
            Eigen::MatrixXd x(m.rows(), base_model.predictor_count());
            for (Eigen::Index j = 0; j < base_model.predictor_count(); ++j) {
                const Index part = base_model.predictor_indices[static_cast<std::size_t>(j)];
                const auto pos = std::lower_bound(set.begin(), set.end(), part) - set.begin();
                x.col(j) = t.values.col(static_cast<Index>(pos));
            }
            const LogisticModel fit = fit_logistic(x, y, base_model.predictor_labels);
            const LogisticModel std_fit = standardized_model(fit, x);
            rep.std_coefficients = std_fit.coefficients;
            const Eigen::VectorXd p = fitted_probabilities(fit, x);
            const ClassifierMetrics met = metrics(p, y);
            rep.auc = met.auc;
            rep.accuracy = met.accuracy;
            for (std::size_t c = 0; c < n_coef; ++c)
                coef_samples[c].push_back(rep.std_coefficients(static_cast<Eigen::Index>(c)));
            aucs.push_back(rep.auc);
            accs.push_back(rep.accuracy);
        } catch (const std::exception& e) {
            rep.failed = true;
            rep.failure_reason = e.what();
            ++report.n_failed;
        }
        report.replicates.push_back(std::move(rep));
    }

    for (std::size_t c = 0; c < n_coef; ++c) {
        CoefficientStability cs;
        cs.label = base_model.predictor_labels[c];
        cs.base = report.base_standardized.coefficients(static_cast<Eigen::Index>(c));
        const double se = report.base_standardized.coefficient_se(static_cast<Eigen::Index>(c));
        cs.ci_lo = cs.base - 1.96 * se;
        cs.ci_hi = cs.base + 1.96 * se;
        auto& v = coef_samples[c];
        if (!v.empty()) {
            std::sort(v.begin(), v.end());
            cs.min = v.front();
            cs.q025 = detail::quantile(v, 0.025);
            cs.median = detail::quantile(v, 0.5);
            cs.q975 = detail::quantile(v, 0.975);
            cs.max = v.back();
            std::size_t inside = 0;
            for (double b : v)
                if (b >= cs.ci_lo && b <= cs.ci_hi) ++inside;
            cs.fraction_within_ci = static_cast<double>(inside) / static_cast<double>(v.size());
        }
        report.coefficients.push_back(std::move(cs));
    }
    if (!aucs.empty()) {
        std::sort(aucs.begin(), aucs.end());
        std::sort(accs.begin(), accs.end());
        report.auc_q025 = detail::quantile(aucs, 0.025);
        report.auc_median = detail::quantile(aucs, 0.5);
        report.auc_q975 = detail::quantile(aucs, 0.975);
        report.acc_q025 = detail::quantile(accs, 0.025);
        report.acc_median = detail::quantile(accs, 0.5);
        report.acc_q975 = detail::quantile(accs, 0.975);
    }
    return report;
}

enum class EffectMode { naive, reclosed };

struct EffectResult {
    double eta_before = 0.0, probability_before = 0.0;
    double eta_after = 0.0, probability_after = 0.0;
    EffectMode mode = EffectMode::naive;
    Index part = 0;
    double multiplier = 1.0;
};

// Effect of multiplying one compositional part by a factor, evaluated through
// the fitted model on power-transformed values. Naive mode leaves the other
// parts untouched (the composition no longer sums to 1); reclosed mode
// rescales the other parts proportionally so it does, which is the honest
// compositional effect since a change in one part must be compensated by the
// others.
inline EffectResult compositional_effect(const LogisticModel& model, const Eigen::VectorXd& baseline,
                                         Index part, double multiplier, double lambda,
                                         EffectMode mode) {
    if (!(multiplier > 0.0)) throw data_error("effect multiplier must be > 0");
    if (std::abs(baseline.sum() - 1.0) > 1e-6)
        throw data_error("effect baseline composition must sum to 1, sums to " +
                         std::to_string(baseline.sum()));
    for (Eigen::Index j = 0; j < baseline.size(); ++j)
        if (!(baseline(j) >= 0.0)) throw data_error("effect baseline has a negative entry");
    const auto it = std::find(model.predictor_indices.begin(), model.predictor_indices.end(), part);
    if (it == model.predictor_indices.end())
        throw data_error("part index " + std::to_string(part) + " is not a model predictor");

    const auto evaluate = [&](const Eigen::VectorXd& composition) {
        Eigen::VectorXd x(model.predictor_count());
        for (Eigen::Index j = 0; j < model.predictor_count(); ++j) {
            const double v = composition(model.predictor_indices[static_cast<std::size_t>(j)]);
            x(j) = v == 0.0 ? 0.0 : std::pow(v, lambda);
        }
        return linear_predictor(model, x);
    };

    EffectResult res;
    res.mode = mode;
    res.part = part;
    res.multiplier = multiplier;
    res.eta_before = evaluate(baseline);
    res.probability_before = detail::sigmoid(res.eta_before);

    Eigen::VectorXd modified = baseline;
    const double old_value = baseline(part);
    const double new_value = old_value * multiplier;
    if (mode == EffectMode::reclosed) {
        if (new_value > 1.0)
            throw data_error("reclosed effect: part value " + std::to_string(new_value) +
                             " exceeds 1, impossible composition");
        if (old_value >= 1.0) throw data_error("reclosed effect: part already fills the composition");
        const double scale = (1.0 - new_value) / (1.0 - old_value);
        modified *= scale;
    }
    modified(part) = new_value;
    res.eta_after = evaluate(modified);
    res.probability_after = detail::sigmoid(res.eta_after);
    return res;
}

} // namespace coda
