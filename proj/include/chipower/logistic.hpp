#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chipower/error.hpp"

namespace coda {

struct Standardization {
    Eigen::VectorXd mean; // per predictor
    Eigen::VectorXd sd;   // sample standard deviation (denominator n-1), > 0
};

// Binary logistic regression model on a set of predictor columns. When
// `standardization` is present the coefficients apply to the standardized
// predictors; fitted probabilities are identical either way.
struct LogisticModel {
    std::vector<Eigen::Index> predictor_indices; // columns of the candidate matrix, in order
    std::vector<std::string> predictor_labels;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd coefficient_se; // from the inverse Fisher information
    double intercept = 0.0;
    double intercept_se = 0.0;
    double lambda = 1.0; // power applied to the predictors upstream
    std::optional<Standardization> standardization;
    double deviance = 0.0;
    double bic = 0.0;
    Eigen::Index n = 0;
    bool separation_flag = false;

    Eigen::Index predictor_count() const { return coefficients.size(); }
};

namespace detail {

inline double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// log(1 + exp(eta)) without overflow.
inline double softplus(double eta) {
    return std::log1p(std::exp(-std::abs(eta))) + std::max(eta, 0.0);
}

inline void check_binary_response(const Eigen::VectorXd& y) {
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) != 0.0 && y(i) != 1.0)
            throw data_error("response must be 0/1, found " + std::to_string(y(i)));
        if (y(i) == 1.0) ++ones;
    }
    if (ones == 0 || ones == y.size())
        throw data_error("response contains a single class; both classes are required");
}

} // namespace detail

// Linear predictor of a model on a row of untransformed-by-the-model
// predictor values (i.e. the same scale the model was fitted on).
inline double linear_predictor(const LogisticModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.predictor_count())
        throw data_error("linear_predictor: expected " + std::to_string(model.predictor_count()) +
                         " predictor values, got " + std::to_string(x.size()));
    if (model.standardization) {
        const auto& st = *model.standardization;
        return model.intercept +
               model.coefficients.dot(((x - st.mean).array() / st.sd.array()).matrix());
    }
    return model.intercept + model.coefficients.dot(x);
}

inline Eigen::VectorXd fitted_probabilities(const LogisticModel& model, const Eigen::MatrixXd& x) {
    Eigen::VectorXd p(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        p(i) = detail::sigmoid(linear_predictor(model, x.row(i).transpose()));
    return p;
}

// Maximum-likelihood logistic fit by iteratively reweighted least squares.
// Convergence: max |score| <= 1e-8 or relative deviance change <= 1e-10,
// at most 100 iterations. Perfect separation (coefficient norm exceeding 1e4)
// flags the model rather than failing. Rank-deficient designs are rejected
// with the offending columns named.
inline LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<std::string>& labels = {}) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) throw data_error("fit_logistic: response length does not match row count");
    detail::check_binary_response(y);
    if (n < p + 1)
        throw data_error("fit_logistic: " + std::to_string(n) + " samples cannot identify " +
                         std::to_string(p + 1) + " parameters");
    if (!x.allFinite()) throw numerical_error("fit_logistic: non-finite predictor value");

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;

    // collinearity check on the raw design, once
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < p + 1) {
            const auto perm = qr.colsPermutation().indices();
            std::string names;
            for (Eigen::Index k = qr.rank(); k < p + 1; ++k) {
                const Eigen::Index col = perm(k);
                if (!names.empty()) names += ", ";
                if (col == 0)
                    names += "intercept";
                else if (static_cast<std::size_t>(col - 1) < labels.size())
                    names += labels[static_cast<std::size_t>(col - 1)];
                else
                    names += "column " + std::to_string(col - 1);
            }
            throw numerical_error("fit_logistic: collinear predictors (" + names + ")");
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd prob = Eigen::VectorXd::Constant(n, 0.5);
    double deviance = std::numeric_limits<double>::infinity();
    bool separation = false;

    constexpr int max_iter = 100;
    constexpr double score_tol = 1e-8;
    constexpr double deviance_rel_tol = 1e-10;
    constexpr double separation_norm = 1e4;
    constexpr double weight_floor = 1e-10;

    Eigen::MatrixXd weighted(n, p + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        eta = design * beta;
        for (Eigen::Index i = 0; i < n; ++i) prob(i) = detail::sigmoid(eta(i));

        double dev = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            dev += detail::softplus(eta(i)) - y(i) * eta(i);
        dev *= 2.0;

        const Eigen::VectorXd score = design.transpose() * (y - prob);
        const bool score_ok = score.lpNorm<Eigen::Infinity>() <= score_tol;
        const bool dev_ok = iter > 0 && std::abs(dev - deviance) <= deviance_rel_tol * (std::abs(dev) + 1.0);
        deviance = dev;
        if (beta.lpNorm<Eigen::Infinity>() > separation_norm) {
            separation = true;
            break;
        }
        if (score_ok || dev_ok) break;

        Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).max(weight_floor);
        const Eigen::VectorXd z = eta.array() + (y - prob).array() / w.array();
        const Eigen::ArrayXd sw = w.array().sqrt();
        weighted = design.array().colwise() * sw;
        beta = weighted.colPivHouseholderQr().solve((z.array() * sw).matrix());
    }

    // observed Fisher information at the solution
    Eigen::VectorXd se = Eigen::VectorXd::Zero(p + 1);
    {
        const Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).max(weight_floor).matrix();
        const Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
        const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
        for (Eigen::Index k = 0; k < p + 1; ++k) se(k) = std::sqrt(std::max(cov(k, k), 0.0));
    }

    LogisticModel model;
    model.predictor_indices.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) model.predictor_indices[static_cast<std::size_t>(j)] = j;
    model.predictor_labels = labels;
    if (model.predictor_labels.empty())
        for (Eigen::Index j = 0; j < p; ++j) model.predictor_labels.push_back("x" + std::to_string(j));
    model.coefficients = beta.tail(p);
    model.coefficient_se = se.tail(p);
    model.intercept = beta(0);
    model.intercept_se = se(0);
    model.deviance = deviance;
    model.bic = deviance + static_cast<double>(p + 1) * std::log(static_cast<double>(n));
    model.n = n;
    model.separation_flag = separation;
    return model;
}

// Forward stepwise selection under BIC: starting from the intercept-only
// model, repeatedly add the candidate column with the lowest BIC and stop
// when no addition lowers it. Candidate scanning order is fixed (ascending
// column index) and ties go to the lowest index, so the selection is exactly
// reproducible. Candidates whose trial fit is degenerate are skipped.
inline LogisticModel stepwise_bic(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& y,
                                  const std::vector<std::string>& labels = {}) {
    const Eigen::Index n = candidates.rows();
    const Eigen::Index n_cand = candidates.cols();
    if (y.size() != n) throw data_error("stepwise_bic: response length does not match row count");
    detail::check_binary_response(y);

    std::vector<std::string> all_labels = labels;
    if (all_labels.empty())
        for (Eigen::Index j = 0; j < n_cand; ++j) all_labels.push_back("x" + std::to_string(j));

    std::vector<Eigen::Index> selected;
    LogisticModel best = fit_logistic(Eigen::MatrixXd(n, 0), y);
    best.predictor_indices.clear();
    best.predictor_labels.clear();

    std::vector<bool> in_model(static_cast<std::size_t>(n_cand), false);
    for (;;) {
        double best_bic = best.bic;
        Eigen::Index best_col = -1;
        LogisticModel best_trial;
        Eigen::MatrixXd trial(n, static_cast<Eigen::Index>(selected.size()) + 1);
        for (std::size_t k = 0; k < selected.size(); ++k) trial.col(static_cast<Eigen::Index>(k)) =
            candidates.col(selected[k]);
        for (Eigen::Index j = 0; j < n_cand; ++j) {
            if (in_model[static_cast<std::size_t>(j)]) continue;
            trial.col(trial.cols() - 1) = candidates.col(j);
            LogisticModel fit;
            try {
                fit = fit_logistic(trial, y);
            } catch (const std::exception&) {
                continue; // collinear with the current model; not a usable candidate
            }
            if (fit.bic < best_bic) {
                best_bic = fit.bic;
                best_col = j;
                best_trial = std::move(fit);
            }
        }
        if (best_col < 0) break;
        selected.push_back(best_col);
        in_model[static_cast<std::size_t>(best_col)] = true;
        best = std::move(best_trial);
    }

    best.predictor_indices = selected;
    best.predictor_labels.clear();
    for (Eigen::Index col : selected) best.predictor_labels.push_back(all_labels[static_cast<std::size_t>(col)]);
    return best;
}

// Re-expresses a fitted model in terms of standardized predictors (mean 0,
// variance 1). Pure reparameterization: fitted probabilities are unchanged.
// `candidates` is the matrix the model's predictor_indices refer to.
inline LogisticModel standardized_model(const LogisticModel& model, const Eigen::MatrixXd& candidates) {
    if (model.standardization) return model;
    const Eigen::Index p = model.predictor_count();
    const double n = static_cast<double>(candidates.rows());
    if (n < 2) throw data_error("standardized_model needs at least 2 rows");

    Standardization st;
    st.mean.resize(p);
    st.sd.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::VectorXd col = candidates.col(model.predictor_indices[static_cast<std::size_t>(k)]);
        st.mean(k) = col.mean();
        st.sd(k) = std::sqrt((col.array() - st.mean(k)).square().sum() / (n - 1.0));
        if (!(st.sd(k) > 0.0))
            throw data_error("standardized_model: predictor '" +
                             model.predictor_labels[static_cast<std::size_t>(k)] +
                             "' has zero variance");
    }

    LogisticModel out = model;
    out.standardization = st;
    out.coefficients = (model.coefficients.array() * st.sd.array()).matrix();
    out.coefficient_se = (model.coefficient_se.array() * st.sd.array()).matrix();
    out.intercept = model.intercept + model.coefficients.dot(st.mean);
    return out;
}

} // namespace coda
