#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "chipower/diagnostics.hpp"
#include "chipower/error.hpp"
#include "chipower/logistic.hpp"
#include "chipower/metrics.hpp"
#include "chipower/spectral.hpp"
#include "chipower/supervised.hpp"
#include "chipower/transforms.hpp"

// Serialization of result types to the toolkit's JSON report schema. Objects
// use insertion order and numbers serialize with exact round-trip fidelity,
// so identical inputs produce byte-identical payloads.

namespace coda {

using json = nlohmann::ordered_json;

inline json to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const TransformDescriptor& d) {
    json j;
    j["kind"] = to_string(d.kind);
    if (d.lambda) j["lambda"] = *d.lambda;
    if (d.ref_part) j["ref_part"] = *d.ref_part;
    j["column_names"] = d.column_names;
    return j;
}

inline json to_json(const TransformedMatrix& t) {
    json j;
    j["descriptor"] = to_json(t.descriptor);
    j["source_dims"] = {t.source_rows, t.source_cols};
    if (t.column_means_used) j["column_means"] = to_json(*t.column_means_used);
    return j;
}

inline json to_json(const SpectralResult& s) {
    json j;
    std::string method = to_string(s.method);
    if (s.method == SpectralMethod::ca && s.lambda && *s.lambda != 1.0)
        method = "CA-power(" + format_double(*s.lambda) + ")";
    j["method"] = method;
    if (s.lambda) j["lambda"] = *s.lambda;
    j["dimensions"] = s.singular_values.size();
    j["singular_values"] = to_json(s.singular_values);
    j["total_variance"] = s.total_variance;
    if (s.method == SpectralMethod::ca) j["total_inertia"] = s.ca_raw_inertia;
    return j;
}

inline json to_json(const IsometryScan& scan) {
    json j;
    j["lambdas"] = scan.lambdas;
    j["correlations"] = scan.correlations;
    j["optimal_lambda"] = scan.optimal_lambda;
    j["optimal_correlation"] = scan.optimal_correlation;
    return j;
}

inline json to_json(const CoherenceReport& report) {
    json j;
    j["geometry"] = report.geometry;
    if (report.lambda) j["lambda"] = *report.lambda;
    j["seed"] = report.seed;
    json summaries = json::array();
    for (const auto& s : report.summaries) {
        summaries.push_back({{"fraction", s.fraction},
                             {"size", s.size},
                             {"n_ok", s.n_ok},
                             {"n_failed", s.n_failed},
                             {"min", s.min},
                             {"q1", s.q1},
                             {"median", s.median},
                             {"q3", s.q3},
                             {"max", s.max}});
    }
    j["fractions"] = std::move(summaries);
    json reps = json::array();
    for (const auto& r : report.replicates) {
        json rep{{"fraction_index", r.fraction_index},
                 {"replicate", r.replicate_index},
                 {"parts", r.parts}};
        if (r.failed)
            rep["failure"] = r.failure_reason;
        else
            rep["correlation"] = r.correlation;
        reps.push_back(std::move(rep));
    }
    j["replicates"] = std::move(reps);
    return j;
}

inline json to_json(const DistanceComparison& cmp) {
    json j;
    j["n_pairs"] = cmp.d1.size();
    j["pearson"] = cmp.pearson;
    j["slope"] = cmp.slope;
    return j;
}

inline json to_json(const ClassifierMetrics& m) {
    json j;
    j["auc"] = m.auc;
    j["accuracy"] = m.accuracy;
    j["sensitivity"] = m.sensitivity;
    j["specificity"] = m.specificity;
    j["threshold"] = m.threshold;
    j["confusion"] = {{"tp", m.true_pos}, {"fn", m.false_neg}, {"fp", m.false_pos}, {"tn", m.true_neg}};
    return j;
}

inline json to_json(const LogisticModel& model) {
    json j;
    j["n"] = model.n;
    j["lambda"] = model.lambda;
    j["intercept"] = model.intercept;
    j["intercept_se"] = model.intercept_se;
    j["predictor_indices"] = model.predictor_indices;
    j["predictor_labels"] = model.predictor_labels;
    j["coefficients"] = to_json(model.coefficients);
    j["coefficient_se"] = to_json(model.coefficient_se);
    if (model.standardization) {
        j["standardization"] = {{"mean", to_json(model.standardization->mean)},
                                {"sd", to_json(model.standardization->sd)}};
    }
    j["deviance"] = model.deviance;
    j["bic"] = model.bic;
    j["separation_flag"] = model.separation_flag;
    return j;
}

// Inverse of to_json(LogisticModel); used by the CLI to re-load exported
// models for effect evaluation.
inline LogisticModel logistic_model_from_json(const json& j) {
    LogisticModel model;
    model.n = j.at("n").get<Eigen::Index>();
    model.lambda = j.at("lambda").get<double>();
    model.intercept = j.at("intercept").get<double>();
    model.intercept_se = j.value("intercept_se", 0.0);
    model.predictor_indices = j.at("predictor_indices").get<std::vector<Eigen::Index>>();
    model.predictor_labels = j.at("predictor_labels").get<std::vector<std::string>>();
    const auto coef = j.at("coefficients").get<std::vector<double>>();
    model.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    const auto se = j.value("coefficient_se", std::vector<double>(coef.size(), 0.0));
    model.coefficient_se = Eigen::Map<const Eigen::VectorXd>(se.data(), static_cast<Eigen::Index>(se.size()));
    if (j.contains("standardization")) {
        Standardization st;
        const auto mean = j["standardization"].at("mean").get<std::vector<double>>();
        const auto sd = j["standardization"].at("sd").get<std::vector<double>>();
        st.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        st.sd = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
        model.standardization = std::move(st);
    }
    model.deviance = j.value("deviance", 0.0);
    model.bic = j.value("bic", 0.0);
    model.separation_flag = j.value("separation_flag", false);
    return model;
}

inline json to_json(const CvResult& cv) {
    json j;
    j["k"] = cv.k;
    j["seed"] = cv.seed;
    j["lambda"] = cv.lambda;
    j["mean_auc"] = cv.mean_auc;
    j["mean_accuracy"] = cv.mean_accuracy;
    j["fold_assignment"] = cv.fold_assignment;
    json folds = json::array();
    for (std::size_t f = 0; f < cv.per_fold.size(); ++f) {
        json fold = to_json(cv.per_fold[f]);
        fold["selected"] = cv.per_fold_selected[f];
        folds.push_back(std::move(fold));
    }
    j["per_fold"] = std::move(folds);
    return j;
}

inline json to_json(const TuneResult& tune) {
    json j;
    j["optimal_lambda"] = tune.optimal_lambda;
    j["lambdas"] = tune.lambdas;
    json results = json::array();
    for (const auto& cv : tune.results)
        results.push_back({{"lambda", cv.lambda}, {"mean_auc", cv.mean_auc}, {"mean_accuracy", cv.mean_accuracy}});
    j["per_lambda"] = std::move(results);
    return j;
}

inline json to_json(const StabilityReport& report) {
    json j;
    j["seed"] = report.seed;
    j["base_model"] = to_json(report.base_standardized);
    j["base_auc"] = report.auc_base;
    j["base_accuracy"] = report.acc_base;
    j["n_replicates"] = report.replicates.size();
    j["n_failed"] = report.n_failed;
    json coefs = json::array();
    for (const auto& c : report.coefficients) {
        coefs.push_back({{"label", c.label},
                         {"base", c.base},
                         {"ci_lo", c.ci_lo},
                         {"ci_hi", c.ci_hi},
                         {"min", c.min},
                         {"q025", c.q025},
                         {"median", c.median},
                         {"q975", c.q975},
                         {"max", c.max},
                         {"fraction_within_ci", c.fraction_within_ci}});
    }
    j["coefficients"] = std::move(coefs);
    j["auc"] = {{"q025", report.auc_q025}, {"median", report.auc_median}, {"q975", report.auc_q975}};
    j["accuracy"] = {{"q025", report.acc_q025}, {"median", report.acc_median}, {"q975", report.acc_q975}};
    return j;
}

inline json to_json(const EffectResult& e) {
    json j;
    j["mode"] = e.mode == EffectMode::naive ? "naive" : "reclosed";
    j["part"] = e.part;
    j["multiplier"] = e.multiplier;
    j["before"] = {{"linear_predictor", e.eta_before}, {"probability", e.probability_before}};
    j["after"] = {{"linear_predictor", e.eta_after}, {"probability", e.probability_after}};
    return j;
}

inline void write_json(const std::string& path, const json& payload) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open output file '" + path + "'");
    out << payload.dump(2) << '\n';
    if (!out.good()) throw data_error("failed writing '" + path + "'");
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw data_error("cannot parse JSON file '" + path + "': " + e.what());
    }
    return j;
}

} // namespace coda
