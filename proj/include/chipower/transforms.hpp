#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"
#include "chipower/io.hpp"

namespace coda {

enum class TransformKind { pairwise_lr, alr, clr, chipower, power_only };

inline std::string to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::pairwise_lr: return "lr";
        case TransformKind::alr: return "alr";
        case TransformKind::clr: return "clr";
        case TransformKind::chipower: return "chipower";
        case TransformKind::power_only: return "power";
    }
    return "?";
}

struct TransformDescriptor {
    TransformKind kind;
    std::optional<Index> ref_part;   // ALR only
    std::optional<double> lambda;    // chipower / power_only, in (0, 1]
    std::vector<std::string> column_names;
};

struct TransformedMatrix {
    Eigen::MatrixXd values;
    TransformDescriptor descriptor;
    Index source_rows = 0;
    Index source_cols = 0;
    std::vector<std::string> row_labels; // carried over from the source matrix
    // chiPower only: the column means of the closed powered matrix, needed to
    // reapply the same standardization elsewhere.
    std::optional<Eigen::VectorXd> column_means_used;
};

namespace detail {

// Log of a strictly positive closed matrix; closes unclosed input first.
// Errors name the first zero cell in row-major order.
inline std::pair<Eigen::MatrixXd, CompositionMatrix> log_of_closed(const CompositionMatrix& m,
                                                                   const char* op) {
    const CompositionMatrix closed = close_rows(m);
    for (Index i = 0; i < closed.rows(); ++i)
        for (Index j = 0; j < closed.cols(); ++j)
            if (closed.values(i, j) <= 0.0)
                throw data_error(std::string(op) + " requires strictly positive entries; zero at " +
                                 cell_name(closed, i, j));
    return {closed.values.array().log().matrix(), closed};
}

inline Eigen::MatrixXd power_entries(const Eigen::MatrixXd& x, double lambda) {
    if (lambda == 1.0) return x;
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j)
            out(i, j) = x(i, j) == 0.0 ? 0.0 : std::pow(x(i, j), lambda);
    return out;
}

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw data_error("power lambda must be in (0,1], got " + std::to_string(lambda));
}

inline std::string lambda_tag(double lambda) { return "[" + format_double(lambda) + "]"; }

} // namespace detail

// All J(J-1)/2 pairwise logratios log(x_j / x_j'), columns ordered
// lexicographically (1,2), (1,3), ..., (J-1,J).
inline TransformedMatrix pairwise_lr(const CompositionMatrix& m) {
    auto [logs, closed] = detail::log_of_closed(m, "pairwise logratio");
    const Index n_parts = closed.cols();
    TransformedMatrix t;
    t.source_rows = closed.rows();
    t.source_cols = n_parts;
    t.row_labels = closed.row_labels;
    t.descriptor.kind = TransformKind::pairwise_lr;
    t.values.resize(closed.rows(), n_parts * (n_parts - 1) / 2);
    Index col = 0;
    for (Index j = 0; j < n_parts; ++j) {
        for (Index k = j + 1; k < n_parts; ++k, ++col) {
            t.values.col(col) = logs.col(j) - logs.col(k);
            t.descriptor.column_names.push_back("log(" + closed.part_labels[static_cast<std::size_t>(j)] +
                                                "/" + closed.part_labels[static_cast<std::size_t>(k)] + ")");
        }
    }
    return t;
}

// Additive logratios log(x_j / x_ref) for j != ref, in original part order.
inline TransformedMatrix alr(const CompositionMatrix& m, Index ref) {
    if (ref < 0 || ref >= m.cols())
        throw data_error("alr reference part index " + std::to_string(ref) + " out of range");
    auto [logs, closed] = detail::log_of_closed(m, "alr");
    TransformedMatrix t;
    t.source_rows = closed.rows();
    t.source_cols = closed.cols();
    t.row_labels = closed.row_labels;
    t.descriptor.kind = TransformKind::alr;
    t.descriptor.ref_part = ref;
    t.values.resize(closed.rows(), closed.cols() - 1);
    Index col = 0;
    for (Index j = 0; j < closed.cols(); ++j) {
        if (j == ref) continue;
        t.values.col(col++) = logs.col(j) - logs.col(ref);
        t.descriptor.column_names.push_back("log(" + closed.part_labels[static_cast<std::size_t>(j)] +
                                            "/" + closed.part_labels[static_cast<std::size_t>(ref)] + ")");
    }
    return t;
}

// Reference part whose log-transform has the lowest variance across samples;
// ties go to the lowest index.
inline Index choose_alr_ref(const CompositionMatrix& m) {
    auto [logs, closed] = detail::log_of_closed(m, "alr reference selection");
    const double n = static_cast<double>(logs.rows());
    Index best = 0;
    double best_var = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < logs.cols(); ++j) {
        const double mean = logs.col(j).mean();
        const double var = (logs.col(j).array() - mean).square().sum() / n;
        if (var < best_var) {
            best_var = var;
            best = j;
        }
    }
    return best;
}

// Centered logratios: log(x_j) minus the row mean of the logs. Rows sum to 0.
inline TransformedMatrix clr(const CompositionMatrix& m) {
    auto [logs, closed] = detail::log_of_closed(m, "clr");
    TransformedMatrix t;
    t.source_rows = closed.rows();
    t.source_cols = closed.cols();
    t.row_labels = closed.row_labels;
    t.descriptor.kind = TransformKind::clr;
    t.values = logs.colwise() - logs.rowwise().mean();
    for (const auto& label : closed.part_labels)
        t.descriptor.column_names.push_back("clr(" + label + ")");
    return t;
}

// Box-Cox power transform: (x^lambda - 1)/lambda for lambda > 0, log(x) at
// lambda = 0 (its limit).
inline double box_cox(double x, double lambda) {
    if (!(x >= 0.0)) throw data_error("box_cox requires x >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw data_error("box_cox lambda must be in [0,1], got " + std::to_string(lambda));
    if (lambda == 0.0) {
        if (x == 0.0) throw data_error("box_cox at lambda = 0 requires x > 0");
        return std::log(x);
    }
    return (std::pow(x, lambda) - 1.0) / lambda;
}

// The chiPower transformation: power entrywise (0^lambda := 0), close the
// rows, then divide each column by the square root of its mean and scale by
// 1/lambda. Zeros pass through untouched, which is the reason this transform
// works on count data without replacement. The -1/lambda shift of the Box-Cox
// form is dropped (it cancels in all distance and decomposition uses); the
// 1/lambda factor is kept so variance does not shrink as lambda decreases.
inline TransformedMatrix chipower(const CompositionMatrix& m, double lambda) {
    detail::check_lambda(lambda);
    CompositionMatrix powered = m;
    powered.values = detail::power_entries(m.values, lambda);
    powered.closed = false;
    const CompositionMatrix y = close_rows(powered); // errors on all-zero rows
    const Eigen::VectorXd col_means = y.values.colwise().mean();
    for (Index j = 0; j < y.cols(); ++j)
        if (col_means(j) <= 0.0)
            throw data_error("chipower: part '" + y.part_labels[static_cast<std::size_t>(j)] +
                             "' is zero in every sample");
    TransformedMatrix t;
    t.source_rows = m.rows();
    t.source_cols = m.cols();
    t.row_labels = m.row_labels;
    t.descriptor.kind = TransformKind::chipower;
    t.descriptor.lambda = lambda;
    t.values = (y.values.array().rowwise() /
                (lambda * col_means.array().sqrt()).transpose()).matrix();
    t.column_means_used = col_means;
    for (const auto& label : m.part_labels)
        t.descriptor.column_names.push_back("chiPower" + detail::lambda_tag(lambda) + "(" + label + ")");
    return t;
}

// Power transform of the closed compositions with no standardization and no
// 1/lambda factor. This is the predictor form for supervised use, where
// column-wise scale changes do not affect the model.
inline TransformedMatrix power_only(const CompositionMatrix& m, double lambda) {
    detail::check_lambda(lambda);
    const CompositionMatrix closed = close_rows(m);
    TransformedMatrix t;
    t.source_rows = m.rows();
    t.source_cols = m.cols();
    t.row_labels = m.row_labels;
    t.descriptor.kind = TransformKind::power_only;
    t.descriptor.lambda = lambda;
    t.values = detail::power_entries(closed.values, lambda);
    for (const auto& label : m.part_labels)
        t.descriptor.column_names.push_back("pow" + detail::lambda_tag(lambda) + "(" + label + ")");
    return t;
}

} // namespace coda
