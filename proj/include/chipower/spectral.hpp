#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"
#include "chipower/svd.hpp"
#include "chipower/transforms.hpp"

namespace coda {

enum class SpectralMethod { pca, ca, lra };

inline std::string to_string(SpectralMethod m) {
    switch (m) {
        case SpectralMethod::pca: return "PCA";
        case SpectralMethod::ca: return "CA";
        case SpectralMethod::lra: return "LRA";
    }
    return "?";
}

// Principal coordinates of samples (rows) and parts (columns), truncated at
// the numerical rank. Row coordinates F and column coordinates G follow the
// conventions F = sqrt(I) U D and G = V D for PCA/LRA, and the marginal-
// weighted forms for CA.
struct SpectralResult {
    Eigen::MatrixXd row_principal; // I x r
    Eigen::MatrixXd col_principal; // J x r
    Eigen::VectorXd singular_values;
    double total_variance = 0.0;
    SpectralMethod method = SpectralMethod::pca;
    std::optional<double> lambda;      // CA power, when applicable
    double ca_raw_inertia = 0.0;       // CA only: inertia before the 1/lambda rescale
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

// PCA via the SVD of I^(-1/2) times the column-centered matrix; with this
// scaling the squared singular values are variances and their sum is the
// total variance of the columns (denominator I).
inline SpectralResult pca(const Eigen::MatrixXd& z) {
    if (z.rows() < 2) throw data_error("pca needs at least 2 rows");
    const double n = static_cast<double>(z.rows());
    Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
    const SvdResult dec = svd(centered / std::sqrt(n));
    const Eigen::Index r = dec.rank();
    SpectralResult s;
    s.singular_values = dec.singular_values.head(r);
    s.row_principal = std::sqrt(n) * dec.u.leftCols(r) * s.singular_values.asDiagonal();
    s.col_principal = dec.v.leftCols(r) * s.singular_values.asDiagonal();
    s.total_variance = dec.singular_values.squaredNorm();
    s.method = SpectralMethod::pca;
    return s;
}

inline SpectralResult pca(const TransformedMatrix& z) {
    SpectralResult s = pca(z.values);
    s.lambda = z.descriptor.lambda;
    s.row_labels = z.row_labels;
    s.col_labels = z.descriptor.column_names;
    return s;
}

// Logratio analysis: PCA of the CLR-transformed compositions.
inline SpectralResult lra(const CompositionMatrix& m) {
    SpectralResult s = pca(clr(m));
    s.method = SpectralMethod::lra;
    s.row_labels = m.row_labels;
    return s;
}

// Correspondence analysis of the lambda-powered, row-closed matrix:
// SVD of D_r^(-1/2) (P - r c^T) D_c^(-1/2), with the singular values
// multiplied back by 1/lambda (CA absorbs scale changes of the input, so the
// Box-Cox factor has to be re-introduced). With that rescale the row
// principal coordinates coincide with those of pca(chipower(m, lambda)).
inline SpectralResult ca(const CompositionMatrix& m, double lambda = 1.0) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw data_error("ca lambda must be in (0,1], got " + std::to_string(lambda));
    CompositionMatrix powered = m;
    powered.values = detail::power_entries(m.values, lambda);
    powered.closed = false;
    const CompositionMatrix y = close_rows(powered); // errors on all-zero rows
    for (Index j = 0; j < y.cols(); ++j)
        if (y.values.col(j).sum() <= 0.0)
            throw data_error("ca: part '" + y.part_labels[static_cast<std::size_t>(j)] +
                             "' is zero in every sample");

    const double grand = y.values.sum();
    const Eigen::MatrixXd p = y.values / grand;
    const Eigen::VectorXd r_marg = p.rowwise().sum();
    const Eigen::VectorXd c_marg = p.colwise().sum();
    const Eigen::ArrayXd r_isqrt = r_marg.array().sqrt().inverse();
    const Eigen::ArrayXd c_isqrt = c_marg.array().sqrt().inverse();

    Eigen::MatrixXd standardized = p - r_marg * c_marg.transpose();
    standardized = (standardized.array().colwise() * r_isqrt).rowwise() * c_isqrt.transpose();

    const SvdResult dec = svd(standardized);
    const Eigen::Index rank = dec.rank();
    SpectralResult s;
    s.singular_values = dec.singular_values.head(rank) / lambda;
    s.row_principal = (dec.u.leftCols(rank).array().colwise() * r_isqrt).matrix() *
                      s.singular_values.asDiagonal();
    s.col_principal = (dec.v.leftCols(rank).array().colwise() * c_isqrt).matrix() *
                      s.singular_values.asDiagonal();
    s.total_variance = dec.singular_values.squaredNorm() / (lambda * lambda);
    s.ca_raw_inertia = dec.singular_values.squaredNorm();
    s.method = SpectralMethod::ca;
    s.lambda = lambda;
    s.row_labels = m.row_labels;
    s.col_labels = m.part_labels;
    return s;
}

// Total inertia of a correspondence analysis (sum of squared singular values
// before the 1/lambda rescale; at lambda = 1 this is the classical CA
// inertia).
inline double total_inertia(const SpectralResult& s) {
    if (s.method != SpectralMethod::ca)
        throw data_error("total_inertia is defined for CA results, got " + to_string(s.method));
    return s.ca_raw_inertia;
}

// Total variance of the CLR matrix (denominator I); equals the LRA total
// variance by the trace identity.
inline double total_logratio_variance(const CompositionMatrix& m) {
    const Eigen::MatrixXd c = clr(m).values;
    const Eigen::MatrixXd centered = c.rowwise() - c.colwise().mean();
    return centered.squaredNorm() / static_cast<double>(c.rows());
}

// Symmetric matrix of Euclidean distances between rows, zero diagonal.
inline Eigen::MatrixXd euclidean_row_distances(const Eigen::MatrixXd& z) {
    const Index n = z.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double dist = (z.row(i) - z.row(j)).norm();
            d(i, j) = dist;
            d(j, i) = dist;
        }
    return d;
}

// Logratio distances: Euclidean distances between CLR-transformed samples.
// Identical to the distances over all J(J-1)/2 pairwise logratios up to the
// constant factor sqrt(J).
inline Eigen::MatrixXd logratio_distances(const CompositionMatrix& m) {
    return euclidean_row_distances(clr(m).values);
}

// chiPower distances; at lambda = 1 these are the chi-square distances of
// classical CA.
inline Eigen::MatrixXd chipower_distances(const CompositionMatrix& m, double lambda) {
    return euclidean_row_distances(chipower(m, lambda).values);
}

} // namespace coda
