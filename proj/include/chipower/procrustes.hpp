#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "chipower/error.hpp"
#include "chipower/svd.hpp"

namespace coda {

// Result of matching two point configurations by translation, scaling and
// rotation (reflections allowed). The correlation r = sqrt(1 - E) equals the
// Pearson correlation of the vectorized fitted configurations and is the
// isometry/coherence measure used throughout.
struct ProcrustesFit {
    Eigen::MatrixXd rotation; // Q, orthogonal
    double error = 0.0;       // E, residual sum of squares after the fit, in [0,1]
    double correlation = 0.0; // r = sqrt(1 - E), in [0,1]
    Eigen::Index points = 0;
    Eigen::Index dims = 0; // common width after zero-padding
};

// Least-squares Procrustes fit of f2 onto f1:
//   1. column-center both (translation),
//   2. zero-pad the narrower matrix to a common width,
//   3. normalize each to unit total sum of squares,
//   4. rotate by Q = V U^T from the SVD of F1*^T F2*,
//   5. scale by the optimal factor (the sum of the singular values),
//   6. E = residual sum of squares, r = sqrt(1 - E).
inline ProcrustesFit procrustes_fit(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2) {
    if (f1.rows() != f2.rows())
        throw data_error("procrustes: configurations have " + std::to_string(f1.rows()) + " and " +
                         std::to_string(f2.rows()) + " points");
    if (f1.rows() < 2) throw data_error("procrustes needs at least 2 points");
    if (f1.cols() < 1 || f2.cols() < 1) throw data_error("procrustes needs at least 1 dimension");

    const Eigen::Index n = f1.rows();
    const Eigen::Index d = std::max(f1.cols(), f2.cols());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, d);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, d);
    a.leftCols(f1.cols()) = f1.rowwise() - f1.colwise().mean();
    b.leftCols(f2.cols()) = f2.rowwise() - f2.colwise().mean();

    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw data_error("procrustes: a configuration is identically zero after centering");
    a /= na;
    b /= nb;

    const SvdResult dec = svd(a.transpose() * b);
    ProcrustesFit fit;
    fit.rotation = dec.v * dec.u.transpose();
    fit.points = n;
    fit.dims = d;
    const double scale = dec.singular_values.sum();
    fit.error = std::clamp((a - scale * b * fit.rotation).squaredNorm(), 0.0, 1.0);
    fit.correlation = std::sqrt(1.0 - fit.error);
    return fit;
}

inline double procrustes_correlation(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2) {
    return procrustes_fit(f1, f2).correlation;
}

} // namespace coda
