#pragma once

#include <Eigen/Dense>

#include "chipower/error.hpp"

namespace coda {

constexpr double kRankCutoff = 1e-10; // relative to the largest singular value

// Thin SVD A = U D V^T with singular values sorted descending.
struct SvdResult {
    Eigen::MatrixXd u;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd v;

    Eigen::Index rank() const {
        if (singular_values.size() == 0 || singular_values(0) <= 0.0) return 0;
        const double cut = kRankCutoff * singular_values(0);
        Eigen::Index r = 0;
        while (r < singular_values.size() && singular_values(r) > cut) ++r;
        return r;
    }
};

// Deterministic SVD kernel shared by every decomposition in the toolkit.
// Sign convention: in each column of V the entry of largest magnitude is
// positive (first such entry on ties), with the matching U column flipped.
// Procrustes fits are rotation-invariant, but fixed orientations keep runs
// bitwise reproducible.
inline SvdResult svd(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw numerical_error("svd: input contains non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXd> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    for (Eigen::Index k = 0; k < out.v.cols(); ++k) {
        Eigen::Index imax = 0;
        out.v.col(k).cwiseAbs().maxCoeff(&imax);
        if (out.v(imax, k) < 0.0) {
            out.v.col(k) = -out.v.col(k);
            out.u.col(k) = -out.u.col(k);
        }
    }
    return out;
}

} // namespace coda
