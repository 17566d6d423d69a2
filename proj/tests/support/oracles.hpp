#pragma once

// Test-only oracles: independent brute-force implementations used to check
// the library. Nothing here may call the implementation path it verifies.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/rng.hpp"
#include "chipower/synth.hpp"

namespace oracles {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Euclidean distance between two rows over all J(J-1)/2 pairwise logratios,
// formed explicitly.
inline double all_pairs_lr_distance(const VectorXd& x, const VectorXd& y) {
    double ss = 0.0;
    for (Index j = 0; j < x.size(); ++j)
        for (Index k = j + 1; k < x.size(); ++k) {
            const double d = std::log(x(j) / x(k)) - std::log(y(j) / y(k));
            ss += d * d;
        }
    return std::sqrt(ss);
}

// Classical CA chi-square distance between two rows of a closed matrix with
// column means cbar: sqrt(sum_j (x_j - y_j)^2 / cbar_j).
inline double chi_square_distance(const VectorXd& x, const VectorXd& y, const VectorXd& cbar) {
    double ss = 0.0;
    for (Index j = 0; j < x.size(); ++j) ss += (x(j) - y(j)) * (x(j) - y(j)) / cbar(j);
    return std::sqrt(ss);
}

// AUC by explicit enumeration of (positive, negative) pairs, ties one half.
inline double pairwise_auc(const VectorXd& scores, const VectorXd& y) {
    double num = 0.0;
    Index n_pos = 0, n_neg = 0;
    for (Index i = 0; i < y.size(); ++i) {
        if (y(i) != 1.0) continue;
        ++n_pos;
        for (Index j = 0; j < y.size(); ++j) {
            if (y(j) != 0.0) continue;
            if (scores(i) > scores(j)) num += 1.0;
            else if (scores(i) == scores(j)) num += 0.5;
        }
    }
    for (Index j = 0; j < y.size(); ++j)
        if (y(j) == 0.0) ++n_neg;
    return num / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Logistic log-likelihood, gradient and Hessian on a design with intercept.
inline double logistic_loglik(const MatrixXd& design, const VectorXd& y, const VectorXd& beta) {
    const VectorXd eta = design * beta;
    double ll = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        ll += y(i) * eta(i) - std::log1p(std::exp(-std::abs(eta(i)))) - std::max(eta(i), 0.0);
    return ll;
}

inline VectorXd logistic_gradient(const MatrixXd& design, const VectorXd& y, const VectorXd& beta) {
    const VectorXd eta = design * beta;
    VectorXd p(eta.size());
    for (Index i = 0; i < eta.size(); ++i) p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
    return design.transpose() * (y - p);
}

// Dense Newton maximization of the exact log-likelihood with step halving.
// Converges far past the tolerance the implementation promises.
inline VectorXd newton_logistic(const MatrixXd& x, const VectorXd& y) {
    const Index n = x.rows();
    const Index p = x.cols();
    MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;

    VectorXd beta = VectorXd::Zero(p + 1);
    for (int iter = 0; iter < 200; ++iter) {
        const VectorXd eta = design * beta;
        VectorXd w(n);
        VectorXd prob(n);
        for (Index i = 0; i < n; ++i) {
            prob(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            w(i) = prob(i) * (1.0 - prob(i));
        }
        const VectorXd grad = design.transpose() * (y - prob);
        if (grad.lpNorm<Eigen::Infinity>() < 1e-12) break;
        const MatrixXd hess = design.transpose() * w.asDiagonal() * design;
        VectorXd step = hess.fullPivLu().solve(grad);
        double ll0 = logistic_loglik(design, y, beta);
        VectorXd trial = beta + step;
        int halvings = 0;
        while (logistic_loglik(design, y, trial) < ll0 && halvings < 40) {
            step *= 0.5;
            trial = beta + step;
            ++halvings;
        }
        beta = trial;
    }
    return beta; // [intercept, coefficients...]
}

// Pearson correlation of two vectorized matrices.
inline double vectorized_pearson(const MatrixXd& a, const MatrixXd& b) {
    const Index n = a.size();
    Eigen::Map<const VectorXd> va(a.data(), n);
    Eigen::Map<const VectorXd> vb(b.data(), n);
    const VectorXd ca = va.array() - va.mean();
    const VectorXd cb = vb.array() - vb.mean();
    return ca.dot(cb) / (ca.norm() * cb.norm());
}

// Deterministic random rotation: QR of a seeded Gaussian matrix.
inline MatrixXd random_rotation(Index d, std::uint64_t seed) {
    coda::SeededRng rng(seed);
    MatrixXd g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    // fix a proper rotation (det +1) for reproducible tests
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

inline MatrixXd random_gaussian(Index rows, Index cols, std::uint64_t seed) {
    coda::SeededRng rng(seed);
    MatrixXd g(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) g(i, j) = rng.next_gaussian();
    return g;
}

// Strictly positive random composition input (unclosed).
inline coda::CompositionMatrix random_positive(Index rows, Index cols, std::uint64_t seed,
                                               double sigma = 1.0) {
    coda::SeededRng rng(seed);
    MatrixXd x(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) x(i, j) = std::exp(sigma * rng.next_gaussian());
    return coda::make_composition(std::move(x), false);
}

// Shared synthetic protocol for the zero-handling tests: skewed count matrix
// plus a detection limit whose strict-below fraction lands in [lo, hi] while
// every part keeps at least one value above it. Returns limit 0 when no such
// limit exists.
inline coda::CompositionMatrix sparse_counts(std::uint64_t seed, Index rows = 50, Index cols = 120) {
    coda::SynthOptions opt;
    opt.rows = rows;
    opt.cols = cols;
    opt.seed = seed;
    opt.part_skew = 1.3;
    opt.sample_noise = 1.2;
    opt.row_total = 20000.0;
    opt.counts = true;
    return coda::synthetic_compositions(opt);
}

inline double pick_detection_limit(const coda::CompositionMatrix& counts, double lo = 0.05,
                                   double hi = 0.10) {
    std::vector<double> flat(counts.values.data(), counts.values.data() + counts.values.size());
    std::sort(flat.begin(), flat.end());
    const double n = static_cast<double>(flat.size());
    double best = 0.0;
    for (std::size_t i = 0; i < flat.size();) {
        std::size_t j = i;
        while (j + 1 < flat.size() && flat[j + 1] == flat[i]) ++j;
        const double limit = flat[j] + 0.5; // zeroes everything <= flat[j]
        const double frac = static_cast<double>(j + 1) / n;
        if (frac > hi) break;
        if (frac >= lo) {
            bool alive = true;
            for (Index c = 0; c < counts.cols() && alive; ++c)
                if ((counts.values.col(c).array() >= limit).count() == 0) alive = false;
            if (alive) best = limit;
        }
        i = j + 1;
    }
    return best;
}

} // namespace oracles
