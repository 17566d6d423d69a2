#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"
#include "chipower/procrustes.hpp"
#include "chipower/sampling.hpp"
#include "chipower/spectral.hpp"
#include "chipower/transforms.hpp"

namespace coda {

// Procrustes correlations between the chiPower sample geometry and the
// reference logratio geometry over a descending power grid.
struct IsometryScan {
    std::vector<double> lambdas;      // strictly decreasing
    std::vector<double> correlations; // same length
    double optimal_lambda = 0.0;      // grid point with the highest correlation
    double optimal_correlation = 0.0; // lowest lambda wins ties
};

// Grid 1.00, 0.99, ..., 0.01 (descending).
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(100);
    for (int k = 100; k >= 1; --k) grid.push_back(static_cast<double>(k) / 100.0);
    return grid;
}

namespace detail {

inline std::vector<double> normalize_grid(std::vector<double> grid) {
    if (grid.empty()) throw data_error("lambda grid is empty");
    for (double v : grid)
        if (!(v > 0.0 && v <= 1.0))
            throw data_error("lambda grid value " + std::to_string(v) + " outside (0,1]");
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Quantile with linear interpolation between order statistics (R type 7).
inline double quantile(std::vector<double> sorted_values, double q) {
    const std::size_t n = sorted_values.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double h = (static_cast<double>(n) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted_values[lo] + (h - static_cast<double>(lo)) * (sorted_values[hi] - sorted_values[lo]);
}

} // namespace detail

// Scans the power grid for the lambda whose chiPower geometry is closest to
// the reference logratio geometry. The two source matrices may differ: with
// data zeros, the chiPower side keeps them while the logratio side needs a
// zero-replaced version, and the scan then has an interior optimum instead of
// converging to 1.
inline IsometryScan isometry_scan(const CompositionMatrix& chipower_source,
                                  const CompositionMatrix& logratio_source,
                                  std::vector<double> lambdas) {
    if (chipower_source.rows() != logratio_source.rows())
        throw data_error("isometry_scan: sources have different row counts");
    IsometryScan scan;
    scan.lambdas = detail::normalize_grid(std::move(lambdas));
    const Eigen::MatrixXd reference = lra(logratio_source).row_principal;
    scan.correlations.reserve(scan.lambdas.size());
    for (std::size_t k = 0; k < scan.lambdas.size(); ++k) {
        const double lambda = scan.lambdas[k];
        const Eigen::MatrixXd candidate = pca(chipower(chipower_source, lambda)).row_principal;
        const double r = procrustes_correlation(reference, candidate);
        scan.correlations.push_back(r);
        if (k == 0 || r >= scan.optimal_correlation) { // >= so the lowest lambda wins ties
            scan.optimal_correlation = r;
            scan.optimal_lambda = lambda;
        }
    }
    return scan;
}

struct RefinedOptimum {
    double lambda = 0.0;
    double correlation = 0.0;
};

// Golden-section refinement of the scan optimum between its grid neighbors.
// Assumes the profile is locally unimodal; if the search cannot improve on
// the grid optimum, the grid optimum is returned unchanged.
inline RefinedOptimum refine_optimal_lambda(const CompositionMatrix& chipower_source,
                                            const CompositionMatrix& logratio_source,
                                            const IsometryScan& scan, double tolerance) {
    if (!(tolerance > 0.0)) throw data_error("refine tolerance must be positive");
    RefinedOptimum best{scan.optimal_lambda, scan.optimal_correlation};

    const auto it = std::find(scan.lambdas.begin(), scan.lambdas.end(), scan.optimal_lambda);
    const std::size_t i = static_cast<std::size_t>(it - scan.lambdas.begin());
    // descending grid: neighbor above at i-1, below at i+1
    const double hi = i > 0 ? scan.lambdas[i - 1] : scan.lambdas[i];
    const double lo = i + 1 < scan.lambdas.size() ? scan.lambdas[i + 1] : scan.lambdas[i];
    if (hi - lo <= tolerance) return best;

    const Eigen::MatrixXd reference = lra(logratio_source).row_principal;
    const auto evaluate = [&](double lambda) {
        const double r = procrustes_correlation(
            reference, pca(chipower(chipower_source, lambda)).row_principal);
        if (r > best.correlation) best = {lambda, r};
        return r;
    };

    constexpr double inv_phi = 0.6180339887498949; // (sqrt(5)-1)/2
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = evaluate(x1);
    double f2 = evaluate(x2);
    while (b - a > tolerance) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = evaluate(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = evaluate(x2);
        }
    }
    return best;
}

// One subcomposition replicate of a coherence assessment. Failed replicates
// (for example a part that is zero in every sample of the subcomposition)
// carry the reason and are excluded from summaries.
struct CoherenceReplicate {
    std::size_t fraction_index = 0;
    std::size_t replicate_index = 0;
    std::vector<Index> parts;
    double correlation = 0.0;
    bool failed = false;
    std::string failure_reason;
};

struct CoherenceFractionSummary {
    double fraction = 0.0;
    Index size = 0;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct CoherenceReport {
    std::string geometry;             // "chipower" or "raw-composition"
    std::optional<double> lambda;     // chiPower power, when applicable
    std::uint64_t seed = 0;
    std::vector<CoherenceReplicate> replicates;
    std::vector<CoherenceFractionSummary> summaries;
};

namespace detail {

// Shared driver: `part_geometry` maps a composition matrix to the column
// principal coordinates whose subcomposition stability is being measured.
template <typename PartGeometry>
inline CoherenceReport coherence_driver(const CompositionMatrix& m, const SubcompositionPlan& plan,
                                        PartGeometry&& part_geometry, std::string geometry_name,
                                        std::optional<double> lambda) {
    CoherenceReport report;
    report.geometry = std::move(geometry_name);
    report.lambda = lambda;
    report.seed = plan.seed;

    const Eigen::MatrixXd full_geometry = part_geometry(m);
    const auto sets = sample_subcompositions(m, plan);

    std::size_t set_idx = 0;
    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
        std::vector<double> correlations;
        std::size_t n_failed = 0;
        for (std::size_t rep = 0; rep < plan.replicates_per_fraction; ++rep, ++set_idx) {
            CoherenceReplicate out;
            out.fraction_index = fi;
            out.replicate_index = rep;
            out.parts = sets[set_idx];
            try {
                const CompositionMatrix sub = subcomposition(m, out.parts);
                const Eigen::MatrixXd sub_geometry = part_geometry(sub);
                Eigen::MatrixXd full_subset(static_cast<Index>(out.parts.size()),
                                            full_geometry.cols());
                for (std::size_t k = 0; k < out.parts.size(); ++k)
                    full_subset.row(static_cast<Index>(k)) = full_geometry.row(out.parts[k]);
                out.correlation = procrustes_correlation(sub_geometry, full_subset);
                correlations.push_back(out.correlation);
            } catch (const std::exception& e) {
                out.failed = true;
                out.failure_reason = e.what();
                ++n_failed;
            }
            report.replicates.push_back(std::move(out));
        }
        CoherenceFractionSummary summary;
        summary.fraction = plan.fractions[fi];
        summary.size = subcomposition_size(plan.fractions[fi], m.cols());
        summary.n_ok = correlations.size();
        summary.n_failed = n_failed;
        if (!correlations.empty()) {
            std::sort(correlations.begin(), correlations.end());
            summary.min = correlations.front();
            summary.q1 = quantile(correlations, 0.25);
            summary.median = quantile(correlations, 0.5);
            summary.q3 = quantile(correlations, 0.75);
            summary.max = correlations.back();
        }
        report.summaries.push_back(summary);
    }
    return report;
}

} // namespace detail

// Subcompositional coherence of the chiPower transformation: the part
// geometry (column principal coordinates of the PCA of the chiPowered data)
// of every sampled subcomposition is Procrustes-compared with the geometry of
// the same parts in the full composition.
inline CoherenceReport coherence_assessment(const CompositionMatrix& m, double lambda,
                                            const SubcompositionPlan& plan) {
    return detail::coherence_driver(
        m, plan, [lambda](const CompositionMatrix& x) { return pca(chipower(x, lambda)).col_principal; },
        "chipower", lambda);
}

// Same protocol with no transformation at all: part geometry from the PCA of
// the closed compositions. The baseline the chiPower coherence is judged
// against.
inline CoherenceReport raw_coherence_baseline(const CompositionMatrix& m,
                                              const SubcompositionPlan& plan) {
    return detail::coherence_driver(
        m, plan, [](const CompositionMatrix& x) { return pca(close_rows(x).values).col_principal; },
        "raw-composition", std::nullopt);
}

// Upper-triangle pairing of two distance matrices plus the summary statistics
// for a distance-vs-distance scatter: Pearson correlation and the
// least-squares slope of d2 on d1 through the origin.
struct DistanceComparison {
    std::vector<double> d1; // upper-triangle entries, row-major
    std::vector<double> d2;
    double pearson = 0.0;
    double slope = 0.0;
};

inline DistanceComparison distance_comparison(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2) {
    if (d1.rows() != d2.rows() || d1.cols() != d2.cols())
        throw data_error("distance_comparison: dimension mismatch");
    if (d1.rows() != d1.cols()) throw data_error("distance_comparison: matrices must be square");
    DistanceComparison cmp;
    const Index n = d1.rows();
    cmp.d1.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    cmp.d2.reserve(cmp.d1.capacity());
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            cmp.d1.push_back(d1(i, j));
            cmp.d2.push_back(d2(i, j));
        }
    const auto v1 = Eigen::Map<const Eigen::VectorXd>(cmp.d1.data(), static_cast<Index>(cmp.d1.size()));
    const auto v2 = Eigen::Map<const Eigen::VectorXd>(cmp.d2.data(), static_cast<Index>(cmp.d2.size()));
    const Eigen::VectorXd c1 = v1.array() - v1.mean();
    const Eigen::VectorXd c2 = v2.array() - v2.mean();
    const double denom = c1.norm() * c2.norm();
    cmp.pearson = denom > 0.0 ? c1.dot(c2) / denom : 1.0;
    const double ss1 = v1.squaredNorm();
    cmp.slope = ss1 > 0.0 ? v1.dot(v2) / ss1 : 0.0;
    return cmp;
}

} // namespace coda
