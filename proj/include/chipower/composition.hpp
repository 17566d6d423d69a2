#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chipower/error.hpp"

namespace coda {

using Eigen::Index;

// Samples-by-parts matrix of nonnegative values. Raw counts and closed
// compositions share this type; `closed` records whether every row has been
// normalized to sum 1, and each pipeline stage states which form it expects.
struct CompositionMatrix {
    Eigen::MatrixXd values;               // I x J, entries >= 0
    std::vector<std::string> row_labels;  // size I
    std::vector<std::string> part_labels; // size J
    bool closed = false;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

constexpr double kClosureTolerance = 1e-12;

// Constant-based zero handling. Model-based imputation is done externally;
// pre-replaced matrices are simply loaded as data.
struct ZeroStrategy {
    enum class Kind { add_constant, replace_zeros, none };
    Kind kind = Kind::none;
    double delta = 0.0;

    static ZeroStrategy add_constant(double delta) { return {Kind::add_constant, delta}; }
    static ZeroStrategy replace_zeros(double delta) { return {Kind::replace_zeros, delta}; }
    static ZeroStrategy none() { return {Kind::none, 0.0}; }
};

namespace detail {

inline std::string cell_name(const CompositionMatrix& m, Index i, Index j) {
    return "row '" + m.row_labels[static_cast<std::size_t>(i)] + "' (index " + std::to_string(i) +
           "), part '" + m.part_labels[static_cast<std::size_t>(j)] + "' (index " + std::to_string(j) + ")";
}

} // namespace detail

// Checks the CompositionMatrix invariants; throws data_error on violation.
inline void validate(const CompositionMatrix& m) {
    const Index n_rows = m.rows();
    const Index n_cols = m.cols();
    if (n_rows < 2 || n_cols < 2)
        throw data_error("composition matrix must have at least 2 rows and 2 parts, got " +
                         std::to_string(n_rows) + "x" + std::to_string(n_cols));
    if (static_cast<Index>(m.row_labels.size()) != n_rows)
        throw data_error("row label count does not match row count");
    if (static_cast<Index>(m.part_labels.size()) != n_cols)
        throw data_error("part label count does not match part count");
    for (Index i = 0; i < n_rows; ++i)
        for (Index j = 0; j < n_cols; ++j)
            if (!(m.values(i, j) >= 0.0))
                throw data_error("negative or non-finite value at " + detail::cell_name(m, i, j));
    std::set<std::string> seen;
    for (const auto& label : m.part_labels)
        if (!seen.insert(label).second)
            throw data_error("duplicate part label '" + label + "'");
    if (m.closed) {
        for (Index i = 0; i < n_rows; ++i) {
            const double s = m.values.row(i).sum();
            if (std::abs(s - 1.0) > kClosureTolerance)
                throw data_error("matrix flagged closed but row '" +
                                 m.row_labels[static_cast<std::size_t>(i)] + "' sums to " +
                                 std::to_string(s));
        }
    }
}

inline CompositionMatrix make_composition(Eigen::MatrixXd values,
                                          std::vector<std::string> row_labels,
                                          std::vector<std::string> part_labels,
                                          bool closed = false) {
    CompositionMatrix m{std::move(values), std::move(row_labels), std::move(part_labels), closed};
    validate(m);
    return m;
}

// Convenience for tests and demos: labels generated as 1..I / P1..PJ.
inline CompositionMatrix make_composition(Eigen::MatrixXd values, bool closed = false) {
    std::vector<std::string> rows(static_cast<std::size_t>(values.rows()));
    std::vector<std::string> parts(static_cast<std::size_t>(values.cols()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = std::to_string(i + 1);
    for (std::size_t j = 0; j < parts.size(); ++j) parts[j] = "P" + std::to_string(j + 1);
    return make_composition(std::move(values), std::move(rows), std::move(parts), closed);
}

// Divide each row by its sum so rows sum to 1. Idempotent: a matrix already
// flagged closed is returned unchanged, bit for bit.
inline CompositionMatrix close_rows(const CompositionMatrix& m) {
    if (m.closed) return m;
    CompositionMatrix out = m;
    for (Index i = 0; i < m.rows(); ++i) {
        const double s = m.values.row(i).sum();
        if (s <= 0.0)
            throw data_error("cannot close row '" + m.row_labels[static_cast<std::size_t>(i)] +
                             "' (index " + std::to_string(i) + "): all entries are zero");
        out.values.row(i) /= s;
    }
    out.closed = true;
    return out;
}

// Restrict to the given parts and re-close the rows. Indices are 0-based,
// must be distinct, and at least two parts are required.
inline CompositionMatrix subcomposition(const CompositionMatrix& m, std::vector<Index> parts) {
    std::sort(parts.begin(), parts.end());
    if (parts.size() < 2)
        throw data_error("subcomposition needs at least 2 parts, got " + std::to_string(parts.size()));
    if (std::adjacent_find(parts.begin(), parts.end()) != parts.end())
        throw data_error("subcomposition part indices must be distinct");
    if (parts.front() < 0 || parts.back() >= m.cols())
        throw data_error("subcomposition part index out of range [0," + std::to_string(m.cols() - 1) + "]");

    CompositionMatrix sub;
    sub.values.resize(m.rows(), static_cast<Index>(parts.size()));
    sub.row_labels = m.row_labels;
    sub.part_labels.reserve(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        sub.values.col(static_cast<Index>(k)) = m.values.col(parts[k]);
        sub.part_labels.push_back(m.part_labels[static_cast<std::size_t>(parts[k])]);
    }
    sub.closed = false;
    return close_rows(sub); // errors on rows that end up all-zero
}

struct ZeroInjection {
    CompositionMatrix matrix;
    Index cells_zeroed = 0; // cells below the limit (zero after injection)
};

// Simulate a detection limit on a raw count matrix: entries strictly below
// the limit become 0.
inline ZeroInjection inject_zeros(const CompositionMatrix& m, double detection_limit) {
    if (m.closed) throw data_error("inject_zeros expects raw counts, not a closed matrix");
    if (!(detection_limit >= 0.0)) throw data_error("detection limit must be nonnegative");
    ZeroInjection out{m, 0};
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (m.values(i, j) < detection_limit) {
                out.matrix.values(i, j) = 0.0;
                ++out.cells_zeroed;
            }
    return out;
}

inline CompositionMatrix apply_zero_strategy(const CompositionMatrix& m, const ZeroStrategy& s) {
    if (m.closed) throw data_error("apply_zero_strategy expects raw counts, not a closed matrix");
    switch (s.kind) {
        case ZeroStrategy::Kind::none:
            return m;
        case ZeroStrategy::Kind::add_constant: {
            if (!(s.delta > 0.0)) throw data_error("zero strategy delta must be > 0");
            CompositionMatrix out = m;
            out.values.array() += s.delta;
            return out;
        }
        case ZeroStrategy::Kind::replace_zeros: {
            if (!(s.delta > 0.0)) throw data_error("zero strategy delta must be > 0");
            CompositionMatrix out = m;
            for (Index i = 0; i < m.rows(); ++i)
                for (Index j = 0; j < m.cols(); ++j)
                    if (out.values(i, j) == 0.0) out.values(i, j) = s.delta;
            return out;
        }
    }
    throw data_error("unknown zero strategy");
}

inline Index count_zeros(const CompositionMatrix& m) {
    Index n = 0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (m.values(i, j) == 0.0) ++n;
    return n;
}

} // namespace coda
