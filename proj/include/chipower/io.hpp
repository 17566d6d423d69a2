#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"

namespace coda {

// Shortest decimal representation that round-trips the double exactly,
// capped at 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x || x != x) break; // NaN never round-trips; take the first form
    }
    return buf;
}

struct LoadOptions {
    bool has_row_labels = false;
    std::optional<std::string> response_column;
    // Response label mapped to 1. Default: the lexicographically larger of
    // the two distinct values maps to 1 (so "0"/"1" behave as expected).
    std::optional<std::string> positive_label;
};

struct LoadResult {
    CompositionMatrix matrix; // unclosed; raw values preserved
    std::optional<Eigen::VectorXd> response;
    std::optional<std::string> positive_label; // value that was mapped to 1
};

namespace detail {

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, delim)) fields.push_back(cur);
    if (!line.empty() && line.back() == delim) fields.emplace_back();
    return fields;
}

inline double parse_cell(const std::string& field, std::size_t file_row, std::size_t file_col) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end)
        throw data_error("missing cell at row " + std::to_string(file_row) + ", column " +
                         std::to_string(file_col));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw data_error("cannot parse numeric cell '" + std::string(begin, end) + "' at row " +
                         std::to_string(file_row) + ", column " + std::to_string(file_col));
    return value;
}

} // namespace detail

// Delimited text loader. Comma or tab is auto-detected from the header row;
// the header names the parts. Rows/columns in error messages are 1-based
// file coordinates (header = row 1).
inline LoadResult load_matrix(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw data_error("file '" + path + "' is empty");
    detail::strip_cr(line);
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';

    std::vector<std::string> header = detail::split_fields(line, delim);
    if (options.has_row_labels) {
        if (header.empty()) throw data_error("header row has no fields");
        header.erase(header.begin());
    }

    std::optional<std::size_t> response_idx;
    if (options.response_column) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == *options.response_column) response_idx = j;
        if (!response_idx)
            throw data_error("response column '" + *options.response_column + "' not found in header");
    }

    std::vector<std::string> part_labels;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (!response_idx || j != *response_idx) part_labels.push_back(header[j]);
    if (part_labels.size() < 2)
        throw data_error("need at least 2 part columns, got " + std::to_string(part_labels.size()));

    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> response_raw;
    std::size_t file_row = 1;
    while (std::getline(in, line)) {
        ++file_row;
        detail::strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_fields(line, delim);
        std::size_t col0 = 0;
        if (options.has_row_labels) {
            if (fields.empty())
                throw data_error("row " + std::to_string(file_row) + " has no fields");
            row_labels.push_back(fields[0]);
            col0 = 1;
        } else {
            row_labels.push_back(std::to_string(file_row - 1));
        }
        const std::size_t expected = header.size() + col0;
        if (fields.size() != expected)
            throw data_error("row " + std::to_string(file_row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(expected));
        std::vector<double> data_row;
        data_row.reserve(part_labels.size());
        for (std::size_t j = col0; j < fields.size(); ++j) {
            if (response_idx && j - col0 == *response_idx) {
                response_raw.push_back(fields[j]);
                continue;
            }
            const double v = detail::parse_cell(fields[j], file_row, j + 1);
            if (v < 0.0)
                throw data_error("negative value " + fields[j] + " at row " +
                                 std::to_string(file_row) + ", column " + std::to_string(j + 1));
            data_row.push_back(v);
        }
        rows.push_back(std::move(data_row));
    }
    if (rows.size() < 2) throw data_error("need at least 2 data rows, got " + std::to_string(rows.size()));

    Eigen::MatrixXd values(static_cast<Index>(rows.size()), static_cast<Index>(part_labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];

    LoadResult result;
    result.matrix = make_composition(std::move(values), std::move(row_labels),
                                     std::move(part_labels), /*closed=*/false);

    if (response_idx) {
        std::vector<std::string> distinct;
        for (const auto& v : response_raw)
            if (std::find(distinct.begin(), distinct.end(), v) == distinct.end())
                distinct.push_back(v);
        if (distinct.size() != 2)
            throw data_error("response column must contain exactly 2 distinct values, found " +
                             std::to_string(distinct.size()));
        std::string positive = std::max(distinct[0], distinct[1]);
        if (options.positive_label) {
            if (*options.positive_label != distinct[0] && *options.positive_label != distinct[1])
                throw data_error("positive label '" + *options.positive_label +
                                 "' does not occur in the response column");
            positive = *options.positive_label;
        }
        Eigen::VectorXd y(static_cast<Index>(response_raw.size()));
        for (std::size_t i = 0; i < response_raw.size(); ++i)
            y(static_cast<Index>(i)) = response_raw[i] == positive ? 1.0 : 0.0;
        result.response = std::move(y);
        result.positive_label = positive;
    }
    return result;
}

// Writes a labeled matrix as delimited text; numeric cells keep round-trip
// fidelity (up to 17 significant digits).
inline void write_matrix(const std::string& path, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& row_labels,
                         const std::vector<std::string>& col_labels, char delim = ',') {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open output file '" + path + "'");
    out << "id";
    for (const auto& c : col_labels) out << delim << c;
    out << '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        out << row_labels[static_cast<std::size_t>(i)];
        for (Index j = 0; j < values.cols(); ++j) out << delim << format_double(values(i, j));
        out << '\n';
    }
    if (!out.good()) throw data_error("failed writing '" + path + "'");
}

} // namespace coda
