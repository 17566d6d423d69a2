#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"
#include "chipower/rng.hpp"

namespace coda {

// Seeded generator of compositional test data: per-part log-normal
// intensities with controllable spread between common and rare parts.
struct SynthOptions {
    Index rows = 40;
    Index cols = 15;
    std::uint64_t seed = 0;
    double part_skew = 1.0;    // sd of the per-part log-mean; larger = more uneven parts
    double sample_noise = 0.5; // sd of the per-cell log deviation
    double row_total = 1000.0; // expected row sum before rounding
    bool counts = false;       // round to integers (clamped to >= 1)
    double zero_fraction = 0.0; // optional sparsity: zero the smallest cells
};

inline CompositionMatrix synthetic_compositions(const SynthOptions& opt) {
    if (opt.rows < 2 || opt.cols < 2) throw data_error("synth: need at least 2 rows and 2 parts");
    if (!(opt.part_skew >= 0.0) || !(opt.sample_noise >= 0.0))
        throw data_error("synth: skew and noise must be nonnegative");
    if (!(opt.row_total > 0.0)) throw data_error("synth: row total must be positive");
    if (!(opt.zero_fraction >= 0.0 && opt.zero_fraction < 1.0))
        throw data_error("synth: zero fraction must be in [0,1)");

    SeededRng part_rng = SeededRng::derive(opt.seed, 0, 0);
    Eigen::VectorXd part_mean(opt.cols);
    for (Index j = 0; j < opt.cols; ++j) part_mean(j) = opt.part_skew * part_rng.next_gaussian();

    Eigen::MatrixXd values(opt.rows, opt.cols);
    for (Index i = 0; i < opt.rows; ++i) {
        SeededRng row_rng = SeededRng::derive(opt.seed, 1, static_cast<std::uint64_t>(i));
        for (Index j = 0; j < opt.cols; ++j)
            values(i, j) = std::exp(part_mean(j) + opt.sample_noise * row_rng.next_gaussian());
        values.row(i) *= opt.row_total / values.row(i).sum();
    }

    if (opt.counts) {
        for (Index i = 0; i < opt.rows; ++i)
            for (Index j = 0; j < opt.cols; ++j)
                values(i, j) = std::max(1.0, std::floor(values(i, j) + 0.5));
    }

    if (opt.zero_fraction > 0.0) {
        std::vector<double> flat(values.data(), values.data() + values.size());
        std::sort(flat.begin(), flat.end());
        const std::size_t cut =
            static_cast<std::size_t>(opt.zero_fraction * static_cast<double>(flat.size()));
        if (cut > 0) {
            const double limit = flat[cut]; // entries strictly below become zero
            for (Index i = 0; i < opt.rows; ++i)
                for (Index j = 0; j < opt.cols; ++j)
                    if (values(i, j) < limit) values(i, j) = 0.0;
        }
    }

    std::vector<std::string> row_labels(static_cast<std::size_t>(opt.rows));
    std::vector<std::string> part_labels(static_cast<std::size_t>(opt.cols));
    for (Index i = 0; i < opt.rows; ++i) row_labels[static_cast<std::size_t>(i)] = "S" + std::to_string(i + 1);
    for (Index j = 0; j < opt.cols; ++j) part_labels[static_cast<std::size_t>(j)] = "P" + std::to_string(j + 1);
    return make_composition(std::move(values), std::move(row_labels), std::move(part_labels), false);
}

} // namespace coda
