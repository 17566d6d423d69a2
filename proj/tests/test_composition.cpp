#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "chipower/composition.hpp"
#include "chipower/io.hpp"
#include "chipower/sampling.hpp"
#include "support/oracles.hpp"

using namespace coda;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Index>(rows.size()),
                      static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("load_matrix reads counts back verbatim") {
    const auto path = write_temp("counts.csv", "A,B\n2,3\n1,1\n4,0\n");
    const LoadResult r = load_matrix(path);
    REQUIRE(r.matrix.rows() == 3);
    REQUIRE(r.matrix.cols() == 2);
    CHECK(r.matrix.values == mat({{2, 3}, {1, 1}, {4, 0}}));
    CHECK_FALSE(r.matrix.closed);
    CHECK(r.matrix.part_labels == std::vector<std::string>{"A", "B"});
    CHECK_FALSE(r.response.has_value());
}

TEST_CASE("load_matrix auto-detects tab delimiter and row labels") {
    const auto path = write_temp("counts.tsv", "id\tA\tB\ns1\t1\t2\ns2\t3\t4\n");
    LoadOptions opt;
    opt.has_row_labels = true;
    const LoadResult r = load_matrix(path, opt);
    CHECK(r.matrix.row_labels == std::vector<std::string>{"s1", "s2"});
    CHECK(r.matrix.values(1, 1) == 4.0);
}

TEST_CASE("load_matrix errors carry file coordinates") {
    const auto neg = write_temp("neg.csv", "A,B\n1,2\n3,-4\n");
    CHECK_THROWS_MATCHES(load_matrix(neg), data_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("row 3") &&
                                                         ContainsSubstring("column 2")));
    const auto bad = write_temp("bad.csv", "A,B\n1,2\nx,4\n");
    CHECK_THROWS_AS(load_matrix(bad), data_error);
    const auto dup = write_temp("dup.csv", "A,A\n1,2\n3,4\n");
    CHECK_THROWS_MATCHES(load_matrix(dup), data_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate")));
    const auto missing = write_temp("missing.csv", "A,B\n1,\n3,4\n");
    CHECK_THROWS_AS(load_matrix(missing), data_error);
    CHECK_THROWS_AS(load_matrix("/nonexistent/file.csv"), data_error);
}

TEST_CASE("load_matrix extracts a binary response column") {
    const auto path = write_temp("resp.csv", "A,B,group\n1,2,no\n3,4,CD\n5,6,no\n");
    LoadOptions opt;
    opt.response_column = "group";
    const LoadResult r = load_matrix(path, opt);
    REQUIRE(r.response.has_value());
    // lexicographically larger value maps to 1
    CHECK(*r.positive_label == "no");
    CHECK((*r.response)(0) == 1.0);
    CHECK((*r.response)(1) == 0.0);
    CHECK(r.matrix.cols() == 2);

    opt.positive_label = "CD";
    const LoadResult flipped = load_matrix(path, opt);
    CHECK((*flipped.response)(1) == 1.0);

    LoadOptions missing_opt;
    missing_opt.response_column = "nope";
    CHECK_THROWS_MATCHES(load_matrix(path, missing_opt), data_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("nope")));
}

TEST_CASE("numeric 0/1 responses map directly") {
    const auto path = write_temp("resp01.csv", "A,B,y\n1,2,0\n3,4,1\n");
    LoadOptions opt;
    opt.response_column = "y";
    const LoadResult r = load_matrix(path, opt);
    CHECK((*r.response)(0) == 0.0);
    CHECK((*r.response)(1) == 1.0);
}

TEST_CASE("close_rows divides by row sums") {
    auto m = make_composition(mat({{2, 3, 5}, {1, 1, 2}}));
    const auto closed = close_rows(m);
    CHECK(closed.values.row(0).isApprox(Eigen::RowVector3d{0.2, 0.3, 0.5}, 1e-15));
    CHECK(closed.closed);

    // already-closed input is returned unchanged
    const auto again = close_rows(closed);
    CHECK(again.values == closed.values);

    const auto two = close_rows(make_composition(mat({{1, 1}, {3, 1}})));
    CHECK(two.values == mat({{0.5, 0.5}, {0.75, 0.25}}));
}

TEST_CASE("close_rows idempotence is exact") {
    auto m = oracles::random_positive(9, 6, 321);
    const auto once = close_rows(m);
    const auto twice = close_rows(once);
    CHECK(once.values == twice.values); // bitwise
}

TEST_CASE("close_rows rejects an all-zero row") {
    CHECK_THROWS_MATCHES(close_rows(make_composition(mat({{1, 2}, {0, 0}}))), data_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("'2'")));
}

TEST_CASE("subcomposition restricts and re-closes") {
    const auto m = close_rows(make_composition(mat({{2, 3, 5}, {1, 1, 2}})));
    const auto sub = subcomposition(m, {0, 1});
    CHECK(sub.values(0, 0) == Catch::Approx(0.4).margin(1e-15));
    CHECK(sub.values(0, 1) == Catch::Approx(0.6).margin(1e-15));
    CHECK(sub.part_labels == std::vector<std::string>{"P1", "P2"});

    // full part set is identical to plain closure
    const auto full = subcomposition(m, {0, 1, 2});
    CHECK((full.values - m.values).cwiseAbs().maxCoeff() < 1e-15);

    // zero entries are retained through reclosure
    const auto z = subcomposition(
        make_composition(mat({{0.5, 0.5, 0.0}, {0.25, 0.25, 0.5}}), true), {1, 2});
    CHECK(z.values(0, 0) == 1.0);
    CHECK(z.values(0, 1) == 0.0);
}

TEST_CASE("subcomposition rejects bad part sets") {
    const auto m = make_composition(mat({{1, 2, 3}, {4, 5, 6}}));
    CHECK_THROWS_AS(subcomposition(m, {1}), data_error);
    CHECK_THROWS_AS(subcomposition(m, {}), data_error);
    CHECK_THROWS_AS(subcomposition(m, {1, 1}), data_error);
    CHECK_THROWS_AS(subcomposition(m, {1, 7}), data_error);
    // row that loses all its mass
    const auto sparse = make_composition(mat({{1, 0, 0}, {1, 1, 1}}));
    CHECK_THROWS_MATCHES(subcomposition(sparse, {1, 2}), data_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("'1'")));
}

TEST_CASE("inject_zeros applies a strict detection limit") {
    const auto m = make_composition(mat({{19, 20}, {5, 100}}));
    const auto injected = inject_zeros(m, 20);
    CHECK(injected.matrix.values == mat({{0, 20}, {0, 100}}));
    CHECK(injected.cells_zeroed == 2);

    const auto nothing = inject_zeros(m, 0);
    CHECK(nothing.matrix.values == m.values);
    CHECK(nothing.cells_zeroed == 0);

    CHECK_THROWS_AS(inject_zeros(close_rows(m), 0.5), data_error);
}

TEST_CASE("inject_zeros never increases entries") {
    const auto m = oracles::sparse_counts(5, 20, 30);
    const auto injected = inject_zeros(m, 3.0);
    CHECK((injected.matrix.values.array() <= m.values.array()).all());
}

TEST_CASE("zero strategies") {
    const auto m = make_composition(mat({{0, 2}, {1, 3}}));
    const auto added = apply_zero_strategy(m, ZeroStrategy::add_constant(1.0));
    CHECK(added.values == mat({{1, 3}, {2, 4}}));

    const auto replaced = apply_zero_strategy(m, ZeroStrategy::replace_zeros(0.5));
    CHECK(replaced.values == mat({{0.5, 2}, {1, 3}}));

    const auto untouched = apply_zero_strategy(m, ZeroStrategy::none());
    CHECK(untouched.values == m.values);

    CHECK_THROWS_AS(apply_zero_strategy(m, ZeroStrategy::add_constant(0.0)), data_error);
}

TEST_CASE("sample_subcompositions is deterministic") {
    SubcompositionPlan plan;
    plan.fractions = {0.5};
    plan.replicates_per_fraction = 3;
    plan.seed = 42;
    const auto a = sample_subcompositions(10, plan);
    const auto b = sample_subcompositions(10, plan);
    REQUIRE(a.size() == 3);
    CHECK(a == b);
    for (const auto& set : a) CHECK(set.size() == 5);
}

TEST_CASE("sample_subcompositions forced full set") {
    SubcompositionPlan plan;
    plan.fractions = {1.0};
    plan.replicates_per_fraction = 1;
    plan.must_include = {0, 1, 2, 3};
    const auto sets = sample_subcompositions(4, plan);
    CHECK(sets[0] == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("sample_subcompositions covers the model-plus-extras range") {
    // 14 forced parts out of 48, 1 to 33 additional: sizes 15..47
    SubcompositionPlan plan;
    plan.seed = 7;
    plan.replicates_per_fraction = 2;
    std::vector<Index> must(14);
    for (Index i = 0; i < 14; ++i) must[static_cast<std::size_t>(i)] = i;
    plan.must_include = must;
    for (Index size = 15; size <= 47; ++size)
        plan.fractions.push_back(static_cast<double>(size) / 48.0);
    const auto sets = sample_subcompositions(48, plan);
    REQUIRE(sets.size() == 33 * 2);
    for (std::size_t k = 0; k < sets.size(); ++k) {
        CHECK(sets[k].size() == 15 + k / 2);
        for (Index part : must)
            CHECK(std::find(sets[k].begin(), sets[k].end(), part) != sets[k].end());
    }
}

TEST_CASE("sample_subcompositions rejects impossible plans") {
    SubcompositionPlan plan;
    plan.fractions = {0.2};
    plan.must_include = {0, 1, 2, 3, 4};
    CHECK_THROWS_AS(sample_subcompositions(10, plan), data_error); // size 2 < 5 forced

    SubcompositionPlan tiny;
    tiny.fractions = {0.05};
    CHECK_THROWS_AS(sample_subcompositions(10, tiny), data_error); // size < 2

    SubcompositionPlan unordered;
    unordered.fractions = {0.5, 0.3};
    CHECK_THROWS_AS(sample_subcompositions(10, unordered), data_error);
}

TEST_CASE("composition invariants are enforced") {
    CHECK_THROWS_AS(make_composition(mat({{1, -2}, {3, 4}})), data_error);
    CHECK_THROWS_AS(make_composition(mat({{1, 2}})), data_error);
    CHECK_THROWS_AS(make_composition(mat({{0.5, 0.6}, {0.5, 0.5}}), true), data_error);
    CHECK_THROWS_AS(
        make_composition(mat({{1, 2}, {3, 4}}), {"r1", "r2"}, {"same", "same"}, false),
        data_error);
}
