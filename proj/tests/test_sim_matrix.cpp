#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "topomorph/sim_matrix.hpp"

using namespace topomorph;

TEST_CASE("pair_index enumerates canonical pairs in order") {
    const std::uint32_t n = 5;
    std::uint64_t expect = 0;
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b) CHECK(SimilarityMatrix::pair_index(n, a, b) == expect++);
    CHECK(expect == 10);
    CHECK(SimilarityMatrix::pair_index(n, 3, 1) == SimilarityMatrix::pair_index(n, 1, 3));
}

TEST_CASE("insert, contains, fill tracking") {
    SimilarityMatrix m(4);
    CHECK(m.total_pairs() == 6);
    CHECK_FALSE(m.complete());
    m.insert(2, 0, 0.5);
    CHECK(m.contains(0, 2));
    CHECK(m.at(0, 2) == 0.5);
    CHECK(m.at(2, 0) == 0.5);
    CHECK(m.row_fill(0) == 1);
    CHECK(m.row_fill(2) == 1);
    CHECK(m.row_fill(1) == 0);
    CHECK(m.fill() == 1);
    CHECK_THROWS_AS(m.insert(0, 2, 0.7), std::logic_error);
    CHECK_THROWS_AS(m.insert(1, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m.at(0, 1), std::runtime_error);
    CHECK(m.missing_in_row(0) == std::vector<NodeId>{1, 3});
}

TEST_CASE("single-node matrix is trivially complete") {
    SimilarityMatrix m(1);
    CHECK(m.complete());
    CHECK(m.total_pairs() == 0);
}

TEST_CASE("dense rows: zero diagonal, symmetric, mean imputation") {
    SimilarityMatrix m(3);
    m.insert(0, 1, 1.0);
    m.insert(0, 2, 3.0);
    // (1,2) absent; global mean of known entries = 2.0
    const auto rows = m.dense_rows(true);
    CHECK(rows[0 * 3 + 0] == 0.0);
    CHECK(rows[0 * 3 + 1] == 1.0);
    CHECK(rows[1 * 3 + 0] == 1.0);
    CHECK(rows[1 * 3 + 2] == 2.0);
    CHECK(rows[2 * 3 + 1] == 2.0);
    CHECK_THROWS_AS(m.dense_rows(false), std::runtime_error);
    m.insert(1, 2, 7.0);
    CHECK(m.complete());
    CHECK_NOTHROW(m.dense_rows(false));
}

TEST_CASE("binary dump/load round-trips values and presence") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "topomorph_matrix_test.bin").string();
    SimilarityMatrix m(4);
    m.insert(0, 1, 0.25);
    m.insert(2, 3, -1.5);
    m.dump(path);
    const SimilarityMatrix back = SimilarityMatrix::load(path);
    CHECK(back.node_count() == 4);
    CHECK(back.fill() == 2);
    CHECK(back.at(0, 1) == 0.25);
    CHECK(back.at(2, 3) == -1.5);
    CHECK_FALSE(back.contains(0, 2));
    std::remove(path.c_str());
}
