#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fvbs/errors.hpp"
#include "fvbs/sparse.hpp"

using namespace fvbs;

namespace {

SparseMatrix random_m_matrix(int n, std::mt19937_64& rng) {
    // diagonally dominant with nonpositive off-diagonals
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    std::vector<int> ri, ci;
    std::vector<double> v;
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k) {
            int j = static_cast<int>(rng() % n);
            if (j == i) continue;
            double a = uni(rng);
            ri.push_back(i);
            ci.push_back(j);
            v.push_back(-a);
            rowsum[i] += a;
        }
    for (int i = 0; i < n; ++i) {
        ri.push_back(i);
        ci.push_back(i);
        v.push_back(rowsum[i] + uni(rng));
    }
    return SparseMatrix::from_triplets(n, ri, ci, v);
}

}  // namespace

TEST_CASE("spmv identity and row sums") {
    auto I = SparseMatrix::identity(4);
    std::vector<double> x{1.0, -2.0, 3.0, 0.5};
    CHECK(spmv(I, x) == x);

    std::vector<int> ri{0, 0, 1, 1}, ci{0, 1, 0, 1};
    std::vector<double> v{2.0, -1.0, -1.0, 2.0};
    auto A = SparseMatrix::from_triplets(2, ri, ci, v);
    std::vector<double> ones{1.0, 1.0};
    auto y = spmv(A, ones);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("from_triplets sums duplicates and sorts columns") {
    std::vector<int> ri{0, 0, 0}, ci{1, 0, 1};
    std::vector<double> v{1.0, 3.0, 2.0};
    auto A = SparseMatrix::from_triplets(2, ri, ci, v);
    CHECK(A.coeff(0, 0) == 3.0);
    CHECK(A.coeff(0, 1) == 3.0);
    CHECK(A.coeff(1, 1) == 0.0);
    CHECK(A.nnz() == 2);
}

TEST_CASE("direct_solve trivial systems") {
    auto I = SparseMatrix::identity(3);
    std::vector<double> b{1.0, 2.0, 3.0};
    CHECK(direct_solve(I, b) == b);

    std::vector<int> one{0};
    std::vector<double> eight{8.0};
    auto A = SparseMatrix::from_triplets(1, one, one, eight);
    std::vector<double> rhs{8.0};
    auto x = direct_solve(A, rhs);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("direct_solve recovers manufactured solution on random M-matrix") {
    std::mt19937_64 rng(2024);
    auto A = random_m_matrix(50, rng);
    std::vector<double> xref(50);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : xref) v = uni(rng);
    auto b = spmv(A, xref);
    auto x = direct_solve(A, b);
    for (int i = 0; i < 50; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-10));
}

TEST_CASE("solve is deterministic") {
    std::mt19937_64 rng(7);
    auto A = random_m_matrix(30, rng);
    std::vector<double> b(30, 1.0);
    auto x1 = direct_solve(A, b);
    auto x2 = direct_solve(A, b);
    CHECK(x1 == x2);  // bitwise
}

TEST_CASE("singular matrix reports pivot column") {
    // second row is a multiple of the first
    std::vector<int> ri{0, 0, 1, 1}, ci{0, 1, 0, 1};
    std::vector<double> v{1.0, 2.0, 2.0, 4.0};
    auto A = SparseMatrix::from_triplets(2, ri, ci, v);
    std::vector<double> b{1.0, 1.0};
    CHECK_THROWS_AS(direct_solve(A, b), SingularMatrixError);
    try {
        direct_solve(A, b);
    } catch (const SingularMatrixError& e) {
        CHECK(e.column == 1);
    }
}

TEST_CASE("partial pivoting handles zero leading entry") {
    std::vector<int> ri{0, 1}, ci{1, 0};
    std::vector<double> v{1.0, 1.0};
    auto A = SparseMatrix::from_triplets(2, ri, ci, v);
    std::vector<double> b{3.0, 5.0};
    auto x = direct_solve(A, b);
    CHECK(x[0] == doctest::Approx(5.0));
    CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("MatrixMarket round trip") {
    std::mt19937_64 rng(11);
    auto A = random_m_matrix(12, rng);
    std::stringstream ss;
    write_matrix_market(ss, A);
    auto B = read_matrix_market(ss);
    REQUIRE(B.size() == A.size());
    REQUIRE(B.nnz() == A.nnz());
    CHECK(B.values() == A.values());
    CHECK(B.col_indices() == A.col_indices());
}
