#ifndef FVBS_SPARSE_HPP
#define FVBS_SPARSE_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fvbs {

/// Square sparse matrix in compressed-row storage with sorted, unique
/// column indices per row.
class SparseMatrix {
public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(int n, std::span<const int> rows,
                                      std::span<const int> cols,
                                      std::span<const double> vals);
    static SparseMatrix identity(int n);

    int size() const { return n_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry lookup by binary search; zero if not stored.
    double coeff(int i, int j) const;

    /// max_i sum_j |a_ij|
    double norm_inf() const;

private:
    int n_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

/// y = A x with deterministic (ascending column) summation order.
std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x);

/// Sparse LU factorization with partial pivoting (deterministic: largest
/// pivot magnitude, ties broken by smallest row index).
class SparseLU {
public:
    explicit SparseLU(const SparseMatrix& A);

    std::vector<double> solve(std::span<const double> b) const;

private:
    int n_ = 0;
    // Row-wise U factor in pivoted order plus the multipliers applied to
    // each pivot row, replayed on the right-hand side at solve time.
    struct ElimStep {
        int target_row;
        double factor;
    };
    std::vector<std::vector<std::pair<int, double>>> urows_;  // per pivot k
    std::vector<std::vector<ElimStep>> steps_;                // per pivot k
    std::vector<int> pivot_rows_;                             // perm: pivot k <- original row
};

/// Solves A x = b and verifies the residual contract
/// ||Ax-b||_inf <= 1e-12 (||b||_inf + ||A||_inf ||x||_inf).
std::vector<double> direct_solve(const SparseMatrix& A, std::span<const double> b);

double norm_inf(std::span<const double> v);

// MatrixMarket coordinate format (general real).
void write_matrix_market(std::ostream& out, const SparseMatrix& A);
void write_matrix_market(const std::string& path, const SparseMatrix& A);
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

void write_vector(const std::string& path, std::span<const double> v);

}  // namespace fvbs

#endif
