#include "fvbs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "fvbs/errors.hpp"

namespace fvbs {

SparseMatrix SparseMatrix::from_triplets(int n, std::span<const int> rows,
                                         std::span<const int> cols,
                                         std::span<const double> vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw std::invalid_argument("from_triplets: size mismatch");
    std::vector<std::map<int, double>> acc(n);
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= n || cols[k] < 0 || cols[k] >= n)
            throw std::invalid_argument("from_triplets: index out of range");
        acc[rows[k]][cols[k]] += vals[k];
    }
    SparseMatrix A;
    A.n_ = n;
    A.row_offsets_.assign(1, 0);
    A.row_offsets_.reserve(n + 1);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, v] : acc[i]) {
            A.col_indices_.push_back(j);
            A.values_.push_back(v);
        }
        A.row_offsets_.push_back(static_cast<int>(A.col_indices_.size()));
    }
    return A;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<int> idx(n);
    std::vector<double> ones(n, 1.0);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return from_triplets(n, idx, idx, ones);
}

double SparseMatrix::coeff(int i, int j) const {
    auto first = col_indices_.begin() + row_offsets_[i];
    auto last = col_indices_.begin() + row_offsets_[i + 1];
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[it - col_indices_.begin()];
}

double SparseMatrix::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += std::abs(values_[k]);
        best = std::max(best, s);
    }
    return best;
}

std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x) {
    if (static_cast<int>(x.size()) != A.size())
        throw std::invalid_argument("spmv: dimension mismatch");
    std::vector<double> y(A.size(), 0.0);
    const auto& off = A.row_offsets();
    const auto& col = A.col_indices();
    const auto& val = A.values();
    for (int i = 0; i < A.size(); ++i) {
        double s = 0.0;
        for (int k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
    return y;
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

using Row = std::vector<std::pair<int, double>>;

// dst -= factor * src, both sorted by column; entries at column `drop` are
// removed from the result.
Row merge_sub(const Row& dst, const Row& src, double factor, int drop) {
    Row out;
    out.reserve(dst.size() + src.size());
    size_t a = 0, b = 0;
    while (a < dst.size() || b < src.size()) {
        int ca = a < dst.size() ? dst[a].first : std::numeric_limits<int>::max();
        int cb = b < src.size() ? src[b].first : std::numeric_limits<int>::max();
        int c = std::min(ca, cb);
        double v = 0.0;
        if (ca == c) v += dst[a++].second;
        if (cb == c) v -= factor * src[b++].second;
        if (c != drop) out.emplace_back(c, v);
    }
    return out;
}

}  // namespace

SparseLU::SparseLU(const SparseMatrix& A) : n_(A.size()) {
    std::vector<Row> rows(n_);
    const auto& off = A.row_offsets();
    const auto& col = A.col_indices();
    const auto& val = A.values();
    for (int i = 0; i < n_; ++i)
        for (int k = off[i]; k < off[i + 1]; ++k) rows[i].emplace_back(col[k], val[k]);

    // Rows whose current leading column is c (may contain stale entries,
    // validated when inspected).
    std::vector<std::vector<int>> leading(n_);
    std::vector<char> done(n_, 0);
    for (int i = 0; i < n_; ++i)
        if (!rows[i].empty()) leading[rows[i].front().first].push_back(i);

    urows_.resize(n_);
    steps_.resize(n_);
    pivot_rows_.reserve(n_);

    const double tiny = std::numeric_limits<double>::min();
    for (int k = 0; k < n_; ++k) {
        int pivot = -1;
        double pmag = 0.0;
        std::vector<int> active;
        for (int r : leading[k]) {
            if (done[r] || rows[r].empty() || rows[r].front().first != k) continue;
            active.push_back(r);
            double mag = std::abs(rows[r].front().second);
            if (mag > pmag || (mag == pmag && pivot >= 0 && r < pivot)) {
                pmag = mag;
                pivot = r;
            }
        }
        leading[k].clear();
        if (pivot < 0 || pmag < tiny)
            throw SingularMatrixError("sparse LU: zero pivot at column " + std::to_string(k), k);

        pivot_rows_.push_back(pivot);
        done[pivot] = 1;
        const Row prow = std::move(rows[pivot]);
        double pval = prow.front().second;
        for (int r : active) {
            if (r == pivot) continue;
            double factor = rows[r].front().second / pval;
            steps_[k].push_back({r, factor});
            rows[r] = merge_sub(rows[r], prow, factor, k);
            if (!rows[r].empty()) leading[rows[r].front().first].push_back(r);
        }
        urows_[k] = std::move(prow);
    }
}

std::vector<double> SparseLU::solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("SparseLU::solve: dimension mismatch");
    std::vector<double> y(b.begin(), b.end());
    // forward elimination replay
    for (int k = 0; k < n_; ++k) {
        double yk = y[pivot_rows_[k]];
        for (const auto& s : steps_[k]) y[s.target_row] -= s.factor * yk;
    }
    // back substitution on U in pivot order
    std::vector<double> x(n_, 0.0);
    for (int k = n_ - 1; k >= 0; --k) {
        const auto& row = urows_[k];
        double s = y[pivot_rows_[k]];
        for (size_t t = 1; t < row.size(); ++t) s -= row[t].second * x[row[t].first];
        x[k] = s / row.front().second;
    }
    return x;
}

std::vector<double> direct_solve(const SparseMatrix& A, std::span<const double> b) {
    SparseLU lu(A);
    std::vector<double> x = lu.solve(b);
    std::vector<double> r = spmv(A, x);
    for (int i = 0; i < A.size(); ++i) r[i] -= b[i];
    double scale = norm_inf(b) + A.norm_inf() * norm_inf(x);
    if (norm_inf(r) > 1e-12 * scale)
        throw SolverError("direct_solve: residual " + std::to_string(norm_inf(r)) +
                          " exceeds contract for scale " + std::to_string(scale));
    return x;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.size() << " " << A.size() << " " << A.nnz() << "\n";
    out << std::setprecision(17);
    for (int i = 0; i < A.size(); ++i)
        for (int k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
            out << (i + 1) << " " << (A.col_indices()[k] + 1) << " " << A.values()[k] << "\n";
}

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_matrix_market(out, A);
}

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw std::runtime_error("MatrixMarket: missing banner");
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%') break;
    std::istringstream hdr(line);
    int m = 0, n = 0, nnz = 0;
    if (!(hdr >> m >> n >> nnz) || m != n)
        throw std::runtime_error("MatrixMarket: bad or non-square size line");
    std::vector<int> ri, ci;
    std::vector<double> v;
    ri.reserve(nnz);
    ci.reserve(nnz);
    v.reserve(nnz);
    for (int k = 0; k < nnz; ++k) {
        int i, j;
        double a;
        if (!(in >> i >> j >> a)) throw std::runtime_error("MatrixMarket: truncated entries");
        ri.push_back(i - 1);
        ci.push_back(j - 1);
        v.push_back(a);
    }
    return SparseMatrix::from_triplets(n, ri, ci, v);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix_market(in);
}

void write_vector(const std::string& path, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << std::setprecision(17);
    for (double x : v) out << x << "\n";
}

}  // namespace fvbs
