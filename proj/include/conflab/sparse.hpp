#pragma once

#include <cstdint>
#include <vector>

namespace conflab {

/// Compressed sparse row matrix, square or rectangular, sorted column order
/// within each row.  Built from per-row staging to keep assembly simple.
struct SparseOperator {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::int64_t> indptr;   // rows + 1
    std::vector<std::int64_t> indices;  // nnz
    std::vector<double> data;           // nnz

    std::int64_t nnz() const { return static_cast<std::int64_t>(data.size()); }

    double diagonal(std::int64_t row) const {
        for (std::int64_t k = indptr[static_cast<std::size_t>(row)];
             k < indptr[static_cast<std::size_t>(row + 1)]; ++k)
            if (indices[static_cast<std::size_t>(k)] == row) return data[static_cast<std::size_t>(k)];
        return 0.0;
    }

    /// Sum of |off-diagonal| entries in a row.
    double offDiagonalAbsSum(std::int64_t row) const {
        double s = 0.0;
        for (std::int64_t k = indptr[static_cast<std::size_t>(row)];
             k < indptr[static_cast<std::size_t>(row + 1)]; ++k)
            if (indices[static_cast<std::size_t>(k)] != row) s += std::abs(data[static_cast<std::size_t>(k)]);
        return s;
    }

    /// Largest off-diagonal entry (signed max); 0 for an empty matrix.
    double maxOffDiagonal() const;

    /// y = A x.  Row-parallel; each row accumulates serially in column order,
    /// so the result is bitwise identical for any thread count.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    /// y = A x + shift * diag(d) x (same sparsity walk plus a diagonal term).
    void applyShifted(const std::vector<double>& x, const std::vector<double>& d,
                      double shift, std::vector<double>& y) const;

    std::vector<double> dense() const;  // row-major rows*cols, small problems only
};

/// Row-wise staging builder: fill per-row (col, value) pairs, then freeze.
class SparseBuilder {
public:
    SparseBuilder(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows)) {}

    void add(std::int64_t row, std::int64_t col, double value) {
        entries_[static_cast<std::size_t>(row)].emplace_back(col, value);
    }

    SparseOperator build() const;

private:
    std::int64_t rows_;
    std::int64_t cols_;
    std::vector<std::vector<std::pair<std::int64_t, double>>> entries_;
};

namespace serial {
/// Reference matvec, plain double loop, no OpenMP.
void matvec(const SparseOperator& A, const std::vector<double>& x, std::vector<double>& y);
}  // namespace serial

}  // namespace conflab
