#include "conflab/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "conflab/errors.hpp"

namespace conflab {

double SparseOperator::maxOffDiagonal() const {
    double m = 0.0;
    bool any = false;
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t k = indptr[static_cast<std::size_t>(r)]; k < indptr[static_cast<std::size_t>(r + 1)]; ++k) {
            if (indices[static_cast<std::size_t>(k)] == r) continue;
            const double v = data[static_cast<std::size_t>(k)];
            if (!any || v > m) m = v;
            any = true;
        }
    }
    return any ? m : 0.0;
}

void SparseOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(rows); ++r) {
        double s = 0.0;
        for (std::int64_t k = indptr[static_cast<std::size_t>(r)]; k < indptr[static_cast<std::size_t>(r + 1)]; ++k)
            s += data[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = s;
    }
}

void SparseOperator::applyShifted(const std::vector<double>& x, const std::vector<double>& d,
                                  double shift, std::vector<double>& y) const {
    y.resize(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(rows); ++r) {
        double s = 0.0;
        for (std::int64_t k = indptr[static_cast<std::size_t>(r)]; k < indptr[static_cast<std::size_t>(r + 1)]; ++k)
            s += data[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = s + shift * d[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r)];
    }
}

std::vector<double> SparseOperator::dense() const {
    std::vector<double> out(static_cast<std::size_t>(rows * cols), 0.0);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t k = indptr[static_cast<std::size_t>(r)]; k < indptr[static_cast<std::size_t>(r + 1)]; ++k)
            out[static_cast<std::size_t>(r * cols + indices[static_cast<std::size_t>(k)])] += data[static_cast<std::size_t>(k)];
    return out;
}

SparseOperator SparseBuilder::build() const {
    SparseOperator A;
    A.rows = rows_;
    A.cols = cols_;
    A.indptr.resize(static_cast<std::size_t>(rows_) + 1, 0);
    std::int64_t nnz = 0;
    for (std::int64_t r = 0; r < rows_; ++r) {
        nnz += static_cast<std::int64_t>(entries_[static_cast<std::size_t>(r)].size());
        A.indptr[static_cast<std::size_t>(r) + 1] = nnz;
    }
    A.indices.resize(static_cast<std::size_t>(nnz));
    A.data.resize(static_cast<std::size_t>(nnz));
    for (std::int64_t r = 0; r < rows_; ++r) {
        auto row = entries_[static_cast<std::size_t>(r)];
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        // merge duplicate columns so each (row, col) appears once
        std::int64_t at = A.indptr[static_cast<std::size_t>(r)];
        for (std::size_t i = 0; i < row.size();) {
            std::int64_t col = row[i].first;
            double v = 0.0;
            while (i < row.size() && row[i].first == col) {
                v += row[i].second;
                ++i;
            }
            A.indices[static_cast<std::size_t>(at)] = col;
            A.data[static_cast<std::size_t>(at)] = v;
            ++at;
        }
        // shrink row bookkeeping if duplicates were merged
        A.indptr[static_cast<std::size_t>(r) + 1] = at;
    }
    A.indices.resize(static_cast<std::size_t>(A.indptr[static_cast<std::size_t>(rows_)]));
    A.data.resize(static_cast<std::size_t>(A.indptr[static_cast<std::size_t>(rows_)]));
    return A;
}

namespace serial {

void matvec(const SparseOperator& A, const std::vector<double>& x, std::vector<double>& y) {
    y.resize(static_cast<std::size_t>(A.rows));
    for (std::int64_t r = 0; r < A.rows; ++r) {
        double s = 0.0;
        for (std::int64_t k = A.indptr[static_cast<std::size_t>(r)]; k < A.indptr[static_cast<std::size_t>(r + 1)]; ++k)
            s += A.data[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = s;
    }
}

}  // namespace serial
}  // namespace conflab
