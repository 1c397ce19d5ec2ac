#include "zbus/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zbus/errors.hpp"

namespace zbus {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("CMatrix: entry count does not match rows x cols");
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (auto const& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("CMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<Complex const> entries) {
    CMatrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

CVector CMatrix::column(std::size_t c) const {
    CVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

CMatrix& CMatrix::operator+=(CMatrix const& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("CMatrix: dimension mismatch in +=");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(CMatrix const& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("CMatrix: dimension mismatch in -=");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex scale) {
    for (auto& x : data_) x *= scale;
    return *this;
}

CMatrix operator+(CMatrix lhs, CMatrix const& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, CMatrix const& rhs) { return lhs -= rhs; }

CMatrix operator*(CMatrix const& lhs, CMatrix const& rhs) {
    if (lhs.cols() != rhs.rows()) throw std::invalid_argument("CMatrix: dimension mismatch in *");
    CMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            Complex const a = lhs(i, k);
            if (a == Complex{}) continue;
            auto rhs_row = rhs.row(k);
            for (std::size_t j = 0; j < rhs.cols(); ++j) out_row[j] += a * rhs_row[j];
        }
    }
    return out;
}

CVector operator*(CMatrix const& lhs, std::span<Complex const> rhs) {
    if (lhs.cols() != rhs.size()) throw std::invalid_argument("CMatrix: dimension mismatch in M*v");
    CVector out(lhs.rows());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        Complex acc{};
        auto r = lhs.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) acc += r[k] * rhs[k];
        out[i] = acc;
    }
    return out;
}

CVector add(std::span<Complex const> x, std::span<Complex const> y) {
    if (x.size() != y.size()) throw std::invalid_argument("add: length mismatch");
    CVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

CVector subtract(std::span<Complex const> x, std::span<Complex const> y) {
    if (x.size() != y.size()) throw std::invalid_argument("subtract: length mismatch");
    CVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

double inf_norm(CMatrix const& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (auto const& x : a.row(i)) sum += std::abs(x);
        best = std::max(best, sum);
    }
    return best;
}

double inf_norm(std::span<Complex const> u) {
    double best = 0.0;
    for (auto const& x : u) best = std::max(best, std::abs(x));
    return best;
}

LuFactorization::LuFactorization(CMatrix a) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LU: matrix must be square");
    std::size_t const n = lu_.rows();

    std::vector<double> column_scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            column_scale[j] = std::max(column_scale[j], std::abs(lu_(i, j)));
        }
    }

    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        double pivot_mag = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double const mag = std::abs(lu_(i, k));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if (column_scale[k] == 0.0 || pivot_mag < kRelativePivotTolerance * column_scale[k]) {
            std::ostringstream msg;
            msg << "matrix is singular to working precision (pivot " << pivot_mag << " in column " << k
                << ")";
            throw SingularMatrixError(msg.str(), k);
        }
        if (pivot_row != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(pivot_row).begin());
            std::swap(perm_[k], perm_[pivot_row]);
        }
        Complex const pivot = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            Complex const factor = lu_(i, k) / pivot;
            lu_(i, k) = factor;
            if (factor == Complex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
        }
    }
}

CVector LuFactorization::solve(std::span<Complex const> b) const {
    std::size_t const n = size();
    if (b.size() != n) throw std::invalid_argument("LU solve: right-hand side length mismatch");
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = x[i];
        for (std::size_t k = 0; k < i; ++k) acc -= lu_(i, k) * x[k];
        x[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        Complex acc = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= lu_(ii, k) * x[k];
        x[ii] = acc / lu_(ii, ii);
    }
    return x;
}

CMatrix LuFactorization::solve(CMatrix const& b) const {
    if (b.rows() != size()) throw std::invalid_argument("LU solve: right-hand side row mismatch");
    CMatrix x(b.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        CVector const col = solve(b.column(c));
        for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = col[r];
    }
    return x;
}

CMatrix LuFactorization::inverse() const { return solve(CMatrix::identity(size())); }

CMatrix lu_solve(CMatrix const& a, CMatrix const& b) { return LuFactorization(a).solve(b); }

CMatrix inverse(CMatrix const& a) { return LuFactorization(a).inverse(); }

}  // namespace zbus
