#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace zbus {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<Complex const> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Complex const& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<Complex const> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    CVector column(std::size_t c) const;

    std::vector<Complex> const& data() const noexcept { return data_; }

    CMatrix& operator+=(CMatrix const& other);
    CMatrix& operator-=(CMatrix const& other);
    CMatrix& operator*=(Complex scale);

    friend bool operator==(CMatrix const&, CMatrix const&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

CMatrix operator+(CMatrix lhs, CMatrix const& rhs);
CMatrix operator-(CMatrix lhs, CMatrix const& rhs);
CMatrix operator*(CMatrix const& lhs, CMatrix const& rhs);
CVector operator*(CMatrix const& lhs, std::span<Complex const> rhs);
inline CVector operator*(CMatrix const& lhs, CVector const& rhs) {
    return lhs * std::span<Complex const>(rhs);
}

CVector add(std::span<Complex const> x, std::span<Complex const> y);
CVector subtract(std::span<Complex const> x, std::span<Complex const> y);

/// Max row sum of entry magnitudes.
double inf_norm(CMatrix const& a);
/// Max entry magnitude; 0 for an empty vector.
double inf_norm(std::span<Complex const> u);
inline double inf_norm(CVector const& u) { return inf_norm(std::span<Complex const>(u)); }

/// LU factorization with partial (row) pivoting, P·A = L·U.
///
/// A pivot is rejected as singular when its magnitude drops below
/// 1e-13 times the largest magnitude found in that column of the
/// original matrix.
class LuFactorization {
  public:
    static constexpr double kRelativePivotTolerance = 1e-13;

    /// Throws SingularMatrixError.
    explicit LuFactorization(CMatrix a);

    std::size_t size() const noexcept { return lu_.rows(); }

    CMatrix solve(CMatrix const& b) const;
    CVector solve(std::span<Complex const> b) const;
    CMatrix inverse() const;

  private:
    CMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves A·X = B. Throws SingularMatrixError.
CMatrix lu_solve(CMatrix const& a, CMatrix const& b);
/// Full inverse of a square matrix. Throws SingularMatrixError.
CMatrix inverse(CMatrix const& a);

}  // namespace zbus
