#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace arsar {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Row index is range, column index is
/// azimuth throughout the library.
class ComplexImage {
public:
    ComplexImage() = default;
    ComplexImage(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexImage(std::size_t rows, std::size_t cols, std::vector<cplx> data);

    static ComplexImage zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::vector<cplx>& storage() noexcept { return data_; }

    bool same_shape(const ComplexImage& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    ComplexImage& operator+=(const ComplexImage& o);
    ComplexImage& operator-=(const ComplexImage& o);
    ComplexImage& operator*=(cplx s);

    friend ComplexImage operator+(ComplexImage a, const ComplexImage& b) { return a += b; }
    friend ComplexImage operator-(ComplexImage a, const ComplexImage& b) { return a -= b; }
    friend ComplexImage operator*(cplx s, ComplexImage a) { return a *= s; }

    /// Bitwise equality of shape and every re/im word.
    friend bool operator==(const ComplexImage& a, const ComplexImage& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Frobenius norm.
double norm(const ComplexImage& a);
/// Sum of |a|^2.
double squared_norm(const ComplexImage& a);
/// <a, b> = sum conj(a) * b.
cplx inner(const ComplexImage& a, const ComplexImage& b);
/// ||a - b|| / ||b||; returns ||a|| when b is zero.
double relative_error(const ComplexImage& a, const ComplexImage& b);
bool all_finite(const ComplexImage& a);

/// Throws ShapeError naming `what` when shapes differ.
void require_same_shape(const ComplexImage& a, const ComplexImage& b, std::string_view what);

}  // namespace arsar
