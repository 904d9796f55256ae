#include "arsar/complex_image.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "arsar/error.hpp"

namespace arsar {

ComplexImage::ComplexImage(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("ComplexImage: data length " + std::to_string(data_.size()) + " != " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

ComplexImage& ComplexImage::operator+=(const ComplexImage& o) {
    require_same_shape(*this, o, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

ComplexImage& ComplexImage::operator-=(const ComplexImage& o) {
    require_same_shape(*this, o, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

ComplexImage& ComplexImage::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

bool operator==(const ComplexImage& a, const ComplexImage& b) {
    if (!a.same_shape(b)) return false;
    if (a.data_.empty()) return true;
    return std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(cplx)) == 0;
}

double squared_norm(const ComplexImage& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return s;
}

double norm(const ComplexImage& a) { return std::sqrt(squared_norm(a)); }

cplx inner(const ComplexImage& a, const ComplexImage& b) {
    require_same_shape(a, b, "inner");
    cplx s{};
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) s += std::conj(da[i]) * db[i];
    return s;
}

double relative_error(const ComplexImage& a, const ComplexImage& b) {
    require_same_shape(a, b, "relative_error");
    const double nb = norm(b);
    const double diff = norm(a - b);
    return nb > 0.0 ? diff / nb : diff;
}

bool all_finite(const ComplexImage& a) {
    for (const auto& v : a.data()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

void require_same_shape(const ComplexImage& a, const ComplexImage& b, std::string_view what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
    }
}

}  // namespace arsar
