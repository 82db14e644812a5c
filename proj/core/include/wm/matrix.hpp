#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wm {

// Dense row-major matrix of doubles. The whole library works on these;
// Image is a thin wrapper adding pixel-range semantics.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_data(std::size_t rows, std::size_t cols,
                          std::vector<double> data) {
    if (data.size() != rows * cols)
      throw std::invalid_argument("Matrix::from_data: size mismatch");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<double> &data() const { return data_; }
  std::vector<double> &data() { return data_; }

  bool same_shape(const Matrix &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  Matrix &operator+=(const Matrix &o) {
    require_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix &operator-=(const Matrix &o) {
    require_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix &operator*=(double s) {
    for (double &v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

private:
  void require_shape(const Matrix &o) const {
    if (!same_shape(o))
      throw std::invalid_argument("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double frobenius_norm(const Matrix &m);
double max_abs_diff(const Matrix &a, const Matrix &b);
double mean(const Matrix &m);

} // namespace wm
