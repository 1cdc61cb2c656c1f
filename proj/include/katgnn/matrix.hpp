#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace katgnn {

// Dense row-major matrix of doubles. All tensors in this project are rank-2;
// vectors are 1xN or Nx1 and scalars 1x1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::runtime_error("Matrix: negative dimension");
    data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
  }
  Matrix(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
      throw std::runtime_error("Matrix: value count does not match shape");
  }

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }
  static Matrix scalar(double v) { return Matrix(1, 1, {v}); }
  static Matrix row(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return Matrix(1, n, std::move(values));
  }
  static Matrix column(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return Matrix(n, 1, std::move(values));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// out = a * b, naive ikj loop; adequate at the graph sizes this model sees.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

}  // namespace katgnn
