#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace toponav {

// Minimal dense row-major matrix; enough linear algebra for the toy planner.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return d_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return d_[static_cast<std::size_t>(r) * cols_ + c]; }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("mat: shape mismatch in product");
    Mat out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  Mat transposed() const {
    Mat out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  const std::vector<double>& data() const { return d_; }
  std::vector<double>& data() { return d_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

// In-place numerically stable row softmax.
inline void softmax_rows(Mat& m) {
  for (int i = 0; i < m.rows(); ++i) {
    double mx = m(i, 0);
    for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      m(i, j) = std::exp(m(i, j) - mx);
      sum += m(i, j);
    }
    for (int j = 0; j < m.cols(); ++j) m(i, j) /= sum;
  }
}

}  // namespace toponav
