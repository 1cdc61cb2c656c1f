#include "katgnn/matrix.hpp"

namespace katgnn {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::runtime_error("matmul: shape mismatch " + a.shape_str() + " x " +
                             b.shape_str());
  Matrix out(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    double* out_row = &out.values()[static_cast<size_t>(i) * m];
    const double* a_row = &a.values()[static_cast<size_t>(i) * k];
    for (int p = 0; p < k; ++p) {
      const double av = a_row[p];
      if (av == 0.0) continue;  // one-hot feature rows make this worthwhile
      const double* b_row = &b.values()[static_cast<size_t>(p) * m];
      for (int j = 0; j < m; ++j) out_row[j] += av * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
  return out;
}

}  // namespace katgnn
