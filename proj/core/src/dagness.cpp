#include "mscastle/dagness.hpp"

#include <cmath>
#include <stdexcept>

namespace mscastle {

namespace {

void check_square_finite(const Matrix& w, const char* who) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (!w.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

// (13,13)-Pade numerator/denominator split: exp(A) ~ (V - U)^{-1} (V + U)
// with U odd and V even in A.
void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const long n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix tmp = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u.noalias() = a * tmp;
  v.noalias() = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

Matrix expm(const Matrix& a) {
  check_square_finite(a, "expm");
  const long n = a.rows();
  if (n == 0) return Matrix(0, 0);
  if (n == 1) {
    Matrix r(1, 1);
    r(0, 0) = std::exp(a(0, 0));
    return r;
  }

  // theta_13: largest 1-norm for which the bare degree-13 approximant keeps
  // full double accuracy.
  const double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Matrix::Identity(n, n);
  int squarings = 0;
  Matrix scaled = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    scaled *= std::ldexp(1.0, -squarings);
  }

  Matrix u(n, n), v(n, n);
  pade13(scaled, u, v);
  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

double h_value(const Matrix& w) {
  check_square_finite(w, "h_value");
  const long n = w.rows();
  if (n == 0) return 0.0;
  return expm(w.cwiseProduct(w)).trace() - static_cast<double>(n);
}

Matrix h_gradient(const Matrix& w) {
  check_square_finite(w, "h_gradient");
  return expm(w.cwiseProduct(w)).transpose().cwiseProduct(2.0 * w);
}

DagnessEval h_eval(const Matrix& w) {
  check_square_finite(w, "h_eval");
  DagnessEval out;
  const Matrix e = expm(w.cwiseProduct(w));
  out.value = e.trace() - static_cast<double>(w.rows());
  out.gradient = e.transpose().cwiseProduct(2.0 * w);
  return out;
}

BlockDagnessEval h_blockdiag(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) {
    throw std::invalid_argument("h_blockdiag: empty block list");
  }
  BlockDagnessEval out;
  out.gradients.reserve(blocks.size());
  for (const Matrix& block : blocks) {
    DagnessEval eval = h_eval(block);
    out.value += eval.value;
    out.gradients.push_back(std::move(eval.gradient));
  }
  return out;
}

}  // namespace mscastle
