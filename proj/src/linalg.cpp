#include "vrszd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vrszd/error.hpp"

namespace vrszd {

namespace {

void require_same_size(std::span<const double> x, std::span<const double> y, const char* op) {
  if (x.size() != y.size()) {
    throw InvalidArgument(std::string(op) + ": size mismatch " + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw InvalidArgument("Matrix: data size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y, "subtract");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidArgument("matvec: shape mismatch");
  Vector out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), x);
  return out;
}

Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw InvalidArgument("matvec_transposed: shape mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) axpy(x[r], a.row(r), out);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      axpy(aik, b.row(k), out.row(i));
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

ColumnQr thin_qr_columns(std::span<const double> a, std::size_t rows, std::size_t cols) {
  if (cols == 0 || rows < cols) throw InvalidArgument("thin_qr: need rows >= cols >= 1");
  if (a.size() != rows * cols) throw InvalidArgument("thin_qr: data size does not match shape");
  if (!all_finite(a)) throw NumericalError("thin_qr: non-finite input");

  const double scale_ref = norm2(a);
  std::vector<double> work(a.begin(), a.end());
  // Householder vectors, stored column-major with the leading j entries unused.
  std::vector<double> reflectors(rows * cols, 0.0);
  std::vector<double> reflector_norm_sq(cols, 0.0);
  ColumnQr out;
  out.r.assign(cols * cols, 0.0);

  for (std::size_t j = 0; j < cols; ++j) {
    double* x = work.data() + j * rows;
    // Reflect onto +||x|| e_j, using the cancellation-free form of v_j.
    double tail_sq = 0.0;
    for (std::size_t i = j + 1; i < rows; ++i) tail_sq += x[i] * x[i];
    const double norm = std::sqrt(x[j] * x[j] + tail_sq);

    double* v = reflectors.data() + j * rows;
    double vnorm_sq = 0.0;
    if (tail_sq > 0.0 || x[j] < 0.0) {
      for (std::size_t i = j + 1; i < rows; ++i) v[i] = x[i];
      const double lead = x[j] <= 0.0 ? x[j] - norm : -tail_sq / (x[j] + norm);
      // Unit leading entry, so a 1 x 1 reflector is exactly -1.
      v[j] = 1.0;
      for (std::size_t i = j + 1; i < rows; ++i) v[i] /= lead;
      for (std::size_t i = j; i < rows; ++i) vnorm_sq += v[i] * v[i];
    }
    reflector_norm_sq[j] = vnorm_sq;

    if (vnorm_sq > 0.0) {
      for (std::size_t k = j + 1; k < cols; ++k) {
        double* w = work.data() + k * rows;
        double proj = 0.0;
        for (std::size_t i = j; i < rows; ++i) proj += v[i] * w[i];
        const double factor = 2.0 * proj / vnorm_sq;
        for (std::size_t i = j; i < rows; ++i) w[i] -= factor * v[i];
      }
    }
    out.r[j * cols + j] = vnorm_sq > 0.0 ? norm : x[j];
    for (std::size_t k = j + 1; k < cols; ++k) out.r[k * cols + j] = work[k * rows + j];
  }

  for (std::size_t j = 0; j < cols; ++j) {
    if (std::abs(out.r[j * cols + j]) < 1e-12 * scale_ref || scale_ref == 0.0) {
      throw DegenerateInput("thin_qr: rank-deficient input (column " + std::to_string(j) + ")");
    }
  }

  // Q = H_0 H_1 ... H_{cols-1} applied to the leading identity columns.
  out.q.assign(rows * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) out.q[j * rows + j] = 1.0;
  for (std::size_t jj = cols; jj-- > 0;) {
    const double* v = reflectors.data() + jj * rows;
    const double vnorm_sq = reflector_norm_sq[jj];
    if (vnorm_sq == 0.0) continue;
    for (std::size_t k = jj; k < cols; ++k) {
      double* q = out.q.data() + k * rows;
      double proj = 0.0;
      for (std::size_t i = jj; i < rows; ++i) proj += v[i] * q[i];
      const double factor = 2.0 * proj / vnorm_sq;
      for (std::size_t i = jj; i < rows; ++i) q[i] -= factor * v[i];
    }
  }
  return out;
}

ThinQr thin_qr(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<double> colmajor(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) colmajor[j * rows + i] = m(i, j);
  const ColumnQr qr = thin_qr_columns(colmajor, rows, cols);
  ThinQr out{Matrix(rows, cols), Matrix(cols, cols)};
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.q(i, j) = qr.q[j * rows + i];
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.r(i, j) = qr.r[j * cols + i];
  return out;
}

// One-sided Jacobi (Hestenes) on the columns of m.
Svd svd(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (cols == 0 || rows < cols) throw InvalidArgument("svd: need rows >= cols >= 1");
  if (!all_finite(m.data())) throw NumericalError("svd: non-finite input");

  std::vector<Vector> u(cols, Vector(rows));
  std::vector<Vector> v(cols, Vector(cols, 0.0));
  for (std::size_t j = 0; j < cols; ++j) {
    u[j] = m.column(j);
    v[j][j] = 1.0;
  }

  constexpr int kMaxSweeps = 100;
  constexpr double kTol = 1e-15;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double alpha = squared_norm(u[p]);
        const double beta = squared_norm(u[q]);
        const double gamma = dot(u[p], u[q]);
        if (std::abs(gamma) <= kTol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double up = u[p][i];
          const double uq = u[q][i];
          u[p][i] = c * up - s * uq;
          u[q][i] = s * up + c * uq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const double vp = v[p][i];
          const double vq = v[q][i];
          v[p][i] = c * vp - s * vq;
          v[q][i] = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw NumericalError("svd: Jacobi sweeps did not converge");

  Vector sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) sigma[j] = norm2(u[j]);
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  Svd out{Matrix(rows, cols), Vector(cols), Matrix(cols, cols)};
  const double tiny = sigma.empty() ? 0.0 : sigma[order[0]] * 1e-14;
  std::vector<Vector> basis;
  for (std::size_t jj = 0; jj < cols; ++jj) {
    const std::size_t j = order[jj];
    out.sigma[jj] = sigma[j];
    Vector col = u[j];
    if (sigma[j] > tiny && sigma[j] > 0.0) {
      scale(1.0 / sigma[j], col);
    } else {
      // Null direction: complete with a canonical vector orthogonalized against the basis so far.
      for (std::size_t e = 0; e < rows; ++e) {
        Vector cand(rows, 0.0);
        cand[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const Vector& b : basis) axpy(-dot(b, cand), b, cand);
        const double nc = norm2(cand);
        if (nc > 1e-8) {
          scale(1.0 / nc, cand);
          col = cand;
          break;
        }
      }
    }
    basis.push_back(col);
    for (std::size_t i = 0; i < rows; ++i) out.u(i, jj) = col[i];
    for (std::size_t i = 0; i < cols; ++i) out.v(i, jj) = v[j][i];
  }
  return out;
}

}  // namespace vrszd
