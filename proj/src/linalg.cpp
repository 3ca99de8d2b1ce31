#include "espike/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "espike/rng.hpp"

namespace espike {

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw PreconditionError("matmul: dimension mismatch");
  ComplexMatrix r(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      cplx aik = (*this)(i, k);
      if (aik == cplx()) continue;
      const cplx* brow = &rhs(k, 0);
      cplx* rrow = &r(i, 0);
      for (int j = 0; j < rhs.cols_; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  ComplexMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += rhs.a_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  ComplexMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= rhs.a_[i];
  return r;
}

ComplexMatrix ComplexMatrix::scaled(cplx s) const {
  ComplexMatrix r = *this;
  for (auto& v : r.a_) v *= s;
  return r;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  if (rows_ != cols_) return false;
  double scale = frobenius_norm();
  if (scale == 0.0) return true;
  for (int i = 0; i < rows_; ++i)
    for (int j = i; j < cols_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > rel_tol * scale) return false;
  return true;
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix r(n, n);
  for (int i = 0; i < n; ++i) r(i, i) = 1.0;
  return r;
}

namespace {

// Reduce Hermitian A to real symmetric tridiagonal (d, e) by Householder
// reflections; accumulates the unitary Q when q != nullptr.
void hermitian_tridiagonalize(ComplexMatrix a, std::vector<double>& d,
                              std::vector<double>& e, ComplexMatrix* q) {
  const int n = a.rows();
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  if (q) *q = ComplexMatrix::identity(n);
  std::vector<cplx> v(n), w(n);

  for (int k = 0; k < n - 1; ++k) {
    // Householder vector for column k below the diagonal.
    double xnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
    cplx alpha = a(k + 1, k);
    double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) {
      e[k] = 0.0;
      continue;
    }
    double aabs = std::abs(alpha);
    cplx phase = (aabs == 0.0) ? cplx(1.0, 0.0) : alpha / aabs;
    double beta = -xnorm;  // target subdiagonal (real, sign folded into phase)
    cplx vk1 = alpha - phase * beta;
    std::fill(v.begin(), v.end(), cplx());
    v[k + 1] = vk1;
    for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = std::norm(vk1) + (xnorm2 - std::norm(alpha));
    if (vnorm2 == 0.0) {
      e[k] = std::real(phase * beta);
      continue;
    }
    double tau = 2.0 / vnorm2;

    // w = tau * A v;  w -= (tau/2 * tau * v^* A v) v;  A -= v w^* + w v^*
    for (int i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      w[i] = tau * s;
    }
    cplx vw = 0.0;
    for (int i = k + 1; i < n; ++i) vw += std::conj(v[i]) * w[i];
    cplx corr = 0.5 * tau * vw;
    for (int i = k + 1; i < n; ++i) w[i] -= corr * v[i];
    for (int i = k; i < n; ++i) {
      for (int j = k; j < n; ++j) {
        a(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);
      }
    }
    if (q) {
      // Q <- Q (I - tau v v^*)
      for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (int j = k + 1; j < n; ++j) s += (*q)(i, j) * v[j];
        s *= tau;
        for (int j = k + 1; j < n; ++j) (*q)(i, j) -= s * std::conj(v[j]);
      }
    }
    // Subdiagonal is phase*beta; rotate it onto the real axis.
    cplx sub = a(k + 1, k);
    double sabs = std::abs(sub);
    e[k] = sabs;
    if (sabs > 0.0) {
      cplx ph = sub / sabs;
      // scale row/col k+1.. by conj(ph) so entry becomes real
      for (int i = 0; i < n; ++i) a(i, k + 1) *= ph;
      for (int j = 0; j < n; ++j) a(k + 1, j) *= std::conj(ph);
      if (q)
        for (int i = 0; i < n; ++i) (*q)(i, k + 1) *= ph;
    }
  }
  for (int i = 0; i < n; ++i) d[i] = std::real(a(i, i));
}

inline double hypot2(double a, double b) { return std::hypot(a, b); }

// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix.
// When z != nullptr (n x n complex), rotations are accumulated into it.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, ComplexMatrix* z) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return;
  e.push_back(0.0);
  int total_budget = 30 * n;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (total_budget-- <= 0)
          throw NumericalError("tridiag_ql: iteration cap exceeded (residual " +
                               std::to_string(std::abs(e[l])) + ")");
        ++iter;
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (int k = 0; k < n; ++k) {
              cplx f2 = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f2;
              (*z)(k, i) = c * (*z)(k, i) - s * f2;
            }
          }
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, ComplexMatrix* vectors) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw PreconditionError("hermitian_eigenvalues: matrix must be square, order >= 1");
  if (!a.is_hermitian(1e-12))
    throw PreconditionError("hermitian_eigenvalues: input not Hermitian to 1e-12");
  const int n = a.rows();
  std::vector<double> d, e;
  hermitian_tridiagonalize(a, d, e, vectors);
  tridiag_ql(d, e, vectors);

  // sort ascending, permuting vectors accordingly
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = d[idx[i]];
  if (vectors) {
    ComplexMatrix sorted(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) sorted(i, j) = (*vectors)(i, idx[j]);
    *vectors = std::move(sorted);
  }
  return out;
}

double largest_singular_sq(const ComplexMatrix& x, double rel_tol, int max_iters,
                           std::uint64_t probe_seed) {
  const int m = x.rows(), n = x.cols();
  if (n < 1 || m < 1) throw PreconditionError("largest_singular_sq: empty matrix");
  RngStream rng(probe_seed, 0);
  std::vector<cplx> v(n), xv(m), wv(n);
  for (auto& c : v) c = rng.gaussian_complex();
  double lam = 0.0, lam_prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    // xv = X v
    for (int i = 0; i < m; ++i) {
      cplx s = 0.0;
      const cplx* row = &x(i, 0);
      for (int j = 0; j < n; ++j) s += row[j] * v[j];
      xv[i] = s;
    }
    // wv = X^* xv
    std::fill(wv.begin(), wv.end(), cplx());
    for (int i = 0; i < m; ++i) {
      cplx c = xv[i];
      const cplx* row = &x(i, 0);
      for (int j = 0; j < n; ++j) wv[j] += std::conj(row[j]) * c;
    }
    double vnorm2 = 0.0;
    for (int j = 0; j < n; ++j) vnorm2 += std::norm(v[j]);
    double num = 0.0;
    for (int j = 0; j < n; ++j) num += std::real(std::conj(v[j]) * wv[j]);
    lam = num / vnorm2;
    double wnorm = 0.0;
    for (int j = 0; j < n; ++j) wnorm += std::norm(wv[j]);
    wnorm = std::sqrt(wnorm);
    for (int j = 0; j < n; ++j) v[j] = wv[j] / wnorm;
    if (it > 4 && std::abs(lam - lam_prev) <= rel_tol * std::abs(lam)) break;
    lam_prev = lam;
  }
  return lam;
}

cplx determinant(ComplexMatrix a) {
  if (a.rows() != a.cols()) throw PreconditionError("determinant: square matrix required");
  const int n = a.rows();
  cplx det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    cplx inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      cplx f = a(i, k) * inv;
      if (f == cplx()) continue;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

std::vector<cplx> solve(ComplexMatrix a, std::vector<cplx> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw PreconditionError("solve: dimension mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) throw NumericalError("solve: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    cplx inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      cplx f = a(i, k) * inv;
      if (f == cplx()) continue;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    cplx s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return b;
}

ComplexMatrix inverse(const ComplexMatrix& a, double* residual) {
  const int n = a.rows();
  if (a.cols() != n) throw PreconditionError("inverse: square matrix required");
  ComplexMatrix inv(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<cplx> e(n);
    e[col] = 1.0;
    auto x = solve(a, std::move(e));
    for (int i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  if (residual) {
    ComplexMatrix r = a * inv;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(r(i, j) - (i == j ? cplx(1.0) : cplx())));
    *residual = worst;
  }
  return inv;
}

}  // namespace espike
