#include "espike/pfaffian.hpp"

#include <cmath>

namespace espike {

SkewMatrix::SkewMatrix(int order) : n_(order) {
  if (order < 2 || order % 2 != 0)
    throw PreconditionError("SkewMatrix: order must be even and >= 2");
  u_.assign(std::size_t(n_) * (n_ - 1) / 2, cplx());
}

cplx& SkewMatrix::upper(int i, int j) {
  if (!(0 <= i && i < j && j < n_)) throw PreconditionError("SkewMatrix::upper: need i<j");
  // offset of row i in packed strict upper triangle
  std::size_t off = std::size_t(i) * n_ - std::size_t(i) * (i + 1) / 2;
  return u_[off + (j - i - 1)];
}

cplx SkewMatrix::at(int i, int j) const {
  if (i == j) return cplx();
  bool swap = i > j;
  if (swap) std::swap(i, j);
  std::size_t off = std::size_t(i) * n_ - std::size_t(i) * (i + 1) / 2;
  cplx v = u_[off + (j - i - 1)];
  return swap ? -v : v;
}

ComplexMatrix SkewMatrix::full() const {
  ComplexMatrix a(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) a(i, j) = at(i, j);
  return a;
}

SkewMatrix SkewMatrix::from_full(const ComplexMatrix& a, double tol) {
  const int n = a.rows();
  if (a.cols() != n) throw PreconditionError("SkewMatrix::from_full: square required");
  double scale = std::max(1.0, a.frobenius_norm());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (std::abs(a(i, j) + a(j, i)) > tol * scale)
        throw PreconditionError("SkewMatrix::from_full: matrix not skew-symmetric");
  SkewMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s.upper(i, j) = 0.5 * (a(i, j) - a(j, i));
  return s;
}

cplx pfaffian(const ComplexMatrix& skew_full, double skew_tol) {
  ComplexMatrix a = skew_full;
  const int n = a.rows();
  if (a.cols() != n) throw PreconditionError("pfaffian: square matrix required");
  if (n % 2 != 0) throw PreconditionError("pfaffian: odd order");
  double scale = std::max(1.0, a.frobenius_norm());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (std::abs(a(i, j) + a(j, i)) > skew_tol * scale)
        throw PreconditionError("pfaffian: matrix not skew-symmetric");

  // Parlett-Reid: reduce to skew tridiagonal T with Pf(T) = prod T(2k,2k+1),
  // tracking row/column swaps (each swap flips the sign).
  cplx pf = 1.0;
  for (int k = 0; k + 1 < n; k += 2) {
    // pivot: largest |a(i,k)| for i>k
    int piv = k + 1;
    double best = std::abs(a(k + 1, k));
    for (int i = k + 2; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(a(k + 1, j), a(piv, j));
      for (int i = 0; i < n; ++i) std::swap(a(i, k + 1), a(i, piv));
      pf = -pf;
    }
    cplx akk1 = a(k + 1, k);  // = -a(k, k+1)
    pf *= a(k, k + 1);
    cplx inv = 1.0 / akk1;
    for (int i = k + 2; i < n; ++i) {
      cplx f = a(i, k) * inv;
      if (f == cplx()) continue;
      // row/col elimination keeping skew symmetry: A <- A - f e_i a_{k+1}^T + ...
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k + 1, j);
      for (int j = k + 1; j < n; ++j) a(j, i) -= f * a(j, k + 1);
    }
  }
  return pf;
}

cplx pfaffian(const SkewMatrix& s) { return pfaffian(s.full()); }

double schur_pfaffian_lhs(const std::vector<double>& x) {
  const int m = static_cast<int>(x.size());
  if (m % 2 != 0) throw PreconditionError("schur_pfaffian_lhs: even length required");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (x[i] + x[j] == 0.0)
        throw PreconditionError("schur_pfaffian_lhs: singular input x_i + x_j = 0");
  // Delta(x)^2 / Delta(x^2) = prod_{i<j} (x_i - x_j) / (x_i + x_j), with the
  // descending-difference Vandermonde convention that matches
  // Pf[(x_i - x_j)/(x_i + x_j)] at every even order.
  double r = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) r *= (x[i] - x[j]) / (x[i] + x[j]);
  return r;
}

std::pair<cplx, cplx> de_bruijn_check(
    int m, const std::vector<double>& support, const std::vector<double>& weights,
    const std::vector<std::function<cplx(double)>>& phi,
    const std::function<cplx(double, double)>& eps) {
  if (m % 2 != 0 || m < 2) throw PreconditionError("de_bruijn_check: m must be even");
  if (static_cast<int>(phi.size()) != m)
    throw PreconditionError("de_bruijn_check: need m functions");
  const int ns = static_cast<int>(support.size());
  if (static_cast<int>(weights.size()) != ns)
    throw PreconditionError("de_bruijn_check: support/weight size mismatch");

  // antisymmetry of eps over the support
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b)
      if (std::abs(eps(support[a], support[b]) + eps(support[b], support[a])) > 1e-12)
        throw PreconditionError("de_bruijn_check: eps not antisymmetric on support");

  // lhs: exhaustive sum over all m-tuples of support points
  cplx lhs = 0.0;
  std::vector<int> idx(m, 0);
  ComplexMatrix pe(m, m), pd(m, m);
  while (true) {
    double wprod = 1.0;
    for (int i = 0; i < m; ++i) wprod *= weights[idx[i]];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        pe(i, j) = eps(support[idx[i]], support[idx[j]]);
        pd(i, j) = phi[i](support[idx[j]]);
      }
    lhs += wprod * pfaffian(pe) * determinant(pd);
    int pos = m - 1;
    while (pos >= 0 && ++idx[pos] == ns) idx[pos--] = 0;
    if (pos < 0) break;
  }

  // rhs: (m!/2^{m/2}) Pf[eps_ij] with the pair-determinant moments
  ComplexMatrix em(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      cplx s = 0.0;
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
          cplx det2 = phi[i](support[a]) * phi[j](support[b]) -
                      phi[i](support[b]) * phi[j](support[a]);
          s += weights[a] * weights[b] * eps(support[a], support[b]) * det2;
        }
      em(i, j) = s;
    }
  double fct = 1.0;
  for (int k = 2; k <= m; ++k) fct *= k;
  cplx rhs = fct / std::pow(2.0, m / 2.0) * pfaffian(em);
  return {lhs, rhs};
}

}  // namespace espike
