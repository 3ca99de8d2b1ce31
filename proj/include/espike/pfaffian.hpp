#pragma once
#include <functional>
#include <utility>
#include <vector>

#include "espike/linalg.hpp"

namespace espike {

// Skew-symmetric matrix of even order; stores the strict upper triangle.
class SkewMatrix {
 public:
  explicit SkewMatrix(int order);

  int order() const { return n_; }
  // entry (i,j) for i<j; the full matrix is A = -A^T by construction.
  cplx& upper(int i, int j);
  cplx at(int i, int j) const;

  ComplexMatrix full() const;

  static SkewMatrix from_full(const ComplexMatrix& a, double tol = 1e-12);

 private:
  int n_;
  std::vector<cplx> u_;  // packed strict upper triangle, row-major
};

// Pfaffian by skew-symmetric Parlett-Reid tridiagonalization with partial
// pivoting and sign tracking. Sign convention: Pf([[0,1],[-1,0]]) = +1.
cplx pfaffian(const SkewMatrix& s);
cplx pfaffian(const ComplexMatrix& skew_full, double skew_tol = 1e-10);

// Delta_M(x)^2 / Delta_M(x^2) computed from Vandermonde products; equals
// Pf[(x_i-x_j)/(x_i+x_j)] for even M.
double schur_pfaffian_lhs(const std::vector<double>& x);

// Discrete two-sided evaluation of the Pfaffian integration identity
//   int Pf[eps(x_i,x_j)] det[phi_i(x_j)] dnu^m = m!/2^{m/2} Pf[eps_ij],
// over a finite measure (support points + weights). Returns (lhs, rhs).
std::pair<cplx, cplx> de_bruijn_check(
    int m, const std::vector<double>& support, const std::vector<double>& weights,
    const std::vector<std::function<cplx(double)>>& phi,
    const std::function<cplx(double, double)>& eps);

}  // namespace espike
