#pragma once
#include <complex>
#include <stdexcept>
#include <vector>

namespace espike {

using cplx = std::complex<double>;

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cplx& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }
  const std::vector<cplx>& data() const { return a_; }
  std::vector<cplx>& data() { return a_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix scaled(cplx s) const;

  double frobenius_norm() const;
  bool is_hermitian(double rel_tol = 1e-12) const;

  static ComplexMatrix identity(int n);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

// Ascending eigenvalues of a Hermitian matrix; Householder tridiagonalization
// followed by implicit QL with Wilkinson shifts. When vectors != nullptr the
// columns of *vectors hold orthonormal eigenvectors in matching order.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a,
                                          ComplexMatrix* vectors = nullptr);

// Largest eigenvalue of X^* X by Rayleigh-quotient power iteration; suited to
// spectra with an isolated top eigenvalue. rel_tol is on the eigenvalue.
double largest_singular_sq(const ComplexMatrix& x, double rel_tol = 1e-9,
                           int max_iters = 4000, std::uint64_t probe_seed = 12345);

// det via LU with partial pivoting (test oracle, also used by Fredholm).
cplx determinant(ComplexMatrix a);

// Solve a x = b in place (Gaussian elimination, partial pivoting).
std::vector<cplx> solve(ComplexMatrix a, std::vector<cplx> b);

// Inverse of a general complex matrix; reports the max |residual| of A*inv-I.
ComplexMatrix inverse(const ComplexMatrix& a, double* residual = nullptr);

}  // namespace espike
