#pragma once
#include <memory>
#include <vector>

#include "espike/contour.hpp"
#include "espike/ensemble.hpp"
#include "espike/specfun.hpp"

namespace espike {

// Double-contour evaluators of the 2x2 matrix kernel
//   K_N = [[DS_N, S_N], [-S_N^T, IS_N]]
// of the singular-value Pfaffian point process. Requires even M. Contour
// radii adapt to the pole layout; x_hint (a bulk position in (0,4), in units
// of lambda/N) nudges the w-circle toward the phase saddle for scaled
// arguments.
class FiniteKernel {
 public:
  explicit FiniteKernel(const SpikeConfig& cfg, double x_hint = 0.0, int nodes = 320);

  const SpikeConfig& config() const { return cfg_; }

  double ds(double u, double v) const;
  double s(double u, double v) const;
  double is(double u, double v) const;

  // S_N(lambda, lambda) = one-point correlation function
  double r1(double lambda) const { return s(lambda, lambda); }
  std::vector<double> s_diag(const std::vector<double>& lambda) const;
  // grid[i][j] = S_N(us[i], vs[j])
  std::vector<std::vector<double>> s_grid(const std::vector<double>& us,
                                          const std::vector<double>& vs) const;

  // k-point correlation function as the Pfaffian of the assembled 2k x 2k
  // skew matrix of kernel blocks.
  double correlation_k(const std::vector<double>& points) const;

  // S_N through the t-integrated representation int E(eta v, eta t) DS(u,t) dt
  // (independent route used for cross-checks).
  double s_via_t_integral(double u, double v, int t_order = 48, double t_cap = 0.0) const;

  // int_0^cap S_N(t,t) dt  (should approach N)
  double normalization_integral(double cap, int panels = 24, int order = 32) const;

 private:
  SpikeConfig cfg_;
  int nodes_;
  // For M > N the S/IS evaluators run through the extended-parameter
  // finite-sum route, extrapolated in the extended parameters -> 0 (the
  // compact double-contour forms hold as printed only at M = N; the
  // normalization oracle int S = N exposes the difference).
  std::vector<std::unique_ptr<class GramKernel>> gram_seq_;
  // z-contour for S/IS (encircles +-1 and tau/sigma for M=N; the small
  // tau/sigma loop for M>N) and w-contour for DS/S (encircles sigma/tau).
  std::vector<cplx> zs_, zw_;  // S/IS z-circle nodes and weights (incl. 1/2pi i)
  std::vector<cplx> ws_, ww_;  // w-circle
  // per-node rational products
  std::vector<cplx> prod_z_s_;   // prod (tau z - sigma)/(sigma z - tau) * z^{-(M-N)}
  std::vector<cplx> prod_w_s_;   // prod (sigma w - tau)/(tau w - sigma) * w^{+(M-N)} / sqrt(w^2-1)
  std::vector<cplx> prod_w_ds_;  // DS products on the w-circle (both variables)
  std::vector<cplx> inv_one_minus_z2_;

  cplx s_inner(const std::vector<cplx>& gz, double u) const;
};

// Brute-force joint-density route for N <= 3 (even M): evaluates the
// determinant-times-Pfaffian density, normalizes numerically, and exposes
// low-order correlation functions by quadrature.
class JointDensity {
 public:
  JointDensity(const SpikeConfig& cfg, double lambda_cap = 0.0, int grid_order = 96);

  double unnormalized(const std::vector<double>& lambda) const;
  double normalization() const { return z_; }
  double pdf(const std::vector<double>& lambda) const { return unnormalized(lambda) / z_; }

  // k-point correlation functions by integrating out the rest numerically
  double r1(double lambda) const;
  double r2(double l1, double l2) const;  // N >= 2

 private:
  SpikeConfig cfg_;
  double cap_;
  std::vector<double> gt_, gw_;  // composite quadrature grid on (0, cap)
  double z_ = 0.0;
  std::vector<double> expo_;  // eta_+ sigma_j + eta_-
  std::vector<std::vector<double>> emat_;  // pairwise weight on the grid
  std::vector<std::vector<double>> gmat_;  // g_a on the grid
  ComplexMatrix alpha_;
  double pf_cached(const std::vector<int>& idx) const;
  double det_cached(const std::vector<int>& idx) const;
  double normalization_pass() const;
  std::vector<double> weight_row(double lambda) const;  // E(eta l, eta t_q)
};

// Gram-matrix route: skew Gram matrix in factored form, its inverse, the
// finite-sum kernels, and the extended double-contour representation.
class GramKernel {
 public:
  GramKernel(const SpikeConfig& cfg, const std::vector<double>& extended_rho);

  const std::vector<double>& rho() const { return rho_; }
  double condition_estimate() const { return cond_; }

  // rational function f_j evaluated at z (closed form uses the inverse rows)
  cplx f_sum(int j, cplx z) const;     // sum_l (z-rho_l)/(1-z-rho_l) c~_{lj}
  cplx f_closed(int j, cplx z) const;  // product form

  double ds_sum(double u, double v) const;  // finite-sum kernels
  double s_sum(double u, double v) const;
  double is_sum(double u, double v) const;

  // extended double contour representation of DS_N
  double ds_contour(double u, double v, int nodes = 512) const;
  // t-integrated S_N with the enlarged z-contour
  double s_contour_t(double u, double v, int nodes = 512, int t_order = 48) const;

  // Thm-1.2-style reduction: extended parameters sent to zero, evaluated in
  // the (w, z) variables with the (z (1-w) / (w (1-z)))^n factor.
  static double ds_contour_reduced(const SpikeConfig& cfg, double u, double v,
                                   int nodes = 512);

 private:
  SpikeConfig cfg_;
  std::vector<double> rho_;   // N + n values
  ComplexMatrix ctilde_;      // inverse of G~
  std::vector<double> d1_, d2_;
  double cond_ = 0.0;
  double t_transform(int k, double v) const;  // bare contour transform
  double eps_phi(int k, double v) const;      // epsilon phi_k with the h_a scaling
};

}  // namespace espike
