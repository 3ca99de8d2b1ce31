#pragma once
#include <complex>
#include <utility>
#include <vector>

#include "espike/quadrature.hpp"

namespace espike {

// Modified Bessel function I_0. Power series for |x| <= 30, asymptotic
// expansion beyond (adaptive truncation).
double bessel_i0(double x);
cplx bessel_i0(cplx x);

// Kummer confluent hypergeometric value M(1/2, 1, 2v).
cplx kummer_m_half(cplx v);
double kummer_m_half(double v);

enum class GRegime { re_z_greater_1, re_z_less_1 };

// Large-v branch structure of g(z, v).
struct GFunAsympt {
  GRegime regime;
  static GFunAsympt classify(cplx z);
  // leading-order approximation of g(z, v) in this regime
  cplx leading(cplx z, double v) const;
};

// g(z, v) = -z M(1/2,1,2v) + (1-z^2) int_0^v e^{(v-s)(z+1)} M(1/2,1,2s) ds,
// by composite Gauss-Legendre on [0, v].
cplx g_fun(cplx z, double v);

// Same value through the closed contour representation around s = 0 with a
// pole at s = 1/(z+1) kept outside; radius <= 0 picks one automatically.
cplx g_fun_contour(cplx z, double v, double radius = 0.0, int order = 0);

// Shares the s-grid of the defining integral across many z at fixed v.
class GFunBatch {
 public:
  explicit GFunBatch(double v, int order_per_panel = 24, int min_panels = 8);
  cplx operator()(cplx z) const;
  double v() const { return v_; }

 private:
  double v_;
  cplx m_v_;                    // M(1/2,1,2v)
  std::vector<double> s_;      // nodes in [0, v]
  std::vector<double> w_;      // weights
  std::vector<cplx> m_s_;      // M(1/2,1,2 s_i)
};

// Antisymmetric two-point weight via its double contour representation
// (two circles of radius < 1/2 around the origin). Real and antisymmetric.
double weight_e(double u, double v, int order = 128, double radius = 0.35);

// Direct 2D quadrature of the defining double integral in rotated
// coordinates (independent oracle path).
double weight_e_quad_oracle(double u, double v, int order = 96);

// batch[p][q] = weight_e(eta a[p], eta b[q]) sharing the contour tensor
std::vector<std::vector<double>> weight_e_batch(const std::vector<double>& a,
                                                const std::vector<double>& b, double eta,
                                                int order = 128, double radius = 0.35);

// Closed form of the Gaussian pair integral:
//   4 pi (alpha - beta) / ((1 - alpha - beta) sqrt(1-2alpha) sqrt(1-2beta)).
cplx gauss_pair_integral(cplx alpha, cplx beta);
// Its 2D quadrature witness (real parameters < 1/2).
double gauss_pair_integral_quad(double alpha, double beta, int order = 80);

// (g_a(u), alpha_{a,b}) of the joint-density Pfaffian border blocks,
// a,b >= 1, via Cauchy coefficient extraction of the pair-integral formula.
std::pair<double, double> g_a_alpha(int a, int b, double u, double eta_minus);

double g_a_value(int a, double u, double eta_minus);
double alpha_ab_value(int a, int b, double eta_minus);
// quadrature oracles for the two quantities above
double g_a_quad_oracle(int a, double u, double eta_minus, int order = 96);
double alpha_ab_quad_oracle(int a, int b, double eta_minus, int order = 96);

}  // namespace espike
