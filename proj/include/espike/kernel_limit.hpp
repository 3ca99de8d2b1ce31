#pragma once
#include <utility>
#include <vector>

#include "espike/contour.hpp"
#include "espike/specfun.hpp"

namespace espike {

struct KernelTriple {
  double ds = 0.0, s = 0.0, is = 0.0;
};

// Soft-edge crossover family parameters. delta <= 0 picks contour vertices
// adapted to kappa (Cauchy-equivalent); delta > 0 pins the paper-standard
// vertices delta/2 and delta (requires delta < min pi_k when m >= 1).
struct SoftParams {
  double kappa = 0.0;
  std::vector<double> pi;  // pi_k > 0 for the crossover family
  double delta = 0.0;

  void validate() const;
};

// Double-contour evaluator for the interpolating soft-edge kernel triple.
// S pairs a left wedge with a right wedge; DS uses two right wedges; IS uses
// two left wedges whose crossing is handled by mirror-symmetric panels
// geometrically refined toward the crossing parameter.
class SoftKernel {
 public:
  explicit SoftKernel(const SoftParams& p, double arg_max = 14.0, int order = 16,
                      int refine_levels = 24);

  double s(double u, double v) const;
  double ds(double u, double v) const;
  double is(double u, double v) const;
  KernelTriple eval(double u, double v) const;

  // kernel minus its spikeless base, evaluated as one regular integrand
  double s_minus_base(double u, double v) const;
  double ds_minus_base(double u, double v) const;
  double is_minus_base(double u, double v) const;

  // grid[i][j] = s(us[i], vs[j]) (used by the Fredholm assembly)
  std::vector<std::vector<double>> s_grid(const std::vector<double>& us,
                                          const std::vector<double>& vs) const;
  std::vector<std::vector<double>> ds_grid(const std::vector<double>& us,
                                           const std::vector<double>& vs) const;
  std::vector<std::vector<double>> is_grid(const std::vector<double>& us,
                                           const std::vector<double>& vs) const;

 private:
  SoftParams p_;
  Contour zg_, wl_;  // S: z on the left-opening wedge, w on the right-opening wedge
  Contour dsc_;      // DS: both variables on this right-opening wedge
  Contour isc_;      // IS: both variables on this left-opening wedge
  double vis_ = 0.0;  // IS wedge vertex (crossing parameter = 2 vis_)
  // residue-tail term that removes the IS contour-vertex dependence
  // (requires v >= u; the kernel uses antisymmetry for the other order)
  double is_tail(double u, double v) const;
};

double sine_kernel(double u, double v);

// Generalized Airy functions of the soft-edge family; kind is 1 or 2, p the
// number of spike factors carried, deriv the derivative order (0..3).
double gen_airy(int kind, int p, double kappa, const std::vector<double>& pi, double u,
                int deriv = 0, double r_cut = 14.0, int order = 20);

// Integrable (bilinear) form of the spikeless S kernel.
double soft_s_integrable(double kappa, double u, double v);

// Airy kernel with external source parameters (BBP) and the finite
// source-GUE kernel; both as double contour integrals.
double airy_source_kernel(const std::vector<double>& pi, double u, double v,
                          double r_cut = 14.0, int order = 20);
double gue_source_kernel(const std::vector<double>& pi, double u, double v);

// grid[i][j] = K(us[i], vs[j]) sharing the contour data across the grid
std::vector<std::vector<double>> airy_source_kernel_grid(const std::vector<double>& pi,
                                                         const std::vector<double>& us,
                                                         const std::vector<double>& vs,
                                                         double r_cut = 14.0, int order = 20);
std::vector<std::vector<double>> gue_source_kernel_grid(const std::vector<double>& pi,
                                                        const std::vector<double>& us,
                                                        const std::vector<double>& vs);

// Airy function (series + asymptotic) and the classical Airy-integral
// kernel oracle int_0^inf Ai(u+t) Ai(v+t) dt.
double airy_ai(double x);
double airy_kernel_oracle(double u, double v, int order = 48);

struct HardParams {
  double kappa = 1.0;
  int alpha = 0;                 // M - N
  std::vector<double> sigma;     // hard-edge spikes in (1, inf); empty for none
  double delta = 0.4;            // contour intersection height

  void validate() const;
};

// Hard-edge crossover kernels. DS carries the explicit imaginary-part line
// integral over t in (0, delta) plus the principal-value double contour
// term with the tau = 1 crossing factor psi_{n,alpha,1}. S and IS evaluate
// the matching finite-size kernels at tau = 1 - kappa/N on bounded-product
// level contours and extrapolate N to infinity (the compact closed forms
// hold only for the DS entry; the finite-size oracle fixes the other two).
class HardKernel {
 public:
  explicit HardKernel(const HardParams& p, int order = 24, int refine_levels = 22);

  double ds(double u, double v) const;
  double s(double u, double v) const;
  double is(double u, double v) const;
  KernelTriple eval(double u, double v) const;

  // single finite-size evaluation on the level contours (exposed for the
  // convergence tests); which: 0 = S (scaled), 1 = DS (scaled), 2 = IS
  double finite_kernel(int n, int which, double u, double v, int nodes = 0) const;

 private:
  HardParams p_;
  std::vector<cplx> zn_, zw_;  // left contour C (z variable)
  std::vector<cplx> wn_, ww_;  // right contour Sigma (w variable)
  std::vector<std::vector<cplx>> r_;  // psi * essential factors * weights
  QuadRule tline_;                    // nodes on (0, delta)
  cplx psi(cplx z, cplx w) const;
  std::vector<cplx> w_profile(double u) const;  // D_i(u) = sum_j R_ij B_j(u)
  double ds_raw(double u, double v) const;
  double ds_line(double u, double v) const;
  double extrapolate(int which, double u, double v) const;
};

enum class Regime { bulk, soft_critical, soft_fixed_tau, outlier, hard };

struct ScalingRegime {
  Regime regime = Regime::bulk;
  double x = 2.0;      // bulk position in (0,4)
  double tau = 0.5;    // outlier parameters
  double theta = 1.1;  // 1 < theta < (tau + 1/tau)/2
};

// (center, scale) with lambda = center + scale * u
std::pair<double, double> scaling_map(const ScalingRegime& r, int n);

double bulk_density(double x);                  // (1/2pi) sqrt((4-x)/x)
double outlier_x(double tau, double theta);     // outlier location map
double outlier_h(double tau, double theta);     // outlier scale map

}  // namespace espike
