#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "espike/ensemble.hpp"
#include "espike/kernel_limit.hpp"

namespace espike {

enum class DistFamily { f_soft, f_m, g_m, f_gue };

enum class DistMethod { nystrom, series_k };

// Limiting-distribution descriptor consumed by the evaluator.
struct DistSpec {
  DistFamily family = DistFamily::f_gue;
  double kappa = 0.0;          // f_soft only
  std::vector<double> pi;      // source / spike parameters
  int n_q = 48;                // Nystrom nodes
  double domain_cap = 12.0;    // integration window [x, x + cap]
  DistMethod method = DistMethod::nystrom;

  void validate() const;
};

// Distribution value at x: Nystrom determinant for the determinantal
// families, Nystrom Pfaffian of J - K_h (sqrt-weight symmetrized) for the
// Pfaffian family.
double eval_dist(const DistSpec& spec, double x);
// Shares kernel machinery across the grid; same values as eval_dist.
std::vector<double> eval_dist_grid(const DistSpec& spec, const std::vector<double>& xs);

// Truncated alternating-series value with k-dimensional tensor quadrature,
// k_max in {1,2,3}; independent cross-check of the Nystrom route for x >= 0.
double series_truncation(const DistSpec& spec, double x, int k_max, int nodes_1d = 24);

// mean of the distribution by quadrature of x dF over [lo, hi]
double dist_mean(const DistSpec& spec, double lo = -8.0, double hi = 8.0, int grid = 160);

// Kolmogorov-Smirnov distance of samples against a model CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct McDistResult {
  std::vector<double> rescaled;  // rescaled samples, sorted
  double ks = 0.0;
  double sample_mean = 0.0;
  double model_mean = 0.0;
  double model_sd = 0.0;
};

// GUE largest eigenvalue (density exp(-Tr H^2 / 2)) against F_GUE.
McDistResult mc_check_gue_edge(int n, int n_samples, std::uint64_t seed, int threads = 0);
// largest eigenvalue of H^2 against F_GUE(2^{-2/3} x)^2.
McDistResult mc_check_gue_squared(int n, int n_samples, std::uint64_t seed, int threads = 0);
// supercritical spike: rescaled largest eigenvalue against the m = 1
// source-GUE distribution (pi_1 = 0 gives a standard Gaussian).
McDistResult mc_check_outlier(int n, double tau, double theta, double pi1, int n_samples,
                              std::uint64_t seed, int threads = 0);

}  // namespace espike
