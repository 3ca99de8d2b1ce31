#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "espike/linalg.hpp"
#include "espike/rng.hpp"

namespace espike {

// Parameters of the spiked rectangular ensemble. Sigma is diagonal
// (spectral statistics depend only on its eigenvalues); entries must
// exceed tau for the density to be normalizable.
struct SpikeConfig {
  int M = 2;
  int N = 2;
  double tau = 0.5;
  std::vector<double> sigma;  // length N

  double eta_plus() const { return 1.0 / (1.0 - tau * tau); }
  double eta_minus() const { return tau / (1.0 - tau * tau); }
  double rho(int k) const { return tau / (sigma[k] + tau); }

  void validate() const;
  static SpikeConfig identity_sigma(int m, int n, double tau);
};

struct SpectrumSample {
  std::vector<double> eigenvalues;  // ascending, eigenvalues of X^* X
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// GUE draw with matrix density proportional to exp(-Tr H^2):
// diagonal N(0,1/2), off-diagonal complex with E|H_ij|^2 = 1/2.
ComplexMatrix sample_gue(int n, RngStream& rng);

// X = sqrt(1+tau) H1 + i sqrt(1-tau) H2 with independent GUE factors.
ComplexMatrix sample_elliptic(int n, double tau, RngStream& rng);

// Spiked ensemble draw via the per-block Gaussian decomposition of the
// density exponent: independent lower-block entries, diagonal entries with
// split real/imaginary precisions, and coupled (i,j)/(j,i) pairs sampled
// from 2x2 covariance Cholesky factors.
ComplexMatrix sample_spiked(const SpikeConfig& cfg, RngStream& rng);

SpectrumSample singular_spectrum(const ComplexMatrix& x);

enum class McStatistic { all_eigs, max_eig, min_eig };

struct McSummary {
  std::vector<std::vector<double>> samples;  // one row per sample
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> hist_edges;
  std::vector<double> hist_counts;
};

// Deterministic given seed: sample i always uses stream id = i, so the
// result does not depend on the number of worker threads.
McSummary mc_collect(const SpikeConfig& cfg, int n_samples, McStatistic stat,
                     std::uint64_t seed, int threads = 0,
                     const std::vector<double>& hist_edges = {});

std::string spectra_to_csv(const std::vector<std::vector<double>>& samples);

}  // namespace espike
