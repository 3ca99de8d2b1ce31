#include "espike/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace espike {

void SpikeConfig::validate() const {
  if (N < 1 || M < N) throw PreconditionError("SpikeConfig: need M >= N >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("SpikeConfig: tau must be in (0,1)");
  if (static_cast<int>(sigma.size()) != N)
    throw PreconditionError("SpikeConfig: sigma must have N entries");
  for (double s : sigma)
    if (!(s > tau))
      throw PreconditionError(
          "SpikeConfig: every sigma_k must exceed tau (density not normalizable)");
}

SpikeConfig SpikeConfig::identity_sigma(int m, int n, double tau) {
  SpikeConfig cfg;
  cfg.M = m;
  cfg.N = n;
  cfg.tau = tau;
  cfg.sigma.assign(n, 1.0);
  return cfg;
}

ComplexMatrix sample_gue(int n, RngStream& rng) {
  if (n < 1) throw PreconditionError("sample_gue: n >= 1 required");
  ComplexMatrix h(n, n);
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  for (int i = 0; i < n; ++i) {
    h(i, i) = rng.gaussian() * inv_sqrt2;  // variance 1/2
    for (int j = i + 1; j < n; ++j) {
      // E|H_ij|^2 = 1/2: real and imaginary parts N(0, 1/4)
      cplx v = 0.5 * cplx(rng.gaussian(), rng.gaussian());
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

ComplexMatrix sample_elliptic(int n, double tau, RngStream& rng) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw PreconditionError("sample_elliptic: tau must be in [0,1]");
  ComplexMatrix h1 = sample_gue(n, rng);
  ComplexMatrix h2 = sample_gue(n, rng);
  double c1 = std::sqrt(1.0 + tau), c2 = std::sqrt(1.0 - tau);
  ComplexMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = c1 * h1(i, j) + cplx(0.0, c2) * h2(i, j);
  return x;
}

ComplexMatrix sample_spiked(const SpikeConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int M = cfg.M, N = cfg.N;
  const double ep = cfg.eta_plus(), em = cfg.eta_minus();
  ComplexMatrix x(M, N);

  // diagonal entries: real/imag parts have precisions 2(ep*s -/+ em)
  for (int j = 0; j < N; ++j) {
    double s = cfg.sigma[j];
    double re = rng.gaussian() / std::sqrt(2.0 * (ep * s - em));
    double im = rng.gaussian() / std::sqrt(2.0 * (ep * s + em));
    x(j, j) = cplx(re, im);
  }
  // coupled pairs (i<j<=N): 2x2 covariance Cholesky per real/imag channel
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      double si = cfg.sigma[i], sj = cfg.sigma[j];
      double det = 2.0 * (ep * ep * si * sj - em * em);
      // covariance of (Re X_ij, Re X_ji): [[ep*si, em],[em, ep*sj]] / det
      double c11 = ep * si / det, c12 = em / det, c22 = ep * sj / det;
      double l11 = std::sqrt(c11);
      double l21 = c12 / l11;
      double l22 = std::sqrt(c22 - l21 * l21);
      double g1 = rng.gaussian(), g2 = rng.gaussian();
      double re_ij = l11 * g1;
      double re_ji = l21 * g1 + l22 * g2;
      // imaginary channel has covariance [[ep*si, -em],[-em, ep*sj]] / det
      double m21 = -c12 / l11;
      double m22 = std::sqrt(c22 - m21 * m21);
      double h1 = rng.gaussian(), h2 = rng.gaussian();
      double im_ij = l11 * h1;
      double im_ji = m21 * h1 + m22 * h2;
      x(i, j) = cplx(re_ij, im_ij);
      x(j, i) = cplx(re_ji, im_ji);
    }
  }
  // lower block rows: independent complex Gaussians, E|X_ij|^2 = 1/(ep*sigma_j)
  for (int i = N; i < M; ++i) {
    for (int j = 0; j < N; ++j) {
      double sd = 1.0 / std::sqrt(2.0 * ep * cfg.sigma[j]);
      x(i, j) = cplx(rng.gaussian() * sd, rng.gaussian() * sd);
    }
  }
  return x;
}

SpectrumSample singular_spectrum(const ComplexMatrix& x) {
  ComplexMatrix w = x.adjoint() * x;
  double scale = w.frobenius_norm();
  auto ev = hermitian_eigenvalues(w);
  for (double& v : ev) {
    if (v < 0.0) {
      if (v < -1e-12 * std::max(1.0, scale))
        throw NumericalError("singular_spectrum: significantly negative eigenvalue " +
                             std::to_string(v));
      v = 0.0;
    }
  }
  SpectrumSample out;
  out.eigenvalues = std::move(ev);
  return out;
}

McSummary mc_collect(const SpikeConfig& cfg, int n_samples, McStatistic stat,
                     std::uint64_t seed, int threads, const std::vector<double>& hist_edges) {
  cfg.validate();
  if (n_samples < 1) throw PreconditionError("mc_collect: n_samples >= 1 required");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_samples));

  McSummary out;
  out.samples.assign(n_samples, {});
  auto worker = [&](int first, int last) {
    for (int i = first; i < last; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      auto spec = singular_spectrum(sample_spiked(cfg, rng));
      switch (stat) {
        case McStatistic::all_eigs:
          out.samples[i] = std::move(spec.eigenvalues);
          break;
        case McStatistic::max_eig:
          out.samples[i] = {spec.eigenvalues.back()};
          break;
        case McStatistic::min_eig:
          out.samples[i] = {spec.eigenvalues.front()};
          break;
      }
    }
  };
  if (threads == 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    int chunk = (n_samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int a = t * chunk, b = std::min(n_samples, (t + 1) * chunk);
      if (a >= b) break;
      pool.emplace_back(worker, a, b);
    }
    for (auto& th : pool) th.join();
  }

  // pooled mean/variance over every collected value, in sample order
  double s1 = 0.0, s2 = 0.0;
  std::size_t count = 0;
  for (const auto& row : out.samples)
    for (double v : row) {
      s1 += v;
      s2 += v * v;
      ++count;
    }
  out.mean = s1 / double(count);
  out.variance = s2 / double(count) - out.mean * out.mean;

  if (!hist_edges.empty()) {
    out.hist_edges = hist_edges;
    out.hist_counts.assign(hist_edges.size() - 1, 0.0);
    for (const auto& row : out.samples)
      for (double v : row) {
        auto it = std::upper_bound(hist_edges.begin(), hist_edges.end(), v);
        int bin = static_cast<int>(it - hist_edges.begin()) - 1;
        if (bin >= 0 && bin < static_cast<int>(out.hist_counts.size())) out.hist_counts[bin] += 1.0;
      }
  }
  return out;
}

std::string spectra_to_csv(const std::vector<std::vector<double>>& samples) {
  std::string s;
  char buf[40];
  for (const auto& row : samples) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      s += buf;
      if (j + 1 < row.size()) s += ',';
    }
    s += '\n';
  }
  return s;
}

}  // namespace espike
