#include "espike/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "espike/pfaffian.hpp"

namespace espike {

void DistSpec::validate() const {
  if (n_q < 16) throw PreconditionError("DistSpec: n_q >= 16 required");
  if (!(domain_cap > 0.0)) throw PreconditionError("DistSpec: domain cap must be positive");
  switch (family) {
    case DistFamily::f_soft:
      if (!(kappa >= 0.0)) throw PreconditionError("DistSpec: kappa >= 0 for the soft family");
      for (double p : pi)
        if (!(p > 0.0))
          throw PreconditionError("DistSpec: soft-family spikes must be positive");
      break;
    case DistFamily::g_m:
      if (pi.empty()) throw PreconditionError("DistSpec: g_m needs at least one parameter");
      break;
    case DistFamily::f_gue:
      if (!pi.empty()) throw PreconditionError("DistSpec: f_gue takes no parameters");
      break;
    case DistFamily::f_m:
      break;
  }
}

namespace {

// scalar-kernel matrix for the determinantal families on given nodes
std::vector<std::vector<double>> family_kernel_grid(const DistSpec& spec,
                                                    const std::vector<double>& t) {
  switch (spec.family) {
    case DistFamily::f_gue:
      return airy_source_kernel_grid({}, t, t);
    case DistFamily::f_m:
      return airy_source_kernel_grid(spec.pi, t, t);
    case DistFamily::g_m:
      return gue_source_kernel_grid(spec.pi, t, t);
    default:
      throw PreconditionError("family_kernel_grid: determinantal families only");
  }
}

double nystrom_det(const DistSpec& spec, double x, int n_q) {
  QuadRule q = gauss_legendre_rule(n_q, x, x + spec.domain_cap);
  std::vector<double> t(n_q), w(n_q);
  for (int i = 0; i < n_q; ++i) {
    t[i] = std::real(q.nodes[i]);
    w[i] = std::real(q.weights[i]);
  }
  auto k = family_kernel_grid(spec, t);
  ComplexMatrix a(n_q, n_q);
  for (int i = 0; i < n_q; ++i)
    for (int j = 0; j < n_q; ++j)
      a(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(w[i] * w[j]) * k[i][j];
  return std::real(determinant(a));
}

double nystrom_pf(const DistSpec& spec, double x, int n_q) {
  QuadRule q = gauss_legendre_rule(n_q, x, x + spec.domain_cap);
  std::vector<double> t(n_q), w(n_q);
  for (int i = 0; i < n_q; ++i) {
    t[i] = std::real(q.nodes[i]);
    w[i] = std::real(q.weights[i]);
  }
  SoftParams p;
  p.kappa = spec.kappa;
  p.pi = spec.pi;
  SoftKernel kernel(p, std::max(std::abs(x), std::abs(x + spec.domain_cap)) + 2.0);
  auto dsg = kernel.ds_grid(t, t);
  auto sg = kernel.s_grid(t, t);
  auto isg = kernel.is_grid(t, t);
  ComplexMatrix a(2 * n_q, 2 * n_q);
  for (int i = 0; i < n_q; ++i) {
    for (int j = 0; j < n_q; ++j) {
      double sw = std::sqrt(w[i] * w[j]);
      double dsv = (i == j) ? 0.0 : 0.5 * (dsg[i][j] - dsg[j][i]);
      double isv = (i == j) ? 0.0 : 0.5 * (isg[i][j] - isg[j][i]);
      a(2 * i, 2 * j) = -sw * dsv;
      a(2 * i, 2 * j + 1) = (i == j ? 1.0 : 0.0) - sw * sg[i][j];
      a(2 * i + 1, 2 * j) = -(j == i ? 1.0 : 0.0) + sw * sg[j][i];
      a(2 * i + 1, 2 * j + 1) = -sw * isv;
    }
  }
  return std::real(pfaffian(a, 1e-8));
}

}  // namespace

double eval_dist(const DistSpec& spec, double x) {
  spec.validate();
  if (spec.family == DistFamily::f_soft) return nystrom_pf(spec, x, spec.n_q);
  return nystrom_det(spec, x, spec.n_q);
}

std::vector<double> eval_dist_grid(const DistSpec& spec, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = eval_dist(spec, xs[i]);
  return out;
}

double series_truncation(const DistSpec& spec, double x, int k_max, int nodes_1d) {
  spec.validate();
  if (k_max < 1 || k_max > 3) throw PreconditionError("series_truncation: k_max in {1,2,3}");
  QuadRule q = gauss_legendre_rule(nodes_1d, x, x + spec.domain_cap);
  const int m = nodes_1d;
  std::vector<double> t(m), w(m);
  for (int i = 0; i < m; ++i) {
    t[i] = std::real(q.nodes[i]);
    w[i] = std::real(q.weights[i]);
  }
  double total = 1.0;
  if (spec.family != DistFamily::f_soft) {
    auto k = family_kernel_grid(spec, t);
    // k = 1
    double s1 = 0.0;
    for (int i = 0; i < m; ++i) s1 += w[i] * k[i][i];
    total -= s1;
    if (k_max >= 2) {
      double s2 = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          s2 += w[i] * w[j] * (k[i][i] * k[j][j] - k[i][j] * k[j][i]);
      total += s2 / 2.0;
    }
    if (k_max >= 3) {
      double s3 = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double wij = w[i] * w[j];
          for (int l = 0; l < m; ++l) {
            double det = k[i][i] * (k[j][j] * k[l][l] - k[j][l] * k[l][j]) -
                         k[i][j] * (k[j][i] * k[l][l] - k[j][l] * k[l][i]) +
                         k[i][l] * (k[j][i] * k[l][j] - k[j][j] * k[l][i]);
            s3 += wij * w[l] * det;
          }
        }
      total -= s3 / 6.0;
    }
    return total;
  }
  // Pfaffian family
  SoftParams p;
  p.kappa = spec.kappa;
  p.pi = spec.pi;
  SoftKernel kernel(p, std::max(std::abs(x), std::abs(x + spec.domain_cap)) + 2.0);
  auto dsg = kernel.ds_grid(t, t);
  auto sg = kernel.s_grid(t, t);
  auto isg = kernel.is_grid(t, t);
  auto pf_block = [&](const std::vector<int>& idx) -> double {
    const int k = static_cast<int>(idx.size());
    ComplexMatrix a(2 * k, 2 * k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        int i = idx[r], j = idx[c];
        double dsv = (i == j) ? 0.0 : 0.5 * (dsg[i][j] - dsg[j][i]);
        double isv = (i == j) ? 0.0 : 0.5 * (isg[i][j] - isg[j][i]);
        a(2 * r, 2 * c) = dsv;
        a(2 * r, 2 * c + 1) = sg[i][j];
        a(2 * r + 1, 2 * c) = -sg[j][i];
        a(2 * r + 1, 2 * c + 1) = isv;
      }
    if (k == 1) return std::real(a(0, 1));
    return std::real(pfaffian(a, 1e-7));
  };
  double s1 = 0.0;
  for (int i = 0; i < m; ++i) s1 += w[i] * pf_block({i});
  total -= s1;
  if (k_max >= 2) {
    double s2 = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s2 += w[i] * w[j] * pf_block({i, j});
    total += s2 / 2.0;
  }
  if (k_max >= 3) {
    double s3 = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double wij = w[i] * w[j];
        for (int l = 0; l < m; ++l) s3 += wij * w[l] * pf_block({i, j, l});
      }
    total -= s3 / 6.0;
  }
  return total;
}

double dist_mean(const DistSpec& spec, double lo, double hi, int grid) {
  std::vector<double> xs(grid);
  for (int i = 0; i < grid; ++i) xs[i] = lo + (hi - lo) * i / (grid - 1);
  auto f = eval_dist_grid(spec, xs);
  // mean = hi F(hi) - lo F(lo) - int_lo^hi F dx, with F(hi) ~ 1
  double acc = 0.0;
  for (int i = 0; i + 1 < grid; ++i)
    acc += 0.5 * (f[i] + f[i + 1]) * (xs[i + 1] - xs[i]);
  return hi * f[grid - 1] - lo * f[0] - acc;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double fv = cdf(samples[i]);
    d = std::max(d, std::abs(fv - double(i) / n));
    d = std::max(d, std::abs(fv - double(i + 1) / n));
  }
  return d;
}

namespace {

// linear interpolation of a monotone table
double interp_cdf(const std::vector<double>& xs, const std::vector<double>& fs, double x) {
  if (x <= xs.front()) return std::max(0.0, fs.front());
  if (x >= xs.back()) return std::min(1.0, fs.back());
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = it - xs.begin();
  double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return fs[j - 1] + t * (fs[j] - fs[j - 1]);
}

// eigenvalue extremes of GUE with density exp(-Tr H^2 / 2)
void gue_extremes(int n, int n_samples, std::uint64_t seed, int threads,
                  std::vector<double>& lmax, std::vector<double>& lmin) {
  lmax.assign(n_samples, 0.0);
  lmin.assign(n_samples, 0.0);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_samples));
  auto worker = [&](int a, int b) {
    const double sq2 = std::sqrt(2.0);
    for (int i = a; i < b; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      ComplexMatrix h = sample_gue(n, rng);
      for (auto& v : h.data()) v *= sq2;
      auto ev = hermitian_eigenvalues(h);
      lmin[i] = ev.front();
      lmax[i] = ev.back();
    }
  };
  std::vector<std::thread> pool;
  int chunk = (n_samples + threads - 1) / threads;
  for (int tt = 0; tt < threads; ++tt) {
    int a = tt * chunk, b = std::min(n_samples, (tt + 1) * chunk);
    if (a >= b) break;
    pool.emplace_back(worker, a, b);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

McDistResult mc_check_gue_edge(int n, int n_samples, std::uint64_t seed, int threads) {
  std::vector<double> lmax, lmin;
  gue_extremes(n, n_samples, seed, threads, lmax, lmin);
  McDistResult res;
  res.rescaled.resize(n_samples);
  double scale = std::pow(double(n), 1.0 / 6.0);
  for (int i = 0; i < n_samples; ++i)
    res.rescaled[i] = (lmax[i] - 2.0 * std::sqrt(double(n))) * scale;
  std::sort(res.rescaled.begin(), res.rescaled.end());

  DistSpec spec;
  spec.family = DistFamily::f_gue;
  std::vector<double> xs;
  for (double x = -6.0; x <= 4.0 + 1e-9; x += 0.2) xs.push_back(x);
  auto fs = eval_dist_grid(spec, xs);
  res.ks = ks_distance(res.rescaled, [&](double x) { return interp_cdf(xs, fs, x); });
  double s = 0.0;
  for (double v : res.rescaled) s += v;
  res.sample_mean = s / n_samples;
  return res;
}

McDistResult mc_check_gue_squared(int n, int n_samples, std::uint64_t seed, int threads) {
  std::vector<double> lmax, lmin;
  gue_extremes(n, n_samples, seed, threads, lmax, lmin);
  McDistResult res;
  res.rescaled.resize(n_samples);
  double scale = std::pow(2.0, -4.0 / 3.0) * std::pow(double(n), -1.0 / 3.0);
  for (int i = 0; i < n_samples; ++i) {
    double m2 = std::max(lmax[i] * lmax[i], lmin[i] * lmin[i]);
    res.rescaled[i] = scale * (m2 - 4.0 * double(n));
  }
  std::sort(res.rescaled.begin(), res.rescaled.end());
  DistSpec spec;
  spec.family = DistFamily::f_gue;
  std::vector<double> xs;
  for (double x = -6.0; x <= 5.0 + 1e-9; x += 0.2) xs.push_back(x);
  auto fs = eval_dist_grid(spec, xs);
  double c = std::pow(2.0, -2.0 / 3.0);
  res.ks = ks_distance(res.rescaled, [&](double x) {
    double f = interp_cdf(xs, fs, c * x);
    return f * f;
  });
  double s = 0.0;
  for (double v : res.rescaled) s += v;
  res.sample_mean = s / n_samples;
  return res;
}

McDistResult mc_check_outlier(int n, double tau, double theta, double pi1, int n_samples,
                              std::uint64_t seed, int threads) {
  SpikeConfig cfg = SpikeConfig::identity_sigma(n, n, tau);
  double h = outlier_h(tau, theta);
  cfg.sigma[0] = tau * theta + tau * h * pi1 / std::sqrt(double(n));
  cfg.validate();
  auto sm = scaling_map({Regime::outlier, 0.0, tau, theta}, n);

  std::vector<double> lmax(n_samples, 0.0);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_samples));
  auto worker = [&](int a, int b) {
    for (int i = a; i < b; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      ComplexMatrix x = sample_spiked(cfg, rng);
      lmax[i] = largest_singular_sq(x, 1e-10, 3000, seed * 31 + i);
    }
  };
  std::vector<std::thread> pool;
  int chunk = (n_samples + threads - 1) / threads;
  for (int tt = 0; tt < threads; ++tt) {
    int a = tt * chunk, b = std::min(n_samples, (tt + 1) * chunk);
    if (a >= b) break;
    pool.emplace_back(worker, a, b);
  }
  for (auto& th : pool) th.join();

  McDistResult res;
  res.rescaled.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) res.rescaled[i] = (lmax[i] - sm.first) / sm.second;
  std::sort(res.rescaled.begin(), res.rescaled.end());
  double s = 0.0, s2 = 0.0;
  for (double v : res.rescaled) {
    s += v;
    s2 += v * v;
  }
  res.sample_mean = s / n_samples;

  DistSpec spec;
  spec.family = DistFamily::g_m;
  spec.pi = {pi1};
  res.model_mean = dist_mean(spec, -8.0, 8.0, 120);
  // model sd by quadrature of x^2 dF
  {
    std::vector<double> xs;
    for (double x = -8.0; x <= 8.0 + 1e-9; x += 0.2) xs.push_back(x);
    auto fs = eval_dist_grid(spec, xs);
    double m2 = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      double xm = 0.5 * (xs[i] + xs[i + 1]);
      m2 += xm * xm * (fs[i + 1] - fs[i]);
    }
    res.model_sd = std::sqrt(std::max(0.0, m2 - res.model_mean * res.model_mean));
    res.ks = ks_distance(res.rescaled, [&](double x) { return interp_cdf(xs, fs, x); });
  }
  return res;
}

}  // namespace espike
