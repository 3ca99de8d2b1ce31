// Acceptance suite: one pass/fail line per criterion, pinned tolerances.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "espike/ensemble.hpp"
#include "espike/fredholm.hpp"
#include "espike/kernel_finite.hpp"
#include "espike/kernel_limit.hpp"
#include "espike/pfaffian.hpp"
#include "espike/quadrature.hpp"
#include "espike/rng.hpp"
#include "espike/specfun.hpp"

using namespace espike;

namespace {

struct Item {
  std::string name;
  double measured;
  double tol;
  bool gated = true;  // reported-only items have gated = false
  bool pass() const { return !gated || measured <= tol; }
};

struct Criterion {
  std::string title;
  std::vector<Item> items;
  bool pass() const {
    for (const auto& i : items)
      if (!i.pass()) return false;
    return true;
  }
};

void print_criterion(int k, const Criterion& c) {
  std::printf("[%d] %-34s %s\n", k, c.title.c_str(), c.pass() ? "PASS" : "FAIL");
  for (const auto& i : c.items) {
    if (i.gated)
      std::printf("      %-52s %-4s  measured %.3e  tol %.1e\n", i.name.c_str(),
                  i.pass() ? "ok" : "FAIL", i.measured, i.tol);
    else
      std::printf("      %-52s info  measured %.3e\n", i.name.c_str(), i.measured);
  }
  std::fflush(stdout);
}

// ---------------------------------------------------------------- criterion 1
Criterion run_algebraic() {
  Criterion c{"algebraic identity suite", {}};
  {
    RngStream rng(7, 0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      double al = 0.8 * rng.uniform() - 0.4, be = 0.8 * rng.uniform() - 0.4;
      worst = std::max(worst, std::abs(std::real(gauss_pair_integral(al, be)) -
                                       gauss_pair_integral_quad(al, be)));
    }
    c.items.push_back({"pair-integral closed form vs 2D quadrature", worst, 1e-7});
  }
  {
    RngStream rng(11, 0);
    double worst = 0.0;
    for (int m : {2, 4, 6}) {
      std::vector<double> x(m);
      for (int i = 0; i < m; ++i) x[i] = 0.4 + 0.8 * i + 0.5 * rng.uniform();
      double lhs = schur_pfaffian_lhs(x);
      ComplexMatrix p(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          p(i, j) = (i == j) ? 0.0 : (x[i] - x[j]) / (x[i] + x[j]);
      worst = std::max(worst, std::abs(lhs - std::real(pfaffian(p))) / std::abs(lhs));
    }
    c.items.push_back({"schur pfaffian identity M in {2,4,6}", worst, 1e-9});
  }
  {
    RngStream rng(13, 0);
    double worst = 0.0;
    for (int m : {2, 4}) {
      std::vector<double> sup(5), wts(5);
      for (int i = 0; i < 5; ++i) {
        sup[i] = 0.3 + i + 0.4 * rng.uniform();
        wts[i] = 0.5 + rng.uniform();
      }
      std::vector<std::vector<double>> table(m, std::vector<double>(5));
      for (auto& row : table)
        for (auto& v : row) v = rng.gaussian();
      std::vector<std::function<cplx(double)>> phi;
      for (int f = 0; f < m; ++f)
        phi.push_back([&sup, &table, f](double x) {
          for (int i = 0; i < 5; ++i)
            if (x == sup[i]) return cplx(table[f][i]);
          return cplx(0.0);
        });
      auto eps = [](double x, double y) { return cplx(std::sin(x - y)); };
      auto [lhs, rhs] = de_bruijn_check(m, sup, wts, phi, eps);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    c.items.push_back({"discrete pfaffian integration identity m in {2,4}", worst, 1e-10});
  }
  {
    RngStream rng(17, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      cplx z{1.0 + rng.uniform(), rng.gaussian()};
      cplx w{2.5 + rng.uniform(), rng.gaussian()};
      std::vector<double> pi = {0.3 + rng.uniform(), 1.2 + rng.uniform(), 2.4};
      cplx lhs = (z + w) / (z - w);
      for (double pk : pi) lhs *= (z - pk) / (z + pk) * (w + pk) / (w - pk);
      cplx rhs = (z + w) / (z - w);
      for (std::size_t p = 1; p <= pi.size(); ++p) {
        cplx term = (w + pi[p - 1]) / (w - pi[p - 1]) - (z - pi[p - 1]) / (z + pi[p - 1]);
        for (std::size_t q = 1; q < p; ++q)
          term *= (z - pi[q - 1]) / (z + pi[q - 1]) * (w + pi[q - 1]) / (w - pi[q - 1]);
        rhs += term;
      }
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    c.items.push_back({"telescoping crossing identity", worst, 1e-12});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 2
Criterion run_dual_representations() {
  Criterion c{"dual-representation suite", {}};
  SpikeConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.tau = 0.5;
  cfg.sigma = {1.0, 1.3};
  FiniteKernel k(cfg);
  {
    double worst = 0.0;
    for (auto [u, v] : {std::pair{0.7, 1.3}, {1.0, 2.0}}) {
      double a = k.s(u, v), b = k.s_via_t_integral(u, v);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    c.items.push_back({"S_N contour form vs t-integrated form (N=M=2)", worst, 1e-6});
  }
  {
    SpikeConfig c4;
    c4.M = 4;
    c4.N = 2;
    c4.tau = 0.5;
    c4.sigma = {1.0, 1.3};
    GramKernel g(c4, {0.05, 0.10});
    double worst = 0.0;
    for (auto [u, v] : {std::pair{0.7, 1.3}, {1.5, 0.6}}) {
      double a = g.ds_sum(u, v), b = g.ds_contour(u, v);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    c.items.push_back({"gram-route kernels vs extended contours (N=2, n=2)", worst, 1e-7});
  }
  {
    double worst = 0.0;
    for (cplx z : {cplx(0.2, 0.0), cplx(0.5, 0.5), cplx(2.0, 0.0), cplx(1.0, 2.0)}) {
      for (double v : {0.5, 2.0, 10.0}) {
        cplx a = g_fun(z, v), b = g_fun_contour(z, v);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
      }
    }
    c.items.push_back({"g-function integral vs contour form", worst, 1e-9});
  }
  {
    double worst = 0.0;
    for (auto [u, v] : {std::pair{1.0, 2.0}, {0.4, 3.1}, {2.2, 0.3}}) {
      double a = weight_e(u, v), b = weight_e_quad_oracle(u, v, 140);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    c.items.push_back({"antisymmetric weight contour vs 2D quadrature", worst, 1e-7});
  }
  {
    double worst = 0.0;
    for (auto [u, v] : {std::pair{0.7, 1.3}, {1.0, 2.0}}) {
      double a = k.ds(u, v);
      double b = GramKernel::ds_contour_reduced(cfg, u, v);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    c.items.push_back({"extended-parameter reduction to the compact kernel", worst, 1e-7});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 3
Criterion run_oracles() {
  Criterion c{"oracle suite", {}};
  SpikeConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.tau = 0.5;
  cfg.sigma = {1.0, 1.3};
  FiniteKernel k(cfg);
  JointDensity jd(cfg, 0.0, 96);
  {
    double worst = 0.0;
    for (double l : {0.6, 1.5, 3.0}) {
      double a = k.r1(l), b = jd.r1(l);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    for (auto [a1, a2] : {std::pair{0.7, 1.9}, {1.2, 3.1}}) {
      double a = k.correlation_k({a1, a2}), b = jd.r2(a1, a2);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    c.items.push_back({"R1, R2 kernel pfaffian vs normalized density", worst, 1e-5});
  }
  {
    double v = k.normalization_integral(30.0);
    c.items.push_back({"int S_N(t,t) dt = N", std::abs(v - 2.0) / 2.0, 1e-4});
  }
  {
    double u = 0.8, v = 1.7;
    std::vector<double> x, w;
    gauss_legendre_raw(32, x, w);
    std::vector<double> tn, tw;
    for (int p = 0; p < 10; ++p) {
      double a = 3.0 * p, b = 3.0 * (p + 1);
      for (int i = 0; i < 32; ++i) {
        tn.push_back(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
        tw.push_back(0.5 * (b - a) * w[i]);
      }
    }
    auto left = k.s_grid({u}, tn);
    auto right = k.s_grid(tn, {v});
    double acc = 0.0;
    for (std::size_t q = 0; q < tn.size(); ++q) acc += tw[q] * left[0][q] * right[q][0];
    double expect = k.s(u, v);
    c.items.push_back({"reproducing property int S S = S", std::abs(acc - expect) / std::abs(expect), 1e-5});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 4
Criterion run_monte_carlo(bool quick) {
  Criterion c{"monte carlo statistical suite", {}};
  {
    // (a) one-point function vs histogram, N = M = 8, tau = 0.5
    const int n_samples = quick ? 20000 : 100000;
    SpikeConfig cfg = SpikeConfig::identity_sigma(8, 8, 0.5);
    std::vector<double> edges;
    for (int b = 0; b <= 20; ++b) edges.push_back(1.5 + b * (30.0 - 1.5) / 20.0);
    auto mc = mc_collect(cfg, n_samples, McStatistic::all_eigs, 20240801, 0, edges);
    FiniteKernel k(cfg, 2.0);
    std::vector<double> xq, wq;
    gauss_legendre_raw(12, xq, wq);
    double worst_sigmas = 0.0;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      double a = edges[b], e = edges[b + 1];
      double expect = 0.0;
      for (int i = 0; i < 12; ++i)
        expect += 0.5 * (e - a) * wq[i] * k.r1(0.5 * (a + e) + 0.5 * (e - a) * xq[i]);
      expect *= n_samples;
      double p = expect / (8.0 * n_samples);
      double sd = std::sqrt(8.0 * n_samples * p * (1.0 - p));
      worst_sigmas = std::max(worst_sigmas, std::abs(mc.hist_counts[b] - expect) / sd);
    }
    c.items.push_back({"one-point function vs 1e5-sample histogram (sigmas)", worst_sigmas, 3.0});
  }
  {
    // (b) bulk spectral density at N = 400
    const int n = 400, samples = quick ? 12 : 50;
    std::vector<double> all;
    for (int s = 0; s < samples; ++s) {
      RngStream rng(555, s);
      auto sp = singular_spectrum(sample_spiked(SpikeConfig::identity_sigma(n, n, 0.5), rng));
      for (double v : sp.eigenvalues) all.push_back(v / n);
    }
    const int nb = 20;
    double lo = 0.4, hi = 3.6, w = (hi - lo) / nb;
    std::vector<double> counts(nb, 0.0);
    for (double v : all) {
      int b = static_cast<int>(std::floor((v - lo) / w));
      if (b >= 0 && b < nb) counts[b] += 1.0;
    }
    double sup = 0.0;
    for (int b = 0; b < nb; ++b) {
      double xmid = lo + (b + 0.5) * w;
      double density = counts[b] / (samples * double(n) * w);
      sup = std::max(sup, std::abs(density - bulk_density(xmid)));
    }
    c.items.push_back({"bulk density N=400 vs (1/2pi)sqrt((4-x)/x)", sup, 0.02});
  }
  {
    // (c) largest eigenvalue vs the Tracy-Widom law
    auto r = mc_check_gue_edge(64, quick ? 1000 : 4000, 20240802);
    c.items.push_back({"gue largest eigenvalue KS vs F_GUE (N=64)", r.ks, 0.08});
    // (d) largest squared eigenvalue vs the squared law
    auto r2 = mc_check_gue_squared(64, quick ? 1000 : 4000, 20240803);
    c.items.push_back({"gue squared-eigenvalue KS vs F_GUE(2^{-2/3}x)^2", r2.ks, 0.08});
  }
  {
    // (e) supercritical spike: rescaled mean within the Monte Carlo CI
    const int samples = quick ? 200 : 600;
    auto r = mc_check_outlier(256, 0.5, 1.12, 0.0, samples, 20240804);
    double ci = 3.0 * r.model_sd / std::sqrt(double(samples));
    c.items.push_back({"outlier rescaled mean within 3-sigma CI of the m=1 law",
                       std::abs(r.sample_mean - r.model_mean), ci});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 5
Criterion run_limit_convergence() {
  Criterion c{"limit-kernel convergence suite", {}};
  {
    const int n = 32;
    const double x = 2.0;
    SpikeConfig cfg = SpikeConfig::identity_sigma(n, n, 0.5);
    FiniteKernel k(cfg, x, 384);
    double dens = bulk_density(x);
    double em = cfg.eta_minus();
    double rez = std::real(saddles(x, cfg.tau).z_minus);
    double worst = 0.0;
    for (double d : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      double l1 = n * x + 0.5 * d / dens, l2 = n * x - 0.5 * d / dens;
      double gauge = std::exp(em / dens * (rez + 1.0) * d);
      double got = gauge * k.s(l1, l2) / dens;
      worst = std::max(worst, std::abs(got - sine_kernel(0.5 * d, -0.5 * d)));
    }
    c.items.push_back({"bulk: rescaled S_N vs sine kernel (N=32, x=2)", worst, 5e-2});
  }
  {
    const double kap = 1.0;
    HardParams hp{kap, 0, {}, 0.4};
    HardKernel hk(hp);
    const int n = 8;
    SpikeConfig cfg = SpikeConfig::identity_sigma(n, n, 1.0 - kap / n);
    FiniteKernel fk(cfg);
    double em = cfg.eta_minus();
    double worst = 0.0;
    for (auto [u, v] : {std::pair{0.5, 1.0}, {1.0, 2.0}}) {
      double fin = (1.0 / (kap * em)) * fk.s(u / (kap * em), v / (kap * em));
      double lim = hk.s(u, v);
      worst = std::max(worst, std::abs(fin - lim) / std::abs(lim));
    }
    c.items.push_back({"hard edge: finite N=8 kernel vs limit (relative)", worst, 5e-2});
    HardParams p3{kap, 0, {}, 0.3}, p5{kap, 0, {}, 0.5};
    HardKernel k3(p3), k5(p5);
    double drift = std::abs(k3.ds(0.5, 1.0) - k5.ds(0.5, 1.0));
    c.items.push_back({"hard edge: delta-stability of DS (0.3 vs 0.5)", drift, 1e-6});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 6
Criterion run_crossover() {
  Criterion c{"crossover suite", {}};
  {
    // spikeless instance of the large-kappa limit (the 1/kappa terms cancel)
    SoftParams p{8.0, {}, 0.0};
    SoftKernel k(p);
    double worst = 0.0;
    for (double u = -2.0; u <= 2.01; u += 1.0)
      for (double v = -2.0; v <= 2.01; v += 2.0)
        worst = std::max(worst, std::abs(k.s(u, v) - airy_kernel_oracle(u, v)));
    c.items.push_back({"S(kappa=8) vs airy kernel on [-2,2]^2 (m=0)", worst, 5e-3});
    // one-spike deviation, reported with its 1/kappa scale
    SoftParams p1{8.0, {8.5}, 0.0};
    SoftKernel k1(p1);
    double dev = std::abs(k1.s(0.0, 1.0) - airy_source_kernel({0.5}, 0.0, 1.0));
    c.items.push_back({"S(kappa=8, pi+kappa) vs source kernel (m=1, O(1/k))", dev, 0.0, false});
  }
  {
    // decay of the off-diagonal entries over kappa in [4, 16]: the
    // gauge-invariant combination sqrt|DS IS| carries the kappa^{-2} rate
    // (the per-entry conjugated slopes are -2 +- m and are reported)
    std::vector<double> kaps = {4.0, 8.0, 16.0};
    std::vector<double> dsv, isv, prod;
    for (double kap : kaps) {
      SoftParams p{kap, {kap + 0.5}, 0.0};
      SoftKernel k(p);
      double d = std::abs(k.ds(0.3, 0.9)), i = std::abs(k.is(0.3, 0.9));
      dsv.push_back(d / (2.0 * kap));
      isv.push_back(i * (2.0 * kap));
      prod.push_back(std::sqrt(d * i));
    }
    double slope = std::log(prod[2] / prod[0]) / std::log(kaps[2] / kaps[0]);
    c.items.push_back({"off-diagonal decay exponent sqrt|DS IS| (-2 band 0.3)",
                       std::abs(slope + 2.0), 0.3});
    double slope_ds = std::log(dsv[2] / dsv[0]) / std::log(kaps[2] / kaps[0]);
    double slope_is = std::log(isv[2] / isv[0]) / std::log(kaps[2] / kaps[0]);
    c.items.push_back({"conjugated DS slope (m=1: -2+m expected)", -slope_ds, 0.0, false});
    c.items.push_back({"conjugated IS slope (m=1: -2-m expected)", -slope_is, 0.0, false});
  }
  {
    // bilinear spike decompositions, m in {1,2}
    double worst = 0.0;
    for (int m : {1, 2}) {
      std::vector<double> pi = m == 1 ? std::vector<double>{0.8} : std::vector<double>{0.8, 1.4};
      SoftParams p{1.0, pi, 0.0};
      SoftKernel k(p);
      for (auto [u, v] : {std::pair{0.2, 0.9}, {-0.6, 0.4}}) {
        double sum_s = 0.0, sum_ds = 0.0, sum_is = 0.0;
        for (int q = 1; q <= m; ++q) {
          double f1qu = gen_airy(1, q, 1.0, pi, u), f1q1u = gen_airy(1, q - 1, 1.0, pi, u);
          double f2qv = gen_airy(2, q, 1.0, pi, v), f2q1v = gen_airy(2, q - 1, 1.0, pi, v);
          double f1qv = gen_airy(1, q, 1.0, pi, v), f1q1v = gen_airy(1, q - 1, 1.0, pi, v);
          double f2qu = gen_airy(2, q, 1.0, pi, u), f2q1u = gen_airy(2, q - 1, 1.0, pi, u);
          sum_s += f1qu * f2q1v - f1q1u * f2qv;
          sum_ds += f1q1u * f1qv - f1qu * f1q1v;
          sum_is += f2q1u * f2qv - f2qu * f2q1v;
        }
        worst = std::max(worst, std::abs(k.s_minus_base(u, v) - sum_s));
        worst = std::max(worst, std::abs(k.ds_minus_base(u, v) - sum_ds));
        worst = std::max(worst, std::abs(k.is_minus_base(u, v) - sum_is));
      }
    }
    c.items.push_back({"spike decompositions of DS, S, IS", worst, 1e-8});
  }
  {
    double worst = 0.0;
    for (auto [u, v] : {std::pair{0.3, 1.1}, {-0.5, 0.8}}) {
      SoftParams p{1.0, {}, 0.0};
      SoftKernel k(p);
      worst = std::max(worst, std::abs(k.s(u, v) - soft_s_integrable(1.0, u, v)));
    }
    c.items.push_back({"integrable bilinear form of S", worst, 1e-7});
  }
  {
    double worst = 0.0;
    const double kap = 1.0, h = 1e-3;
    for (int kind : {1, 2}) {
      auto f = [&](double x) { return gen_airy(kind, 0, kap, {}, x); };
      double u = 0.5;
      double f0 = f(u);
      double d1 = (-f(u + 2 * h) + 8 * f(u + h) - 8 * f(u - h) + f(u - 2 * h)) / (12 * h);
      double d2 = (-f(u + 2 * h) + 16 * f(u + h) - 30 * f0 + 16 * f(u - h) - f(u - 2 * h)) /
                  (12 * h * h);
      double d3 = (f(u + 2 * h) - 2 * f(u + h) + 2 * f(u - h) - f(u - 2 * h)) / (2 * h * h * h);
      double resid = (kind == 1) ? d3 - kap * (d2 - u * f0) - u * d1 - 0.5 * f0
                                 : d3 + kap * (d2 - u * f0) - u * d1 - 0.5 * f0;
      worst = std::max(worst, std::abs(resid));
    }
    c.items.push_back({"third-order ODE residuals of the edge functions", worst, 1e-5});
  }
  return c;
}

// ---------------------------------------------------------------- criterion 7
Criterion run_distributions() {
  Criterion c{"distribution evaluator suite", {}};
  DistSpec tw;
  tw.family = DistFamily::f_gue;
  {
    double worst = 0.0;
    DistSpec tw2 = tw;
    tw2.n_q = 96;
    for (double x : {-4.0, 0.0}) worst = std::max(worst, std::abs(eval_dist(tw, x) - eval_dist(tw2, x)));
    DistSpec fs;
    fs.family = DistFamily::f_soft;
    fs.kappa = 1.0;
    DistSpec fs2 = fs;
    fs2.n_q = 96;
    worst = std::max(worst, std::abs(eval_dist(fs, -1.0) - eval_dist(fs2, -1.0)));
    c.items.push_back({"nystrom node-doubling stability", worst, 1e-6});
  }
  {
    double worst = std::abs(series_truncation(tw, 2.0, 1) - eval_dist(tw, 2.0));
    DistSpec fs;
    fs.family = DistFamily::f_soft;
    fs.kappa = 1.0;
    worst = std::max(worst, std::abs(series_truncation(fs, 1.0, 3) - eval_dist(fs, 1.0)));
    worst = std::max(worst, std::abs(series_truncation(fs, 0.0, 3) - eval_dist(fs, 0.0)));
    c.items.push_back({"series truncation (k <= 3) vs nystrom for x >= 0", worst, 1e-4});
  }
  {
    // independent 200-node oracle with the Airy-series kernel
    auto oracle = [](double x, int n_q) {
      QuadRule q = gauss_legendre_rule(n_q, x, x + 12.0);
      ComplexMatrix a(n_q, n_q);
      for (int i = 0; i < n_q; ++i)
        for (int j = 0; j <= i; ++j) {
          double kij = airy_kernel_oracle(std::real(q.nodes[i]), std::real(q.nodes[j]));
          double sw = std::sqrt(std::real(q.weights[i]) * std::real(q.weights[j]));
          a(i, j) = (i == j ? 1.0 : 0.0) - sw * kij;
          a(j, i) = a(i, j);
        }
      return std::real(determinant(a));
    };
    double f200 = oracle(0.0, 200), f400 = oracle(0.0, 400);
    double cross = std::abs(f200 - f400);
    double dev = std::abs(eval_dist(tw, 0.0) - f200);
    c.items.push_back({"F_GUE(0) fixed by the 200-node airy oracle", dev + cross, 1e-7});
  }
  {
    // monotone, in range, and -> 1 at x = 8, for every family
    double worst_mono = 0.0, worst_one = 0.0;
    auto scan = [&](DistSpec spec) {
      double prev = -1.0;
      for (double x = -4.0; x <= 6.01; x += 1.0) {
        double v = eval_dist(spec, x);
        if (v < prev) worst_mono = std::max(worst_mono, prev - v);
        prev = v;
      }
      worst_one = std::max(worst_one, std::abs(eval_dist(spec, 8.0) - 1.0));
    };
    scan(tw);
    DistSpec fm;
    fm.family = DistFamily::f_m;
    fm.pi = {0.0};
    scan(fm);
    DistSpec gm;
    gm.family = DistFamily::g_m;
    gm.pi = {0.5};
    scan(gm);
    DistSpec fs;
    fs.family = DistFamily::f_soft;
    fs.kappa = 1.0;
    scan(fs);
    c.items.push_back({"all families monotone (grid)", worst_mono, 1e-6});
    c.items.push_back({"all families -> 1 at x = 8", worst_one, 1e-6});
  }
  {
    // large-kappa echo, spikeless instance
    DistSpec fs;
    fs.family = DistFamily::f_soft;
    fs.kappa = 8.0;
    double worst = 0.0;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0})
      worst = std::max(worst, std::abs(eval_dist(fs, x) - eval_dist(tw, x)));
    c.items.push_back({"F_soft(kappa=8) vs F_GUE on [-2,2] (m=0)", worst, 5e-3});
    DistSpec fs1;
    fs1.family = DistFamily::f_soft;
    fs1.kappa = 8.0;
    fs1.pi = {8.5};
    DistSpec fm;
    fm.family = DistFamily::f_m;
    fm.pi = {0.5};
    double dev = std::abs(eval_dist(fs1, -1.0) - eval_dist(fm, -1.0));
    c.items.push_back({"F_soft(kappa=8, pi+kappa) vs F_m (m=1, O(1/k))", dev, 0.0, false});
  }
  {
    // open-question comparison, reported without a gate
    DistSpec fs0;
    fs0.family = DistFamily::f_soft;
    fs0.kappa = 0.0;
    const double cc = std::pow(2.0, -2.0 / 3.0);
    double worst = 0.0;
    std::printf("      interpolating law at kappa = 0 vs squared Tracy-Widom:\n");
    for (double x : {-3.0, -1.5, 0.0, 1.5}) {
      double a = eval_dist(fs0, x);
      double b = eval_dist(tw, cc * x);
      std::printf("        x=%+.1f  F_soft=%.6f  F_GUE(2^{-2/3}x)^2=%.6f  diff=%+.1e\n", x, a,
                  b * b, a - b * b);
      worst = std::max(worst, std::abs(a - b * b));
    }
    c.items.push_back({"kappa=0 comparison with the squared law (open question)", worst, 0.0,
                       false});
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    if (!std::strcmp(argv[i], "--quick")) quick = true;
  }
  int fails = 0;
  auto run = [&](int k, const std::function<Criterion()>& f) {
    if (only != 0 && only != k) return;
    Criterion c = f();
    print_criterion(k, c);
    if (!c.pass()) ++fails;
  };
  run(1, run_algebraic);
  run(2, run_dual_representations);
  run(3, run_oracles);
  run(4, [&] { return run_monte_carlo(quick); });
  run(5, run_limit_convergence);
  run(6, run_crossover);
  run(7, run_distributions);
  std::printf("%s (%d criterion failure%s)\n", fails == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              fails, fails == 1 ? "" : "s");
  return fails;
}
