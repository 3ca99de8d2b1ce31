#include "espike/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace espike {

namespace {

constexpr double kPi = 3.141592653589793238462643;

std::mutex g_cache_mutex;

void compute_gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void compute_gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[n - 2];
    } else {
      z = 2.0 * z - x[n - i + 1];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[n - 1 - i] = z;
    x[i] = -z;
    w[n - 1 - i] = 2.0 / (pp * pp);
    w[i] = w[n - 1 - i];
  }
}

}  // namespace

void gauss_legendre_raw(int order, std::vector<double>& x, std::vector<double>& w) {
  if (order < 1) throw ConfigurationError("gauss_legendre_raw: order must be >= 1");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    std::pair<std::vector<double>, std::vector<double>> nw;
    compute_gauss_legendre(order, nw.first, nw.second);
    it = cache.emplace(order, std::move(nw)).first;
  }
  x = it->second.first;
  w = it->second.second;
}

void gauss_hermite_raw(int order, std::vector<double>& x, std::vector<double>& w) {
  if (order < 1) throw ConfigurationError("gauss_hermite_raw: order must be >= 1");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    std::pair<std::vector<double>, std::vector<double>> nw;
    compute_gauss_hermite(order, nw.first, nw.second);
    it = cache.emplace(order, std::move(nw)).first;
  }
  x = it->second.first;
  w = it->second.second;
}

QuadRule gauss_legendre_rule(int order, double a, double b) {
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  QuadRule r;
  r.kind = QuadKind::gauss_legendre;
  r.nodes.resize(order);
  r.weights.resize(order);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = c + h * x[i];
    r.weights[i] = h * w[i];
  }
  return r;
}

QuadRule gauss_legendre_segment(int order, cplx a, cplx b) {
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  QuadRule r;
  r.kind = QuadKind::gauss_legendre;
  r.nodes.resize(order);
  r.weights.resize(order);
  cplx c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = c + h * x[i];
    r.weights[i] = h * w[i];
  }
  return r;
}

QuadRule gauss_hermite_rule(int order) {
  std::vector<double> x, w;
  gauss_hermite_raw(order, x, w);
  QuadRule r;
  r.kind = QuadKind::gauss_hermite;
  r.nodes.assign(x.begin(), x.end());
  r.weights.assign(w.begin(), w.end());
  return r;
}

QuadRule trapezoid_circle(int order, cplx center, double radius) {
  if (order < 2) throw ConfigurationError("trapezoid_circle: order must be >= 2");
  QuadRule r;
  r.kind = QuadKind::trapezoid_closed;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int k = 0; k < order; ++k) {
    double th = 2.0 * kPi * k / order;
    cplx e{std::cos(th), std::sin(th)};
    r.nodes[k] = center + radius * e;
    // dz = i r e^{i th} dth, dth = 2 pi / n
    r.weights[k] = cplx(0.0, 2.0 * kPi / order) * (radius * e);
  }
  return r;
}

QuadRule semi_infinite_rule(int order, double scale) {
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  QuadRule r;
  r.kind = QuadKind::semi_infinite_mapped;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double s = 0.5 * (x[i] + 1.0);  // (0,1)
    double t = scale * s / (1.0 - s);
    double jac = scale / ((1.0 - s) * (1.0 - s)) * 0.5;
    r.nodes[i] = t;
    r.weights[i] = jac * w[i];
  }
  return r;
}

QuadRule make_quadrature(QuadKind kind, int order, double a, double b) {
  if (order < 2) throw ConfigurationError("make_quadrature: order must be >= 2");
  switch (kind) {
    case QuadKind::gauss_legendre:
      return gauss_legendre_rule(order, a, b);
    case QuadKind::trapezoid_closed:
      return trapezoid_circle(order, cplx(a, 0.0), b);  // center a (real), radius b
    case QuadKind::gauss_hermite:
      return gauss_hermite_rule(order);
    case QuadKind::semi_infinite_mapped:
      return semi_infinite_rule(order, b > 0 ? b : 1.0);
  }
  throw ConfigurationError("make_quadrature: unsupported kind");
}

cplx refine_until(const std::function<cplx(int)>& eval, int order0, double tol,
                  int max_doublings, const char* what) {
  cplx prev = eval(order0);
  int order = order0;
  for (int k = 0; k < max_doublings; ++k) {
    order *= 2;
    cplx cur = eval(order);
    double scale = std::max(1.0, std::abs(cur));
    if (std::abs(cur - prev) <= tol * scale) return cur;
    prev = cur;
  }
  throw ConvergenceError(std::string(what) + ": refinement did not converge");
}

}  // namespace espike
