#include "espike/specfun.hpp"

#include <cmath>

#include "espike/linalg.hpp"

namespace espike {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 6.283185307179586476925287;
}  // namespace

cplx bessel_i0(cplx x) {
  if (std::real(x) < 0.0) x = -x;  // I_0 is even
  double ax = std::abs(x);
  if (ax <= 30.0) {
    cplx q = 0.25 * x * x;
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / double(k) / double(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // asymptotic series, adaptive truncation at the smallest term
  cplx inv = 1.0 / x;
  cplx term = 1.0, sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 40; ++k) {
    double c = (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
    term *= c * inv;
    double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-17) break;
  }
  return std::exp(x) / std::sqrt(kTwoPi * x) * sum;
}

double bessel_i0(double x) { return std::real(bessel_i0(cplx(x, 0.0))); }

cplx kummer_m_half(cplx v) {
  cplx z = 2.0 * v;
  if (std::abs(z) <= 60.0) {
    cplx term = 1.0, sum = 1.0;
    for (int k = 0; k < 400; ++k) {
      term *= z * (k + 0.5) / ((k + 1.0) * (k + 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // M(1/2,1,z) ~ e^z/sqrt(pi z) * sum_k ((1/2)_k)^2 / (k! z^k)
  cplx inv = 1.0 / z;
  cplx term = 1.0, sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 30; ++k) {
    double c = (k - 0.5) * (k - 0.5) / k;
    term *= c * inv;
    double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-17) break;
  }
  return std::exp(z) / std::sqrt(kPi * z) * sum;
}

double kummer_m_half(double v) { return std::real(kummer_m_half(cplx(v, 0.0))); }

GFunAsympt GFunAsympt::classify(cplx z) {
  return GFunAsympt{std::real(z) > 1.0 ? GRegime::re_z_greater_1 : GRegime::re_z_less_1};
}

cplx GFunAsympt::leading(cplx z, double v) const {
  cplx tail = std::exp(2.0 * v) / std::sqrt(kTwoPi * v);
  if (regime == GRegime::re_z_greater_1) {
    cplx root = std::sqrt(z + 1.0) * std::sqrt(z - 1.0);
    return -std::exp((z + 1.0) * v) * root + tail;
  }
  return tail;
}

GFunBatch::GFunBatch(double v, int order_per_panel, int min_panels) : v_(v) {
  m_v_ = kummer_m_half(cplx(v, 0.0));
  if (v <= 0.0) return;
  int panels = std::max(min_panels, static_cast<int>(std::ceil(v / 1.25)));
  std::vector<double> x, w;
  gauss_legendre_raw(order_per_panel, x, w);
  s_.reserve(std::size_t(panels) * order_per_panel);
  w_.reserve(s_.capacity());
  for (int p = 0; p < panels; ++p) {
    double a = v * p / panels, b = v * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order_per_panel; ++i) {
      s_.push_back(c + h * x[i]);
      w_.push_back(h * w[i]);
    }
  }
  m_s_.resize(s_.size());
  for (std::size_t i = 0; i < s_.size(); ++i) m_s_[i] = kummer_m_half(cplx(s_[i], 0.0));
}

cplx GFunBatch::operator()(cplx z) const {
  cplx acc = 0.0;
  cplx zp1 = z + 1.0;
  for (std::size_t i = 0; i < s_.size(); ++i)
    acc += w_[i] * std::exp((v_ - s_[i]) * zp1) * m_s_[i];
  return -z * m_v_ + (1.0 - z * z) * acc;
}

cplx g_fun(cplx z, double v) {
  if (v < 0.0) throw PreconditionError("g_fun: v must be >= 0");
  if (v == 0.0) return -z;
  GFunBatch batch(v);
  GFunBatch fine(v, 24, 16);
  cplx a = batch(z), b = fine(z);
  if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
    GFunBatch finer(v, 32, 32);
    b = finer(z);
  }
  return b;
}

cplx g_fun_contour(cplx z, double v, double radius, int order) {
  if (v < 0.0) throw PreconditionError("g_fun_contour: v must be >= 0");
  // pole of the integrand at s_p = 1/(z+1); its residue is subtracted to
  // keep the annulus of analyticity wide (the subtraction integrates to
  // zero since s_p stays outside the circle)
  cplx sp = 1.0 / (z + 1.0);
  bool subtract = std::abs(sp) < 1e6;
  if (radius <= 0.0) radius = std::min(0.47, 0.92 * std::abs(sp));
  cplx res = 0.0;
  if (subtract)
    res = (z - 1.0) * std::exp(v * (z + 1.0)) / std::sqrt((z - 1.0) / (z + 1.0));
  auto eval = [&](int n) -> cplx {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      double th = kTwoPi * k / n;
      cplx s = radius * cplx(std::cos(th), std::sin(th));
      cplx num = (z + 1.0) * s - z;
      cplx den = 1.0 - (z + 1.0) * s;
      cplx h = std::exp(v / s) * num / (den * std::sqrt(1.0 - 2.0 * s)) / s;
      if (subtract) h -= res / (s - sp);
      acc += s * h;  // ds/(2 pi i) contributes s_k / n per node
    }
    return acc / double(n);
  };
  if (order > 0) return eval(order);
  return refine_until(eval, 256, 1e-10, 5, "g_fun_contour");
}

namespace {

double weight_e_raw(double u, double v, int order, double radius) {
  // two circles |s| = |t| = radius < 1/2; the 1/(2 pi i s) ds factors reduce
  // to plain averages over the nodes
  const int n = order;
  std::vector<cplx> s(n), eu(n), ev(n), rt(n);
  for (int k = 0; k < n; ++k) {
    double th = kTwoPi * k / n;
    s[k] = radius * cplx(std::cos(th), std::sin(th));
    eu[k] = std::exp(u / s[k]);
    ev[k] = std::exp(v / s[k]);
    rt[k] = std::sqrt(1.0 - 2.0 * s[k]);
  }
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    cplx aj = eu[j] / rt[j];
    for (int k = 0; k < n; ++k) {
      acc += aj * ev[k] / rt[k] * (s[j] - s[k]) / (1.0 - s[j] - s[k]);
    }
  }
  return 4.0 * kPi * std::real(acc) / double(n) / double(n);
}

}  // namespace

double weight_e(double u, double v, int order, double radius) {
  if (u < 0.0 || v < 0.0) throw PreconditionError("weight_e: arguments must be >= 0");
  if (u == v) return 0.0;
  // the Laurent spectrum of e^{u/s} peaks near k = u/radius, so the closed
  // rule must carry enough nodes to resolve it
  int need = static_cast<int>(3.2 * std::max(u, v) / radius) + 64;
  order = std::max(order, need);
  double a = weight_e_raw(u, v, order, radius);
  double b = weight_e_raw(v, u, order, radius);
  return 0.5 * (a - b);
}

double weight_e_quad_oracle(double u, double v, int order) {
  // rotated coordinates x = p+q, y = p-q remove the (x-y)/(x+y) line
  // singularity; weight exp(-p^2-q^2) handled by Gauss-Hermite
  std::vector<double> x, w;
  gauss_hermite_raw(order, x, w);
  double su = 2.0 * std::sqrt(u), sv = 2.0 * std::sqrt(v);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    double p = x[i];
    if (p == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < order; ++j) {
      double q = x[j];
      double xp = p + q, ym = p - q;
      double br = bessel_i0(su * xp) * bessel_i0(sv * ym) -
                  bessel_i0(su * ym) * bessel_i0(sv * xp);
      row += w[j] * q * br;
    }
    acc += w[i] * row / p;
  }
  return 2.0 * acc;
}

std::vector<std::vector<double>> weight_e_batch(const std::vector<double>& a,
                                                const std::vector<double>& b, double eta,
                                                int order, double radius) {
  int ns = order;
  double amax = 0.0;
  for (double t : a) amax = std::max(amax, t);
  for (double t : b) amax = std::max(amax, t);
  ns = std::max(ns, static_cast<int>(3.2 * eta * amax / radius) + 64);
  std::vector<cplx> s(ns), rt(ns);
  for (int j = 0; j < ns; ++j) {
    double th = kTwoPi * j / ns;
    s[j] = radius * cplx(std::cos(th), std::sin(th));
    rt[j] = std::sqrt(1.0 - 2.0 * s[j]);
  }
  auto pmat = [&](const std::vector<double>& t) {
    std::vector<std::vector<cplx>> p(ns, std::vector<cplx>(t.size()));
    for (int j = 0; j < ns; ++j)
      for (std::size_t q = 0; q < t.size(); ++q) p[j][q] = std::exp(eta * t[q] / s[j]) / rt[j];
    return p;
  };
  auto pa = pmat(a), pb = pmat(b);
  // ap[k][q] = sum_j A_{jk} pa[j][q] with A_{jk} = (s_j - s_k)/(1 - s_j - s_k)
  std::vector<std::vector<cplx>> ap(ns, std::vector<cplx>(a.size()));
  for (int k = 0; k < ns; ++k) {
    for (int j = 0; j < ns; ++j) {
      cplx ajk = (s[j] - s[k]) / (1.0 - s[j] - s[k]);
      for (std::size_t q = 0; q < a.size(); ++q) ap[k][q] += ajk * pa[j][q];
    }
  }
  const double norm = 4.0 * kPi / double(ns) / double(ns);
  std::vector<std::vector<double>> out(a.size(), std::vector<double>(b.size()));
  for (std::size_t p = 0; p < a.size(); ++p)
    for (std::size_t q = 0; q < b.size(); ++q) {
      cplx acc = 0.0;
      for (int k = 0; k < ns; ++k) acc += ap[k][p] * pb[k][q];
      out[p][q] = norm * std::real(acc);
    }
  // exact antisymmetrization when the grids coincide
  if (&a != &b && a.size() == b.size()) {
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) same = false;
    if (same)
      for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = 0; q < p; ++q) {
          double v = 0.5 * (out[p][q] - out[q][p]);
          out[p][q] = v;
          out[q][p] = -v;
        }
  }
  return out;
}


cplx gauss_pair_integral(cplx alpha, cplx beta) {
  if (std::real(alpha) >= 0.5 || std::real(beta) >= 0.5)
    throw PreconditionError("gauss_pair_integral: Re{alpha}, Re{beta} must be < 1/2");
  return 4.0 * kPi * (alpha - beta) /
         ((1.0 - alpha - beta) * std::sqrt(1.0 - 2.0 * alpha) * std::sqrt(1.0 - 2.0 * beta));
}

double gauss_pair_integral_quad(double alpha, double beta, int order) {
  // after x = p+q, y = p-q the integrand is
  //   4 (q/p) e^{-(1-a-b)(p^2+q^2)} sinh(2 (a-b) p q)
  double lam = 1.0 - alpha - beta;
  if (lam <= 0.0) throw PreconditionError("gauss_pair_integral_quad: need alpha+beta < 1");
  std::vector<double> x, w;
  gauss_hermite_raw(order, x, w);
  double rl = std::sqrt(lam);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    double p = x[i] / rl;
    if (p == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < order; ++j) {
      double q = x[j] / rl;
      row += w[j] * q * std::sinh(2.0 * (alpha - beta) * p * q);
    }
    acc += w[i] * row / p;
  }
  return 4.0 * acc / lam;
}

namespace {

// inner contour value  int ds/(2 pi i s) e^{eta u / s} 4 pi (alpha - s) /
// ((1 - alpha - s) sqrt(1-2 alpha) sqrt(1-2 s))
cplx pair_transform(cplx alpha, double eta_u, int order, double radius) {
  order = std::max(order, static_cast<int>(3.2 * eta_u / radius) + 64);
  cplx acc = 0.0;
  cplx ra = std::sqrt(1.0 - 2.0 * alpha);
  for (int k = 0; k < order; ++k) {
    double th = kTwoPi * k / order;
    cplx s = radius * cplx(std::cos(th), std::sin(th));
    acc += std::exp(eta_u / s) * (alpha - s) /
           ((1.0 - alpha - s) * ra * std::sqrt(1.0 - 2.0 * s));
  }
  return 4.0 * kPi * acc / double(order);
}

}  // namespace

double g_a_value(int a, double u, double eta_minus) {
  if (a < 1) throw PreconditionError("g_a_value: a >= 1 required");
  // (a-1)-st Taylor coefficient in alpha at 0, times (a-1)!
  const int na = 64;
  const double ra = 0.2;
  cplx acc = 0.0;
  for (int k = 0; k < na; ++k) {
    double th = kTwoPi * k / na;
    cplx al = ra * cplx(std::cos(th), std::sin(th));
    cplx f = pair_transform(al, eta_minus * u, 128, 0.35);
    acc += f / std::pow(al, a - 1);
  }
  double fact = 1.0;
  for (int k = 2; k < a; ++k) fact *= k;
  return std::pow(eta_minus, a - 1) * fact * std::real(acc) / double(na);
}

double alpha_ab_value(int a, int b, double eta_minus) {
  if (a < 1 || b < 1) throw PreconditionError("alpha_ab_value: a,b >= 1 required");
  if (a == b) return 0.0;
  const int na = 48;
  const double ra = 0.18, rb = 0.24;
  cplx acc = 0.0;
  for (int i = 0; i < na; ++i) {
    double ti = kTwoPi * i / na;
    cplx al = ra * cplx(std::cos(ti), std::sin(ti));
    for (int j = 0; j < na; ++j) {
      double tj = kTwoPi * j / na;
      cplx be = rb * cplx(std::cos(tj), std::sin(tj));
      cplx f = gauss_pair_integral(al, be);
      acc += f / (std::pow(al, a - 1) * std::pow(be, b - 1));
    }
  }
  double fact = 1.0;
  for (int k = 2; k < a; ++k) fact *= k;
  for (int k = 2; k < b; ++k) fact *= k;
  return std::pow(eta_minus, a + b - 2) * fact * std::real(acc) / double(na) / double(na);
}

std::pair<double, double> g_a_alpha(int a, int b, double u, double eta_minus) {
  return {g_a_value(a, u, eta_minus), alpha_ab_value(a, b, eta_minus)};
}

double g_a_quad_oracle(int a, double u, double eta_minus, int order) {
  // rotated-coordinate 2D quadrature of the defining integral
  std::vector<double> x, w;
  gauss_hermite_raw(order, x, w);
  double s = 2.0 * std::sqrt(eta_minus * u);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    double p = x[i];
    if (p == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < order; ++j) {
      double q = x[j];
      double xp = p + q, ym = p - q;
      double br = std::pow(xp, 2 * (a - 1)) * bessel_i0(s * ym) -
                  std::pow(ym, 2 * (a - 1)) * bessel_i0(s * xp);
      row += w[j] * q * br;
    }
    acc += w[i] * row / p;
  }
  return std::pow(eta_minus, a - 1) * 2.0 * acc;
}

double alpha_ab_quad_oracle(int a, int b, double eta_minus, int order) {
  std::vector<double> x, w;
  gauss_hermite_raw(order, x, w);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    double p = x[i];
    if (p == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < order; ++j) {
      double q = x[j];
      double xp = p + q, ym = p - q;
      double br = std::pow(xp, 2 * (a - 1)) * std::pow(ym, 2 * (b - 1)) -
                  std::pow(ym, 2 * (a - 1)) * std::pow(xp, 2 * (b - 1));
      row += w[j] * q * br;
    }
    acc += w[i] * row / p;
  }
  return std::pow(eta_minus, a + b - 2) * 2.0 * acc;
}

}  // namespace espike
