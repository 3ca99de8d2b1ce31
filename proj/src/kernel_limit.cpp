#include "espike/kernel_limit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace espike {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 6.283185307179586476925287;
const cplx kI{0.0, 1.0};

cplx guarded_exp(cplx e) {
  if (std::real(e) < -700.0) return cplx(0.0);
  if (std::real(e) > 700.0) throw NumericalError("guarded_exp: exponent overflow");
  return std::exp(e);
}

struct Side {
  std::vector<cplx> n, wt;    // nodes; weights including 1/(2 pi i)
  std::vector<cplx> cub;      // exp(sign * (x-kappa)^3/3) / sqrt(2x)
  std::vector<cplx> prod;     // spike factor product
};

Side make_side(const Contour& c, double kappa, int cub_sign,
               const std::vector<double>& pi, int prod_sign) {
  Side s;
  s.n = c.nodes();
  s.wt = c.weights();
  const cplx inv2pii = 1.0 / (kI * kTwoPi);
  s.cub.resize(s.n.size());
  s.prod.resize(s.n.size());
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    cplx x = s.n[i];
    cplx d = x - kappa;
    s.cub[i] = guarded_exp(double(cub_sign) * d * d * d / 3.0) / std::sqrt(2.0 * x);
    cplx p = 1.0;
    for (double pk : pi)
      p *= (prod_sign > 0) ? (x + pk) / (x - pk) : (x - pk) / (x + pk);
    s.prod[i] = p;
    s.wt[i] *= inv2pii;
  }
  return s;
}

}  // namespace

void SoftParams::validate() const {
  if (!(kappa >= 0.0)) throw PreconditionError("SoftParams: kappa >= 0 required");
  for (double p : pi)
    if (!(p > 0.0)) throw PreconditionError("SoftParams: crossover spikes must be positive");
  if (delta > 0.0 && !pi.empty()) {
    double pmin = *std::min_element(pi.begin(), pi.end());
    if (!(delta < pmin)) throw PreconditionError("SoftParams: delta must satisfy delta < min pi");
  }
}

SoftKernel::SoftKernel(const SoftParams& p, double arg_max, int order, int refine_levels)
    : p_(p) {
  p_.validate();
  const double kappa = p_.kappa;
  double pmin = p_.pi.empty() ? 1e300 : *std::min_element(p_.pi.begin(), p_.pi.end());
  double r_cut = std::max(8.0, 1.9 * std::sqrt(std::max(arg_max, 1.0)) + 3.0);

  double vw, vz, vis;
  if (p_.delta > 0.0) {
    vz = 0.5 * p_.delta;
    vw = p_.delta;
    vis = 0.5 * p_.delta;
  } else {
    vw = p_.pi.empty() ? kappa + 0.5 : std::min(kappa + 0.5, std::max(0.7 * pmin, pmin - 0.35));
    vz = std::max(vw - 0.35, 0.5 * vw);
    vis = kappa + 0.5;
  }
  zg_ = wedge_contour(vz, true, r_cut, order);
  wl_ = wedge_contour(vw, false, r_cut, order);
  dsc_ = wedge_contour(vw, false, r_cut, order);
  isc_ = wedge_contour(vis, true, r_cut, order, 2.0 * vis, refine_levels);
  vis_ = vis;
}

double SoftKernel::is_tail(double u, double v) const {
  // poles w = -z beyond the contour crossing sit on the wrong side of the
  // wedge; their residues restore the vertex-independent kernel value:
  //   C = -(1/pi) int_{2 vis}^inf Re[e^{2 i pi/3} E(z_u(t))] dt,
  //   E(z) = exp(2 kappa z^2 - (u - v) z - (u + v) kappa + (2/3) kappa^3)
  const double d = v - u;  // requires d >= 0
  const double kappa = p_.kappa;
  const double V = vis_;
  if (d == 0.0) return 0.0;
  if (kappa == 0.0) return std::cos(std::sqrt(3.0) * V * d) / (kPi * d);
  const cplx dir = std::polar(1.0, 2.0 * kPi / 3.0);
  double cap = 2.0 * std::sqrt(60.0 / kappa) + d / (2.0 * kappa) + 2.0;
  const int panels = 8, order = 24;
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = 2.0 * V + cap * p / panels, b = 2.0 * V + cap * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      double t = c + h * x[i];
      cplx z = V + t * dir;
      cplx ex = 2.0 * kappa * z * z - (u - v) * z - (u + v) * kappa +
                2.0 / 3.0 * kappa * kappa * kappa;
      if (std::real(ex) < -500.0) continue;
      acc += h * w[i] * std::real(dir * std::exp(ex));
    }
  }
  return -acc / kPi;
}

namespace {

// generic double-contour sum; coupling kind 0: (z+w)/(z-w), 1: (w-z)/(z+w)
double soft_pair_sum(const Side& zs, const Side& ws, int coupling, double zlin, double v,
                     double wlin, double u, double kappa, bool prod_minus_one) {
  const std::size_t nz = zs.n.size(), nw = ws.n.size();
  std::vector<cplx> az(nz), bw(nw);
  for (std::size_t i = 0; i < nz; ++i)
    az[i] = zs.cub[i] * guarded_exp(zlin * v * (zs.n[i] - kappa)) * zs.wt[i];
  for (std::size_t j = 0; j < nw; ++j)
    bw[j] = ws.cub[j] * guarded_exp(wlin * u * (ws.n[j] - kappa)) * ws.wt[j];
  cplx acc = 0.0;
  for (std::size_t i = 0; i < nz; ++i) {
    cplx z = zs.n[i];
    cplx sum = 0.0;
    for (std::size_t j = 0; j < nw; ++j) {
      cplx w = ws.n[j];
      cplx pr = zs.prod[i] * ws.prod[j];
      if (prod_minus_one) pr -= 1.0;
      cplx cp = (coupling == 0) ? (z + w) / (z - w) : (w - z) / (z + w);
      sum += bw[j] * pr * cp;
    }
    acc += az[i] * sum;
  }
  return std::real(acc);
}

}  // namespace

double SoftKernel::s(double u, double v) const {
  Side zs = make_side(zg_, p_.kappa, -1, p_.pi, -1);   // exp(-(z-k)^3/3), (z-pi)/(z+pi)
  Side ws = make_side(wl_, p_.kappa, +1, p_.pi, +1);   // exp(+(w-k)^3/3), (w+pi)/(w-pi)
  return soft_pair_sum(zs, ws, 0, +1.0, v, -1.0, u, p_.kappa, false);
}

double SoftKernel::ds(double u, double v) const {
  Side zs = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  Side ws = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  return soft_pair_sum(zs, ws, 1, -1.0, v, -1.0, u, p_.kappa, false);
}

double SoftKernel::is(double u, double v) const {
  Side zs = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  Side ws = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  // w carries (w - pi)/(w + pi): prod_sign -1 as well
  double base = soft_pair_sum(zs, ws, 1, +1.0, v, +1.0, u, p_.kappa, false);
  double tail = (v >= u) ? is_tail(u, v) : -is_tail(v, u);
  return base + tail;
}

double SoftKernel::s_minus_base(double u, double v) const {
  Side zs = make_side(zg_, p_.kappa, -1, p_.pi, -1);
  Side ws = make_side(wl_, p_.kappa, +1, p_.pi, +1);
  return soft_pair_sum(zs, ws, 0, +1.0, v, -1.0, u, p_.kappa, true);
}

double SoftKernel::ds_minus_base(double u, double v) const {
  Side zs = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  Side ws = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  return soft_pair_sum(zs, ws, 1, -1.0, v, -1.0, u, p_.kappa, true);
}

double SoftKernel::is_minus_base(double u, double v) const {
  Side zs = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  Side ws = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  return soft_pair_sum(zs, ws, 1, +1.0, v, +1.0, u, p_.kappa, true);
}

KernelTriple SoftKernel::eval(double u, double v) const {
  return {ds(u, v), s(u, v), is(u, v)};
}

namespace {

std::vector<std::vector<double>> pair_grid(const Side& zs, const Side& ws, int coupling,
                                           double zlin, double wlin, double kappa,
                                           const std::vector<double>& us,
                                           const std::vector<double>& vs) {
  const std::size_t nz = zs.n.size(), nw = ws.n.size();
  // D_i(u) = sum_j coupling * B_j(u)
  std::vector<std::vector<cplx>> d(us.size(), std::vector<cplx>(nz));
  std::vector<cplx> bw(nw);
  for (std::size_t a = 0; a < us.size(); ++a) {
    for (std::size_t j = 0; j < nw; ++j)
      bw[j] = ws.cub[j] * ws.prod[j] * guarded_exp(wlin * us[a] * (ws.n[j] - kappa)) * ws.wt[j];
    for (std::size_t i = 0; i < nz; ++i) {
      cplx z = zs.n[i];
      cplx sum = 0.0;
      for (std::size_t j = 0; j < nw; ++j) {
        cplx w = ws.n[j];
        cplx cp = (coupling == 0) ? (z + w) / (z - w) : (w - z) / (z + w);
        sum += bw[j] * cp;
      }
      d[a][i] = sum;
    }
  }
  std::vector<std::vector<double>> out(us.size(), std::vector<double>(vs.size()));
  for (std::size_t b = 0; b < vs.size(); ++b) {
    std::vector<cplx> az(nz);
    for (std::size_t i = 0; i < nz; ++i)
      az[i] = zs.cub[i] * zs.prod[i] * guarded_exp(zlin * vs[b] * (zs.n[i] - kappa)) * zs.wt[i];
    for (std::size_t a = 0; a < us.size(); ++a) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < nz; ++i) acc += az[i] * d[a][i];
      out[a][b] = std::real(acc);
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> SoftKernel::s_grid(const std::vector<double>& us,
                                                    const std::vector<double>& vs) const {
  Side zs = make_side(zg_, p_.kappa, -1, p_.pi, -1);
  Side ws = make_side(wl_, p_.kappa, +1, p_.pi, +1);
  return pair_grid(zs, ws, 0, +1.0, -1.0, p_.kappa, us, vs);
}

std::vector<std::vector<double>> SoftKernel::ds_grid(const std::vector<double>& us,
                                                     const std::vector<double>& vs) const {
  Side zs = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  Side ws = make_side(dsc_, p_.kappa, +1, p_.pi, +1);
  return pair_grid(zs, ws, 1, -1.0, -1.0, p_.kappa, us, vs);
}

std::vector<std::vector<double>> SoftKernel::is_grid(const std::vector<double>& us,
                                                     const std::vector<double>& vs) const {
  Side zs = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  Side ws = make_side(isc_, p_.kappa, -1, p_.pi, -1);
  auto out = pair_grid(zs, ws, 1, +1.0, +1.0, p_.kappa, us, vs);
  for (std::size_t a = 0; a < us.size(); ++a)
    for (std::size_t b = 0; b < vs.size(); ++b) {
      double u = us[a], v = vs[b];
      out[a][b] += (v >= u) ? is_tail(u, v) : -is_tail(v, u);
    }
  return out;
}

double sine_kernel(double u, double v) {
  double d = u - v;
  if (d == 0.0) return 1.0;
  return std::sin(kPi * d) / (kPi * d);
}

double gen_airy(int kind, int p, double kappa, const std::vector<double>& pi, double u,
                int deriv, double r_cut, int order) {
  if (kind != 1 && kind != 2) throw PreconditionError("gen_airy: kind must be 1 or 2");
  if (p < 0 || p > static_cast<int>(pi.size()))
    throw PreconditionError("gen_airy: p out of range");
  if (deriv < 0 || deriv > 3) throw PreconditionError("gen_airy: deriv in 0..3");
  std::vector<double> used(pi.begin(), pi.begin() + p);
  double pmin = used.empty() ? 1e300 : *std::min_element(used.begin(), used.end());
  Contour c;
  if (kind == 1) {
    double vw = used.empty() ? kappa + 0.5 : std::min(kappa + 0.5, std::max(0.7 * pmin, pmin - 0.35));
    c = wedge_contour(vw, false, r_cut, order);
  } else {
    c = wedge_contour(kappa + 0.5, true, r_cut, order);
  }
  cplx acc = 0.0;
  const auto& zn = c.nodes();
  const auto& zw = c.weights();
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx w = zn[i];
    cplx d = w - kappa;
    cplx e, fac;
    if (kind == 1) {
      e = guarded_exp(d * d * d / 3.0 - u * d);
      fac = std::pow(-d, deriv);
    } else {
      e = guarded_exp(-d * d * d / 3.0 + u * d);
      fac = std::pow(d, deriv);
    }
    cplx pr = 1.0;
    for (double pk : used) pr *= (kind == 1) ? (w + pk) / (w - pk) : (w - pk) / (w + pk);
    acc += zw[i] * e * fac * pr / std::sqrt(2.0 * w);
  }
  acc /= kI * kTwoPi;
  return std::real(acc);
}

double soft_s_integrable(double kappa, double u, double v) {
  if (u == v) throw PreconditionError("soft_s_integrable: u != v required");
  auto f1 = [&](int d) { return gen_airy(1, 0, kappa, {}, u, d); };
  auto f2 = [&](int d) { return gen_airy(2, 0, kappa, {}, v, d); };
  double p10 = f1(0), p11 = f1(1), p12 = f1(2);
  double p20 = f2(0), p21 = f2(1), p22 = f2(2);
  return (-2.0 * p12 * p20 - 2.0 * p10 * p22 + 2.0 * p11 * p21 +
          2.0 * kappa * (p11 * p20 - p10 * p21) + (u + v) * p10 * p20) /
         (u - v);
}

double airy_source_kernel(const std::vector<double>& pi, double u, double v, double r_cut,
                          int order) {
  double pmin = pi.empty() ? 1e300 : *std::min_element(pi.begin(), pi.end());
  double vr = pi.empty() ? -0.4 : std::min(-0.4, pmin - 0.4);
  double vl = vr - 0.8;
  Contour cl = wedge_contour(vl, true, r_cut, order);    // z, upward
  Contour cr = wedge_contour(vr, false, r_cut, order);   // w, downward
  const auto& zn = cl.nodes();
  const auto& zw = cl.weights();
  const auto& wn = cr.nodes();
  const auto& wwt = cr.weights();
  std::vector<cplx> az(zn.size()), bw(wn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx z = zn[i];
    cplx pr = 1.0;
    for (double pk : pi) pr *= (z - pk);
    az[i] = guarded_exp(-z * z * z / 3.0 + v * z) * pr * zw[i];
  }
  for (std::size_t j = 0; j < wn.size(); ++j) {
    cplx w = wn[j];
    cplx pr = 1.0;
    for (double pk : pi) pr /= (w - pk);
    bw[j] = guarded_exp(w * w * w / 3.0 - u * w) * pr * wwt[j];
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < wn.size(); ++j) sum += bw[j] / (zn[i] - wn[j]);
    acc += az[i] * sum;
  }
  acc /= (kI * kTwoPi) * (kI * kTwoPi);
  return std::real(acc);
}

double gue_source_kernel(const std::vector<double>& pi, double u, double v) {
  double pmin = pi.empty() ? 0.0 : *std::min_element(pi.begin(), pi.end());
  double pmax = pi.empty() ? 0.0 : *std::max_element(pi.begin(), pi.end());
  double c = std::min(0.0, pmin) - 1.0;
  // vertical line nodes
  const double y_cap = 14.0;
  const int panels = 20, order = 20;
  std::vector<double> x, wq;
  gauss_legendre_raw(order, x, wq);
  std::vector<cplx> zn, zw;
  for (int p = 0; p < panels; ++p) {
    double a = -y_cap + 2.0 * y_cap * p / panels;
    double b = -y_cap + 2.0 * y_cap * (p + 1) / panels;
    double mid = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      zn.push_back(cplx(c, mid + h * x[i]));
      zw.push_back(h * wq[i] * kI);
    }
  }
  Contour cw = Contour::circle(cplx(0.5 * (pmin + pmax)), 0.5 * (pmax - pmin) + 0.45, 256);
  const auto& wn = cw.nodes();
  const auto& wwt = cw.weights();
  std::vector<cplx> az(zn.size()), bw(wn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx z = zn[i];
    cplx pr = 1.0;
    for (double pk : pi) pr *= (z - pk);
    az[i] = std::exp(0.5 * z * z + v * z) * pr * zw[i];
  }
  for (std::size_t j = 0; j < wn.size(); ++j) {
    cplx w = wn[j];
    cplx pr = 1.0;
    for (double pk : pi) pr /= (w - pk);
    bw[j] = std::exp(-0.5 * w * w - u * w) * pr * wwt[j];
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < wn.size(); ++j) sum += bw[j] / (zn[i] - wn[j]);
    acc += az[i] * sum;
  }
  acc /= (kI * kTwoPi) * (kI * kTwoPi);
  return std::real(acc);
}

std::vector<std::vector<double>> airy_source_kernel_grid(const std::vector<double>& pi,
                                                         const std::vector<double>& us,
                                                         const std::vector<double>& vs,
                                                         double r_cut, int order) {
  double pmin = pi.empty() ? 1e300 : *std::min_element(pi.begin(), pi.end());
  double vr = pi.empty() ? -0.4 : std::min(-0.4, pmin - 0.4);
  double vl = vr - 0.8;
  Contour cl = wedge_contour(vl, true, r_cut, order);
  Contour cr = wedge_contour(vr, false, r_cut, order);
  const auto& zn = cl.nodes();
  const auto& zw = cl.weights();
  const auto& wn = cr.nodes();
  const auto& wwt = cr.weights();
  const std::size_t nz = zn.size(), nw = wn.size();
  std::vector<cplx> z0(nz), w0(nw);
  for (std::size_t i = 0; i < nz; ++i) {
    cplx z = zn[i];
    cplx pr = 1.0;
    for (double pk : pi) pr *= (z - pk);
    z0[i] = guarded_exp(-z * z * z / 3.0) * pr * zw[i];
  }
  for (std::size_t j = 0; j < nw; ++j) {
    cplx w = wn[j];
    cplx pr = 1.0;
    for (double pk : pi) pr /= (w - pk);
    w0[j] = guarded_exp(w * w * w / 3.0) * pr * wwt[j];
  }
  // D_i(u) = sum_j w-part(u) / (z_i - w_j)
  std::vector<std::vector<cplx>> d(us.size(), std::vector<cplx>(nz));
  std::vector<cplx> bw(nw);
  for (std::size_t a = 0; a < us.size(); ++a) {
    for (std::size_t j = 0; j < nw; ++j) bw[j] = w0[j] * guarded_exp(-us[a] * wn[j]);
    for (std::size_t i = 0; i < nz; ++i) {
      cplx sum = 0.0;
      for (std::size_t j = 0; j < nw; ++j) sum += bw[j] / (zn[i] - wn[j]);
      d[a][i] = sum;
    }
  }
  std::vector<std::vector<double>> out(us.size(), std::vector<double>(vs.size()));
  const cplx norm = 1.0 / ((kI * kTwoPi) * (kI * kTwoPi));
  for (std::size_t b = 0; b < vs.size(); ++b) {
    std::vector<cplx> az(nz);
    for (std::size_t i = 0; i < nz; ++i) az[i] = z0[i] * guarded_exp(vs[b] * zn[i]);
    for (std::size_t a = 0; a < us.size(); ++a) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < nz; ++i) acc += az[i] * d[a][i];
      out[a][b] = std::real(acc * norm);
    }
  }
  return out;
}

std::vector<std::vector<double>> gue_source_kernel_grid(const std::vector<double>& pi,
                                                        const std::vector<double>& us,
                                                        const std::vector<double>& vs) {
  double pmin = pi.empty() ? 0.0 : *std::min_element(pi.begin(), pi.end());
  double pmax = pi.empty() ? 0.0 : *std::max_element(pi.begin(), pi.end());
  double c = std::min(0.0, pmin) - 1.0;
  const double y_cap = 14.0;
  const int panels = 20, order = 20;
  std::vector<double> x, wq;
  gauss_legendre_raw(order, x, wq);
  std::vector<cplx> zn, zw;
  for (int p = 0; p < panels; ++p) {
    double a = -y_cap + 2.0 * y_cap * p / panels;
    double b = -y_cap + 2.0 * y_cap * (p + 1) / panels;
    double mid = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      zn.push_back(cplx(c, mid + h * x[i]));
      zw.push_back(h * wq[i] * kI);
    }
  }
  Contour cw = Contour::circle(cplx(0.5 * (pmin + pmax)), 0.5 * (pmax - pmin) + 0.45, 256);
  const auto& wn = cw.nodes();
  const auto& wwt = cw.weights();
  const std::size_t nz = zn.size(), nw = wn.size();
  std::vector<cplx> z0(nz), w0(nw);
  for (std::size_t i = 0; i < nz; ++i) {
    cplx z = zn[i];
    cplx pr = 1.0;
    for (double pk : pi) pr *= (z - pk);
    z0[i] = std::exp(0.5 * z * z) * pr * zw[i];
  }
  for (std::size_t j = 0; j < nw; ++j) {
    cplx w = wn[j];
    cplx pr = 1.0;
    for (double pk : pi) pr /= (w - pk);
    w0[j] = std::exp(-0.5 * w * w) * pr * wwt[j];
  }
  std::vector<std::vector<cplx>> d(us.size(), std::vector<cplx>(nz));
  std::vector<cplx> bw(nw);
  for (std::size_t a = 0; a < us.size(); ++a) {
    for (std::size_t j = 0; j < nw; ++j) bw[j] = w0[j] * std::exp(-us[a] * wn[j]);
    for (std::size_t i = 0; i < nz; ++i) {
      cplx sum = 0.0;
      for (std::size_t j = 0; j < nw; ++j) sum += bw[j] / (zn[i] - wn[j]);
      d[a][i] = sum;
    }
  }
  std::vector<std::vector<double>> out(us.size(), std::vector<double>(vs.size()));
  const cplx norm = 1.0 / ((kI * kTwoPi) * (kI * kTwoPi));
  for (std::size_t b = 0; b < vs.size(); ++b) {
    std::vector<cplx> az(nz);
    for (std::size_t i = 0; i < nz; ++i) az[i] = z0[i] * std::exp(vs[b] * zn[i]);
    for (std::size_t a = 0; a < us.size(); ++a) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < nz; ++i) acc += az[i] * d[a][i];
      out[a][b] = std::real(acc * norm);
    }
  }
  return out;
}

double airy_ai(double x) {
  if (x < -9.5) throw PreconditionError("airy_ai: argument below the supported range");
  if (x <= 8.5) {
    const double c1 = 0.35502805388781723926;
    const double c2 = 0.25881940379280679841;
    double x3 = x * x * x;
    double f = 1.0, tf = 1.0;
    for (int k = 1; k < 80; ++k) {
      tf *= x3 / (3.0 * k * (3.0 * k - 1.0));
      f += tf;
      if (std::abs(tf) < 1e-18 * std::abs(f) && k > 4) break;
    }
    double g = x, tg = x;
    for (int k = 1; k < 80; ++k) {
      tg *= x3 / (3.0 * k * (3.0 * k + 1.0));
      g += tg;
      if (std::abs(tg) < 1e-18 * std::abs(g) && k > 4) break;
    }
    return c1 * f - c2 * g;
  }
  double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
  double sum = 1.0, term = 1.0, last = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
            (216.0 * k * (2.0 * k - 1.0)) / zeta;
    double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-18) break;
  }
  return std::exp(-zeta) / (2.0 * std::sqrt(kPi) * std::pow(x, 0.25)) * sum;
}

double airy_kernel_oracle(double u, double v, int order) {
  double lo = std::min(u, v);
  double cap = std::max(4.0, 30.0 - lo);
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  const int panels = 10;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = cap * p / panels, b = cap * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      double t = c + h * x[i];
      acc += h * w[i] * airy_ai(u + t) * airy_ai(v + t);
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------

void HardParams::validate() const {
  if (!(kappa > 0.0)) throw PreconditionError("HardParams: kappa > 0 required");
  if (alpha < 0) throw PreconditionError("HardParams: alpha >= 0 required");
  for (double s : sigma)
    if (!(s >= 1.0)) throw PreconditionError("HardParams: hard-edge spikes must be >= 1");
  if (!(delta > 0.0)) throw PreconditionError("HardParams: delta > 0 required");
}

namespace {

// mirrored panel layout on the straight segment [a, b] about its midpoint
void mirrored_segment_nodes(cplx a, cplx b, int levels, int order, std::vector<cplx>& nodes,
                            std::vector<cplx>& wts) {
  std::vector<double> bnd;  // in [0,1], symmetric about 1/2
  bnd.push_back(0.0);
  double d = 0.25;
  std::vector<double> left, right;
  for (int l = 0; l < levels; ++l) {
    left.push_back(0.5 - d);
    right.push_back(0.5 + d);
    d *= 0.5;
  }
  for (double v : left) bnd.push_back(v);
  for (auto it = right.rbegin(); it != right.rend(); ++it) bnd.push_back(*it);
  bnd.push_back(0.75);
  bnd.push_back(1.0);
  std::sort(bnd.begin(), bnd.end());
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  cplx dir = b - a;
  for (std::size_t p = 0; p + 1 < bnd.size(); ++p) {
    double c = 0.5 * (bnd[p] + bnd[p + 1]), h = 0.5 * (bnd[p + 1] - bnd[p]);
    for (int i = 0; i < order; ++i) {
      nodes.push_back(a + (c + h * x[i]) * dir);
      wts.push_back(h * w[i] * dir);
    }
  }
}

// geometric panels toward the endpoint `sing` of the segment
void cusp_segment_nodes(cplx from, cplx to, bool sing_at_from, int levels, int order,
                        std::vector<cplx>& nodes, std::vector<cplx>& wts) {
  std::vector<double> bnd;  // distances from the singular end, in [eps, 1]
  double d = 1.0;
  bnd.push_back(1.0);
  for (int l = 0; l < levels; ++l) {
    d *= 0.5;
    bnd.push_back(d);
  }
  bnd.push_back(0.0);
  std::sort(bnd.begin(), bnd.end());
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  cplx dir = to - from;
  for (std::size_t p = 0; p + 1 < bnd.size(); ++p) {
    double t0 = bnd[p], t1 = bnd[p + 1];
    double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    for (int i = 0; i < order; ++i) {
      double t = c + h * x[i];             // distance from singular end
      double s = sing_at_from ? t : 1.0 - t;  // parameter along from->to
      nodes.push_back(from + s * dir);
      wts.push_back((sing_at_from ? 1.0 : -1.0) * h * w[i] * dir);
    }
  }
}

void plain_segment_nodes(cplx a, cplx b, int order, std::vector<cplx>& nodes,
                         std::vector<cplx>& wts) {
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  cplx dir = b - a;
  for (int i = 0; i < order; ++i) {
    nodes.push_back(a + 0.5 * (x[i] + 1.0) * dir);
    wts.push_back(0.5 * w[i] * dir);
  }
}

}  // namespace

HardKernel::HardKernel(const HardParams& p, int order, int refine_levels)
    : p_(p) {
  p_.validate();
  // sigma = 1 factors are identities; drop them to keep 1/sigma poles off 1
  std::vector<double> sig;
  for (double s : p_.sigma)
    if (s > 1.0 + 1e-12) sig.push_back(s);
  p_.sigma = sig;

  // the cusp bulge into Re > 1 carries the analytically continued branch;
  // capping its width keeps the branch-jump segment short so the value is
  // delta-independent to machine grade
  const double b = std::min(p_.delta / 3.0, 0.08);
  const double top = 2.0 * p_.delta - 2.0 * b;
  const double x_l = sig.empty() ? 0.4 : 0.5 / *std::max_element(sig.begin(), sig.end());
  const double r2 = 1.0 + (sig.empty() ? 1.0 : *std::max_element(sig.begin(), sig.end()));

  const cplx one{1.0, 0.0};
  const cplx c1 = one + cplx(b, 2.0 * b), c1b = std::conj(c1);
  const cplx c2 = one + cplx(-b, top), c2b = std::conj(c2);
  const cplx c3{x_l, top}, c4{x_l, -top};
  // left contour C: anticlockwise, cusp through 1 leaning right
  cusp_segment_nodes(c1b, one, false, refine_levels, order, zn_, zw_);
  cusp_segment_nodes(one, c1, true, refine_levels, order, zn_, zw_);
  mirrored_segment_nodes(c1, c2, refine_levels, order, zn_, zw_);
  plain_segment_nodes(c2, c3, order, zn_, zw_);
  plain_segment_nodes(c3, c4, order, zn_, zw_);
  plain_segment_nodes(c4, c2b, order, zn_, zw_);
  mirrored_segment_nodes(c2b, c1b, refine_levels, order, zn_, zw_);

  const cplx s1 = one + cplx(-1.5 * b, 2.0 * b), s1b = std::conj(s1);
  const cplx s2 = one + cplx(1.5 * b, top), s2b = std::conj(s2);
  const cplx q1{r2, -top}, q2{r2, top};
  // right contour Sigma: anticlockwise, cusp through 1 leaning left
  cusp_segment_nodes(one, s1b, true, refine_levels, order, wn_, ww_);
  mirrored_segment_nodes(s1b, s2b, refine_levels, order, wn_, ww_);
  plain_segment_nodes(s2b, q1, order, wn_, ww_);
  plain_segment_nodes(q1, q2, order, wn_, ww_);
  plain_segment_nodes(q2, s2, order, wn_, ww_);
  mirrored_segment_nodes(s2, s1, refine_levels, order, wn_, ww_);
  cusp_segment_nodes(s1, one, false, refine_levels, order, wn_, ww_);

  // shared psi * essential-exponential * weight matrix
  const double kappa = p_.kappa;
  const cplx inv2pii = 1.0 / (kI * kTwoPi);
  r_.assign(zn_.size(), std::vector<cplx>(wn_.size()));
  std::vector<cplx> zess(zn_.size()), wess(wn_.size());
  for (std::size_t i = 0; i < zn_.size(); ++i) {
    cplx zeta = zn_[i] - 1.0;
    zess[i] = (std::abs(zeta) < 1e-13) ? cplx(0.0) : guarded_exp(-2.0 * kappa / zeta);
  }
  for (std::size_t j = 0; j < wn_.size(); ++j) {
    cplx omega = wn_[j] - 1.0;
    wess[j] = (std::abs(omega) < 1e-13) ? cplx(0.0) : guarded_exp(2.0 * kappa / omega);
  }
  for (std::size_t i = 0; i < zn_.size(); ++i) {
    for (std::size_t j = 0; j < wn_.size(); ++j) {
      cplx v = psi(zn_[i], wn_[j]) * zess[i] * wess[j];
      r_[i][j] = v * zw_[i] * ww_[j] * inv2pii * inv2pii;
    }
  }
  // line-term nodes on (0, delta)
  tline_ = gauss_legendre_rule(64, 0.0, p_.delta);
}

cplx HardKernel::psi(cplx z, cplx w) const {
  cplx zeta = z - 1.0, omega = w - 1.0;
  cplx num = -(zeta + omega + zeta * omega);  // 1 - z w, cancellation-free
  cplx den = omega - zeta;                    // w - z
  cplx r = num / den;
  if (p_.alpha != 0) r *= std::pow(w / z, p_.alpha);
  for (double s : p_.sigma) r *= (z - s) / (s * z - 1.0) * (s * w - 1.0) / (w - s);
  return r;
}

double HardKernel::ds_line(double u, double v) const {
  const double kappa = p_.kappa;
  double line = 0.0;
  for (std::size_t q = 0; q < tline_.size(); ++q) {
    double t = std::real(tline_.nodes[q]);
    cplx it{0.0, t};
    cplx val = 1.0 / (1.0 + it) *
               std::exp(-(u / kappa) * (2.0 + it) - (v / kappa) * (2.0 + it) / (1.0 + it));
    line += std::real(tline_.weights[q]) * std::imag(val);
  }
  return -1.0 / (4.0 * kPi * kappa * kappa) * line / kPi;
}

std::vector<cplx> HardKernel::w_profile(double u) const {
  const double kappa = p_.kappa;
  std::vector<cplx> bw(wn_.size());
  for (std::size_t j = 0; j < wn_.size(); ++j) {
    cplx w = wn_[j];
    bw[j] = guarded_exp(-(u / kappa) * (w + 1.0)) / (std::sqrt(w + 1.0) * std::sqrt(w - 1.0));
  }
  std::vector<cplx> d(zn_.size());
  for (std::size_t i = 0; i < zn_.size(); ++i) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < wn_.size(); ++j) sum += r_[i][j] * bw[j];
    d[i] = sum;
  }
  return d;
}

double HardKernel::ds_raw(double u, double v) const {
  const double kappa = p_.kappa;
  auto d = w_profile(u);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < zn_.size(); ++i) {
    cplx z = zn_[i];
    cplx az = guarded_exp(-(v / kappa) * (1.0 + 1.0 / z)) /
              (z * std::sqrt(1.0 + z) * std::sqrt(1.0 - z));
    acc += az * d[i];
  }
  return ds_line(u, v) + 1.0 / (4.0 * kPi * kappa * kappa) * std::real(acc);
}

double HardKernel::ds(double u, double v) const {
  if (u == v) return 0.0;
  return 0.5 * (ds_raw(u, v) - ds_raw(v, u));
}

double HardKernel::finite_kernel(int n, int which, double u, double v, int nodes) const {
  if (n % 2 != 0) throw PreconditionError("finite_kernel: even size required");
  const double kap = p_.kappa;
  const double tau = 1.0 - kap / n;
  if (!(tau > 0.0)) throw PreconditionError("finite_kernel: size too small for this kappa");
  const double em = tau / (1.0 - tau * tau);
  const double lu = u / (kap * em), lv = v / (kap * em);
  if (nodes <= 0) nodes = (which == 2 ? 512 : 192) * n;
  // level contours |(tau z - 1)/(z - tau)| = c (inside the unit disk, around
  // tau and the tau/sigma poles) and |(w - tau)/(tau w - 1)| = c (outside,
  // around 1/tau and sigma/tau); the N-th powers stay bounded by e^q
  const double q = 2.5;
  const double cl = std::exp(q / n);
  double zr = (1.0 + cl * tau) / (cl + tau);
  double zl = (cl * tau - 1.0) / (cl - tau);
  // keep the tau/sigma poles enclosed when spikes are present
  for (double sgm : p_.sigma) zl = std::min(zl, 0.8 * tau / sgm);
  double w1 = (tau + cl) / (1.0 + cl * tau);
  double w2 = (cl - tau) / (cl * tau - 1.0);
  for (double sgm : p_.sigma) w2 = std::max(w2, 1.1 * sgm / tau);
  cplx zc{0.5 * (zl + zr), 0.0};
  double zrad = 0.5 * (zr - zl);
  cplx wc{0.5 * (w1 + w2), 0.0};
  double wrad = 0.5 * (w2 - w1);

  GFunBatch gv(em * lv);
  std::unique_ptr<GFunBatch> gu;
  if (which == 2) gu = std::make_unique<GFunBatch>(em * lu);
  std::vector<cplx> znl(nodes), zwt(nodes), wnl(nodes), wwt(nodes), az(nodes), bw(nodes);
  for (int k = 0; k < nodes; ++k) {
    double th = kTwoPi * k / nodes;
    cplx e{std::cos(th), std::sin(th)};
    znl[k] = zc + zrad * e;
    zwt[k] = zrad * e / double(nodes);
    wnl[k] = wc + wrad * e;
    wwt[k] = wrad * e / double(nodes);
  }
  // sigma products: spikes plus the remaining (n - #sigma) unit entries
  int n_unit = n - static_cast<int>(p_.sigma.size());
  for (int k = 0; k < nodes; ++k) {
    cplx z = znl[k];
    cplx bz = std::pow((tau * z - 1.0) / (z - tau), n_unit);
    for (double sgm : p_.sigma) bz *= (tau * z - sgm) / (sgm * z - tau);
    cplx w = wnl[k];
    cplx bwf = std::pow((w - tau) / (tau * w - 1.0), n_unit);
    for (double sgm : p_.sigma) bwf *= (sgm * w - tau) / (tau * w - sgm);
    if (which == 0) {
      az[k] = gv(z) / (1.0 - z * z) * bz * zwt[k];
      bw[k] = std::exp(-em * lu * (w + 1.0)) / (std::sqrt(w + 1.0) * std::sqrt(w - 1.0)) *
              bwf * wwt[k];
    } else if (which == 1) {
      az[k] = std::exp(-em * lv * (1.0 + 1.0 / z)) /
              (z * std::sqrt(1.0 + z) * std::sqrt(1.0 - z)) * bz * zwt[k];
      bw[k] = std::exp(-em * lu * (w + 1.0)) / (std::sqrt(w + 1.0) * std::sqrt(w - 1.0)) *
              bwf * wwt[k];
    } else {
      az[k] = gv(z) / (1.0 - z * z) * bz * zwt[k];
      bw[k] = (*gu)(1.0 / w) / (w * w - 1.0) * bwf * wwt[k];
    }
  }
  cplx acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    cplx z = znl[i];
    cplx sum = 0.0;
    if (which == 0) {
      for (int j = 0; j < nodes; ++j) sum += bw[j] * (1.0 - z * wnl[j]) / (wnl[j] - z);
    } else {
      for (int j = 0; j < nodes; ++j) sum += bw[j] * (1.0 - z * wnl[j]) / (wnl[j] - z) *
                                             std::pow(wnl[j] / z, p_.alpha);
    }
    acc += az[i] * sum;
  }
  double jac = 1.0 / (kap * em);  // d lambda / du
  if (which == 0) return em * std::real(acc) * jac;
  if (which == 1) return em * em / (4.0 * kPi) * std::real(acc) * jac * jac;
  return 4.0 * kPi * std::real(acc) - weight_e(u / kap, v / kap);
}

double HardKernel::extrapolate(int which, double u, double v) const {
  // three-point fit a + b/N + c/N^2
  const int n1 = which == 2 ? 16 : 32;
  const int n2 = which == 2 ? 24 : 48;
  const int n3 = which == 2 ? 32 : 64;
  double f1 = finite_kernel(n1, which, u, v);
  double f2 = finite_kernel(n2, which, u, v);
  double f3 = finite_kernel(n3, which, u, v);
  double x1 = 1.0 / n1, x2 = 1.0 / n2, x3 = 1.0 / n3;
  double den = (x2 - x1) * (x3 - x1) * (x3 - x2);
  return (f3 * x1 * x2 * (x2 - x1) - f2 * x1 * x3 * (x3 - x1) + f1 * x2 * x3 * (x3 - x2)) / den;
}

double HardKernel::s(double u, double v) const {
  if (p_.alpha != 0)
    throw PreconditionError(
        "HardKernel::s: alpha > 0 unsupported (the finite-size oracle route needs M = N)");
  return extrapolate(0, u, v);
}

double HardKernel::is(double u, double v) const {
  if (p_.alpha != 0)
    throw PreconditionError(
        "HardKernel::is: alpha > 0 unsupported (the finite-size oracle route needs M = N)");
  if (u == v) return 0.0;
  if (u > v) return -is(v, u);
  double a = extrapolate(2, u, v);
  double b = extrapolate(2, v, u);
  return 0.5 * (a - b);
}

KernelTriple HardKernel::eval(double u, double v) const {
  return {ds(u, v), s(u, v), is(u, v)};
}

// ---------------------------------------------------------------------------

double bulk_density(double x) {
  if (!(x > 0.0 && x < 4.0)) throw PreconditionError("bulk_density: x in (0,4) required");
  return 1.0 / (2.0 * kPi) * std::sqrt((4.0 - x) / x);
}

double outlier_x(double tau, double theta) {
  double lim = 0.5 * (tau + 1.0 / tau);
  if (!(theta > 1.0 && theta < lim))
    throw PreconditionError("outlier_x: need 1 < theta < (tau + 1/tau)/2");
  double d = 1.0 / tau - tau;
  return d * d / ((theta - tau) * (1.0 / tau - theta));
}

double outlier_h(double tau, double theta) {
  double lim = 0.5 * (tau + 1.0 / tau);
  if (!(theta > 1.0 && theta < lim))
    throw PreconditionError("outlier_h: need 1 < theta < (tau + 1/tau)/2");
  return (theta - tau) * (1.0 / tau - theta) /
         std::sqrt((1.0 / tau - tau) * (tau + 1.0 / tau - 2.0 * theta));
}

std::pair<double, double> scaling_map(const ScalingRegime& r, int n) {
  switch (r.regime) {
    case Regime::bulk:
      return {double(n) * r.x, 1.0 / bulk_density(r.x)};
    case Regime::soft_critical:
    case Regime::soft_fixed_tau:
      return {4.0 * double(n), std::pow(2.0, 4.0 / 3.0) * std::cbrt(double(n))};
    case Regime::outlier: {
      double xc = outlier_x(r.tau, r.theta);
      double scale = (1.0 - r.tau * r.tau) / (r.tau * outlier_h(r.tau, r.theta)) *
                     std::sqrt(double(n));
      return {double(n) * xc, scale};
    }
    case Regime::hard:
      return {0.0, 2.0 / double(n)};
  }
  throw PreconditionError("scaling_map: unknown regime");
}

}  // namespace espike
