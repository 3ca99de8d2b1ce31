#include "espike/kernel_finite.hpp"

#include <algorithm>
#include <cmath>

#include "espike/pfaffian.hpp"

namespace espike {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 6.283185307179586476925287;

// nodes of a circle with the 1/(2 pi i) dz factor folded into the weights
void circle_nodes(cplx center, double radius, int n, std::vector<cplx>& zs,
                  std::vector<cplx>& ws) {
  zs.resize(n);
  ws.resize(n);
  for (int k = 0; k < n; ++k) {
    double th = kTwoPi * k / n;
    cplx e{std::cos(th), std::sin(th)};
    zs[k] = center + radius * e;
    ws[k] = radius * e / double(n);  // (1/2pi i) * i r e^{i th} * (2pi/n)
  }
}

cplx sqrt_z2m1(cplx z) { return std::sqrt(z + 1.0) * std::sqrt(z - 1.0); }

}  // namespace

FiniteKernel::FiniteKernel(const SpikeConfig& cfg, double x_hint, int nodes)
    : cfg_(cfg), nodes_(nodes) {
  cfg_.validate();
  if (cfg_.M % 2 != 0) throw PreconditionError("FiniteKernel: M must be even");
  const double tau = cfg_.tau;
  const int N = cfg_.N, M = cfg_.M;
  double lo = 1e300, hi = -1e300;
  for (double s : cfg_.sigma) {
    lo = std::min(lo, s / tau);
    hi = std::max(hi, s / tau);
  }
  const double cw = 0.5 * (lo + hi);

  // z-contour: |z| = rho_z circle enclosing +-1 and tau/sigma for M = N;
  // a small right-half-disk circle around the tau/sigma cluster for M > N.
  double rho_z = 0.0;
  cplx cz = 0.0;
  double rz = 0.0;
  if (M == N) {
    // hug the unit circle when the sigma/tau cluster pinches toward 1, so
    // the w-contour keeps room and its pole products stay bounded
    rho_z = (lo - 1.0 < 0.2) ? 1.0 + 0.25 * (lo - 1.0) : std::min(0.5 * (1.0 + lo), 1.6);
    circle_nodes(cplx(0.0), rho_z, nodes_, zs_, zw_);
  } else {
    double zlo = 1e300, zhi = -1e300;
    for (double s : cfg_.sigma) {
      zlo = std::min(zlo, tau / s);
      zhi = std::max(zhi, tau / s);
    }
    cz = 0.5 * (zlo + zhi);
    double rz_need = 0.525 * (zhi - zlo) + 0.02 * (1.0 - zhi);
    double rz_cap = 0.9 * std::min(1.0 - std::real(cz), std::real(cz));
    rz = std::max(rz_need, 0.6 * rz_cap);
    if (rz > rz_cap)
      throw GeometryError("FiniteKernel: tau/sigma cluster too wide for a unit-disk contour");
    circle_nodes(cz, rz, nodes_, zs_, zw_);
    rho_z = std::real(cz) + rz;  // rightmost reach, used for the w-gap below
  }

  // w-contour around the sigma/tau cluster, kept right of the z-contour
  double r_need = 0.5 * (hi - lo) + 1e-3;
  double r_cap = 0.93 * std::min(cw - rho_z - 0.02, cw - 1.0);
  double rw = r_cap;
  if (x_hint > 0.0 && x_hint < 4.0) {
    PhasePoint p = saddles(x_hint, tau);
    double target = std::abs(p.z_plus - cw);
    rw = std::min(r_cap, target);
  }
  rw = std::max(rw, r_need);
  if (rw > 0.98 * (cw - 1.0))
    throw GeometryError("FiniteKernel: cannot separate the w-contour from the branch cut");
  circle_nodes(cplx(cw), rw, nodes_, ws_, ww_);

  // per-node rational products
  const int d = M - N;
  prod_z_s_.resize(nodes_);
  inv_one_minus_z2_.resize(nodes_);
  for (int i = 0; i < nodes_; ++i) {
    cplx z = zs_[i];
    cplx p = 1.0;
    for (double s : cfg_.sigma) p *= (tau * z - s) / (s * z - tau);
    if (d > 0) p /= std::pow(z, d);
    prod_z_s_[i] = p;
    inv_one_minus_z2_[i] = 1.0 / (1.0 - z * z);
  }
  prod_w_s_.resize(nodes_);
  prod_w_ds_.resize(nodes_);
  for (int j = 0; j < nodes_; ++j) {
    cplx w = ws_[j];
    cplx p = 1.0;
    for (double s : cfg_.sigma) p *= (s * w - tau) / (tau * w - s);
    cplx rt = sqrt_z2m1(w);
    prod_w_s_[j] = p / rt * (d > 0 ? std::pow(w, d) : cplx(1.0));
    prod_w_ds_[j] = p / rt * (d > 0 ? std::pow(w, d) : cplx(1.0));
  }

  if (d > 0) {
    // extended-parameter sequence for the Richardson limit of S/IS
    const double eps = 8e-4;
    for (double e : {eps, 0.5 * eps, 0.25 * eps}) {
      std::vector<double> ext(d);
      for (int a = 0; a < d; ++a) ext[a] = e * (a + 1);
      gram_seq_.push_back(std::make_unique<GramKernel>(cfg_, ext));
    }
  }
}

namespace {
double richardson3(double f0, double f1, double f2) {
  // values at eps, eps/2, eps/4 of a function with an O(eps) error term
  double r1 = 2.0 * f1 - f0;
  double r2 = 2.0 * f2 - f1;
  return (4.0 * r2 - r1) / 3.0;
}
}  // namespace

double FiniteKernel::ds(double u, double v) const {
  if (!(u > 0.0 && v > 0.0)) throw PreconditionError("FiniteKernel::ds: u, v > 0 required");
  const double em = cfg_.eta_minus();
  const int n = nodes_;
  std::vector<cplx> av(n), bu(n);
  for (int j = 0; j < n; ++j) {
    cplx w = ws_[j];
    av[j] = std::exp(-em * v * (w + 1.0)) * prod_w_ds_[j] * ww_[j];
    bu[j] = std::exp(-em * u * (w + 1.0)) * prod_w_ds_[j] * ww_[j];
  }
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx z = ws_[i];
    cplx rowi = av[i];
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) {
      // z couples to v, w couples to u
      sum += bu[j] * (z - ws_[j]) / (1.0 - z * ws_[j]);
    }
    acc += rowi * sum;
  }
  return em * em / (4.0 * kPi) * std::real(acc);
}

cplx FiniteKernel::s_inner(const std::vector<cplx>& gz, double u) const {
  const double em = cfg_.eta_minus();
  const int n = nodes_;
  cplx acc = 0.0;
  std::vector<cplx> bu(n);
  for (int j = 0; j < n; ++j)
    bu[j] = std::exp(-em * u * (ws_[j] + 1.0)) * prod_w_s_[j] * ww_[j];
  for (int i = 0; i < n; ++i) {
    cplx z = zs_[i];
    cplx a = gz[i] * inv_one_minus_z2_[i] * prod_z_s_[i] * zw_[i];
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) sum += bu[j] * (1.0 - z * ws_[j]) / (ws_[j] - z);
    acc += a * sum;
  }
  return em * acc;
}

double FiniteKernel::s(double u, double v) const {
  if (!(u > 0.0 && v > 0.0)) throw PreconditionError("FiniteKernel::s: u, v > 0 required");
  if (!gram_seq_.empty())
    return richardson3(gram_seq_[0]->s_sum(u, v), gram_seq_[1]->s_sum(u, v),
                       gram_seq_[2]->s_sum(u, v));
  GFunBatch batch(cfg_.eta_minus() * v);
  std::vector<cplx> gz(nodes_);
  for (int i = 0; i < nodes_; ++i) gz[i] = batch(zs_[i]);
  return std::real(s_inner(gz, u));
}

double FiniteKernel::is(double u, double v) const {
  if (!(u > 0.0 && v > 0.0)) throw PreconditionError("FiniteKernel::is: u, v > 0 required");
  if (!gram_seq_.empty())
    return richardson3(gram_seq_[0]->is_sum(u, v), gram_seq_[1]->is_sum(u, v),
                       gram_seq_[2]->is_sum(u, v));
  const double em = cfg_.eta_minus();
  const int n = nodes_;
  GFunBatch bv(em * v), bu(em * u);
  std::vector<cplx> az(n), bw(n);
  for (int i = 0; i < n; ++i) {
    az[i] = bv(zs_[i]) * inv_one_minus_z2_[i] * prod_z_s_[i] * zw_[i];
    bw[i] = bu(zs_[i]) * inv_one_minus_z2_[i] * prod_z_s_[i] * zw_[i];
  }
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx z = zs_[i];
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) sum += bw[j] * (z - zs_[j]) / (1.0 - z * zs_[j]);
    acc += az[i] * sum;
  }
  double base = 4.0 * kPi * std::real(acc);
  if (cfg_.M > cfg_.N) base -= weight_e(em * u, em * v);
  return base;
}

std::vector<double> FiniteKernel::s_diag(const std::vector<double>& lambda) const {
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = s(lambda[i], lambda[i]);
  return out;
}

std::vector<std::vector<double>> FiniteKernel::s_grid(const std::vector<double>& us,
                                                      const std::vector<double>& vs) const {
  if (!gram_seq_.empty()) {
    std::vector<std::vector<double>> out(us.size(), std::vector<double>(vs.size()));
    for (std::size_t a = 0; a < us.size(); ++a)
      for (std::size_t b = 0; b < vs.size(); ++b) out[a][b] = s(us[a], vs[b]);
    return out;
  }
  const double em = cfg_.eta_minus();
  const int n = nodes_;
  // D_i(u) = sum_j coupling(z_i, w_j) B_j(u)
  std::vector<std::vector<cplx>> dmat(us.size(), std::vector<cplx>(n));
  std::vector<cplx> bu(n);
  for (std::size_t a = 0; a < us.size(); ++a) {
    for (int j = 0; j < n; ++j)
      bu[j] = std::exp(-em * us[a] * (ws_[j] + 1.0)) * prod_w_s_[j] * ww_[j];
    for (int i = 0; i < n; ++i) {
      cplx z = zs_[i];
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j) sum += bu[j] * (1.0 - z * ws_[j]) / (ws_[j] - z);
      dmat[a][i] = sum;
    }
  }
  std::vector<std::vector<double>> out(us.size(), std::vector<double>(vs.size()));
  for (std::size_t b = 0; b < vs.size(); ++b) {
    GFunBatch batch(em * vs[b]);
    std::vector<cplx> av(n);
    for (int i = 0; i < n; ++i)
      av[i] = batch(zs_[i]) * inv_one_minus_z2_[i] * prod_z_s_[i] * zw_[i];
    for (std::size_t a = 0; a < us.size(); ++a) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) acc += av[i] * dmat[a][i];
      out[a][b] = std::real(em * acc);
    }
  }
  return out;
}

double FiniteKernel::correlation_k(const std::vector<double>& points) const {
  const int k = static_cast<int>(points.size());
  if (k < 1) throw PreconditionError("correlation_k: need at least one point");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (points[i] == points[j]) return 0.0;  // repeated rows: Pfaffian vanishes
  if (k == 1) return r1(points[0]);
  ComplexMatrix a(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double dsv = (i == j) ? 0.0 : ds(points[i], points[j]);
      double sv = s(points[i], points[j]);
      double svt = s(points[j], points[i]);
      double isv = (i == j) ? 0.0 : is(points[i], points[j]);
      a(2 * i, 2 * j) = dsv;
      a(2 * i, 2 * j + 1) = sv;
      a(2 * i + 1, 2 * j) = -svt;
      a(2 * i + 1, 2 * j + 1) = isv;
    }
  }
  // enforce exact skew symmetry against quadrature roundoff
  for (int r = 0; r < 2 * k; ++r)
    for (int c = r + 1; c < 2 * k; ++c) {
      cplx v = 0.5 * (a(r, c) - a(c, r));
      a(r, c) = v;
      a(c, r) = -v;
    }
  return std::real(pfaffian(a));
}

double FiniteKernel::s_via_t_integral(double u, double v, int t_order, double t_cap) const {
  if (cfg_.M != cfg_.N)
    throw PreconditionError(
        "s_via_t_integral: the compact t-integrated form is valid at M = N only");
  const double em = cfg_.eta_minus();
  const int n = nodes_;
  if (t_cap <= 0.0) {
    // the integrand decays at the density tail rate e^{-(eta_+ s_min - eta_-) t};
    // beyond that the antisymmetric weight loses relative accuracy, so cap there
    double smin = *std::min_element(cfg_.sigma.begin(), cfg_.sigma.end());
    t_cap = 34.0 / (cfg_.eta_plus() * smin - em);
  }
  // DS(u, t) on the t-grid: t couples to the z-variable of the DS integrand
  std::vector<cplx> bu(n);
  for (int j = 0; j < n; ++j)
    bu[j] = std::exp(-em * u * (ws_[j] + 1.0)) * prod_w_ds_[j] * ww_[j];
  std::vector<cplx> coup(n);
  for (int i = 0; i < n; ++i) {
    cplx z = ws_[i];
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) sum += bu[j] * (z - ws_[j]) / (1.0 - z * ws_[j]);
    coup[i] = sum * prod_w_ds_[i] * ww_[i];
  }
  const int panels = 12;
  double acc = 0.0;
  std::vector<double> x, wq;
  gauss_legendre_raw(t_order, x, wq);
  for (int p = 0; p < panels; ++p) {
    double a = t_cap * p / panels, b = t_cap * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int q = 0; q < t_order; ++q) {
      double t = c + h * x[q];
      cplx dsv = 0.0;
      for (int i = 0; i < n; ++i) dsv += std::exp(-em * t * (ws_[i] + 1.0)) * coup[i];
      double ds_ut = em * em / (4.0 * kPi) * std::real(dsv);
      acc += h * wq[q] * weight_e(em * v, em * t) * ds_ut;
    }
  }
  return acc;
}

double FiniteKernel::normalization_integral(double cap, int panels, int order) const {
  std::vector<double> x, w;
  gauss_legendre_raw(order, x, w);
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = cap * p / panels, b = cap * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int q = 0; q < order; ++q) acc += h * w[q] * r1(c + h * x[q]);
  }
  return acc;
}

// ---------------------------------------------------------------------------

JointDensity::JointDensity(const SpikeConfig& cfg, double lambda_cap, int grid_order)
    : cfg_(cfg), cap_(lambda_cap) {
  cfg_.validate();
  if (cfg_.N > 3) throw PreconditionError("JointDensity: N <= 3 only");
  if (cfg_.M % 2 != 0) throw PreconditionError("JointDensity: M must be even");
  for (int i = 0; i < cfg_.N; ++i)
    for (int j = i + 1; j < cfg_.N; ++j)
      if (std::abs(cfg_.sigma[i] - cfg_.sigma[j]) < 1e-9)
        throw PreconditionError(
            "JointDensity: coincident sigma degenerate (det and Z both vanish); "
            "perturb the spikes by distinct small offsets and extrapolate");
  const double ep = cfg_.eta_plus(), em = cfg_.eta_minus();
  expo_.resize(cfg_.N);
  double smin = 1e300;
  for (int j = 0; j < cfg_.N; ++j) {
    expo_[j] = ep * cfg_.sigma[j] + em;
    smin = std::min(smin, cfg_.sigma[j]);
  }
  if (cap_ <= 0.0) cap_ = 42.0 / (ep * smin - em);
  // composite panels, finer where the density lives
  std::vector<double> edges = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  while (edges.back() >= cap_) edges.pop_back();
  edges.push_back(cap_);
  int per = std::max(8, grid_order / 4);
  std::vector<double> x, w;
  gauss_legendre_raw(per, x, w);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    for (int i = 0; i < per; ++i) {
      gt_.push_back(c + h * x[i]);
      gw_.push_back(h * w[i]);
    }
  }
  const int ng = static_cast<int>(gt_.size());
  if (cfg_.N >= 2) emat_ = weight_e_batch(gt_, gt_, em);
  const int n = cfg_.M - cfg_.N;
  gmat_.assign(n + 1, std::vector<double>(ng, 0.0));
  for (int b = 1; b <= n; ++b)
    for (int p = 0; p < ng; ++p) gmat_[b][p] = g_a_value(b, gt_[p], em);
  alpha_ = ComplexMatrix(n, n);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      alpha_(a - 1, b - 1) = (a == b) ? 0.0 : alpha_ab_value(a, b, em);
  z_ = normalization_pass();
}

double JointDensity::unnormalized(const std::vector<double>& lambda) const {
  const int N = cfg_.N, n = cfg_.M - cfg_.N;
  if (static_cast<int>(lambda.size()) != N)
    throw PreconditionError("JointDensity: lambda must have N entries");
  const double em = cfg_.eta_minus();
  // determinant factor
  ComplexMatrix dm(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) dm(j, k) = std::exp(-expo_[j] * lambda[k]);
  double detf = std::real(determinant(dm));
  // Pfaffian factor
  const int m = N + n;
  ComplexMatrix pf(m, m);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      pf(j, k) = (j == k) ? 0.0 : weight_e(em * lambda[j], em * lambda[k]);
  for (int j = 0; j < N; ++j)
    for (int b = 1; b <= n; ++b) {
      double g = g_a_value(b, lambda[j], em);
      pf(j, N + b - 1) = g;
      pf(N + b - 1, j) = -g;
    }
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      pf(N + a - 1, N + b - 1) = (a == b) ? 0.0 : alpha_ab_value(a, b, em);
  double pfv = std::real(pfaffian(pf));
  return detf * pfv;
}

double JointDensity::pf_cached(const std::vector<int>& idx) const {
  const int N = cfg_.N, n = cfg_.M - cfg_.N;
  const int m = N + n;
  ComplexMatrix pf(m, m);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) pf(j, k) = (j == k) ? 0.0 : emat_[idx[j]][idx[k]];
  for (int j = 0; j < N; ++j)
    for (int b = 1; b <= n; ++b) {
      pf(j, N + b - 1) = gmat_[b][idx[j]];
      pf(N + b - 1, j) = -gmat_[b][idx[j]];
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) pf(N + a, N + b) = alpha_(a, b);
  if (m == 2) return std::real(pf(0, 1));
  return std::real(pfaffian(pf));
}

double JointDensity::det_cached(const std::vector<int>& idx) const {
  const int N = cfg_.N;
  ComplexMatrix dm(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) dm(j, k) = std::exp(-expo_[j] * gt_[idx[k]]);
  return std::real(determinant(dm));
}

double JointDensity::normalization_pass() const {
  const int N = cfg_.N;
  const int ng = static_cast<int>(gt_.size());
  double acc = 0.0;
  std::vector<int> idx(N, 0);
  while (true) {
    double wprod = 1.0;
    for (int i = 0; i < N; ++i) wprod *= gw_[idx[i]];
    acc += wprod * det_cached(idx) * pf_cached(idx);
    int pos = N - 1;
    while (pos >= 0 && ++idx[pos] == ng) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return acc;
}

std::vector<double> JointDensity::weight_row(double lambda) const {
  auto row = weight_e_batch({lambda}, gt_, cfg_.eta_minus());
  return row[0];
}

double JointDensity::r1(double lambda) const {
  const int N = cfg_.N, n = cfg_.M - cfg_.N;
  if (N == 1) return unnormalized({lambda}) / z_;
  const int ng = static_cast<int>(gt_.size());
  auto erow = weight_row(lambda);
  std::vector<double> gl(n + 1, 0.0);
  for (int b = 1; b <= n; ++b) gl[b] = g_a_value(b, lambda, cfg_.eta_minus());
  auto unnorm_mixed = [&](const std::vector<int>& rest) -> double {
    // first coordinate fixed at lambda, others at grid nodes
    const int m = N + n;
    ComplexMatrix pf(m, m);
    for (int j = 1; j < N; ++j) {
      pf(0, j) = erow[rest[j - 1]];
      pf(j, 0) = -erow[rest[j - 1]];
      for (int k = 1; k < N; ++k)
        pf(j, k) = (j == k) ? 0.0 : emat_[rest[j - 1]][rest[k - 1]];
    }
    for (int b = 1; b <= n; ++b) {
      pf(0, N + b - 1) = gl[b];
      pf(N + b - 1, 0) = -gl[b];
      for (int j = 1; j < N; ++j) {
        pf(j, N + b - 1) = gmat_[b][rest[j - 1]];
        pf(N + b - 1, j) = -gmat_[b][rest[j - 1]];
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) pf(N + a, N + b) = alpha_(a, b);
    ComplexMatrix dm(N, N);
    for (int j = 0; j < N; ++j) {
      dm(j, 0) = std::exp(-expo_[j] * lambda);
      for (int k = 1; k < N; ++k) dm(j, k) = std::exp(-expo_[j] * gt_[rest[k - 1]]);
    }
    double pfv = (m == 2) ? std::real(pf(0, 1)) : std::real(pfaffian(pf));
    return std::real(determinant(dm)) * pfv;
  };
  double acc = 0.0;
  if (N == 2) {
    for (int q = 0; q < ng; ++q) acc += gw_[q] * unnorm_mixed({q});
    return 2.0 * acc / z_;
  }
  for (int p = 0; p < ng; ++p)
    for (int q = 0; q < ng; ++q) acc += gw_[p] * gw_[q] * unnorm_mixed({p, q});
  return 3.0 * acc / z_;
}

double JointDensity::r2(double l1, double l2) const {
  const int N = cfg_.N;
  if (N < 2) throw PreconditionError("JointDensity::r2: N >= 2 required");
  if (N == 2) return 2.0 * unnormalized({l1, l2}) / z_;
  const int ng = static_cast<int>(gt_.size());
  double acc = 0.0;
  for (int q = 0; q < ng; ++q)
    acc += gw_[q] * unnormalized({l1, l2, gt_[q]});
  return 6.0 * acc / z_;
}

// ---------------------------------------------------------------------------

GramKernel::GramKernel(const SpikeConfig& cfg, const std::vector<double>& extended_rho)
    : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.M % 2 != 0) throw PreconditionError("GramKernel: M must be even");
  const int N = cfg_.N, n = cfg_.M - cfg_.N;
  if (static_cast<int>(extended_rho.size()) != n)
    throw PreconditionError("GramKernel: need M-N extended parameters");
  rho_.resize(N + n);
  for (int k = 0; k < N; ++k) rho_[k] = cfg_.rho(k);
  for (int a = 0; a < n; ++a) rho_[N + a] = extended_rho[a];
  for (int k = 0; k < N + n; ++k) {
    if (!(rho_[k] > 0.0 && rho_[k] < 0.5))
      throw PreconditionError("GramKernel: all rho must lie in (0, 1/2)");
    for (int l = k + 1; l < N + n; ++l)
      if (std::abs(rho_[k] - rho_[l]) < 1e-9)
        throw NumericalError("GramKernel: nearly coincident rho parameters");
  }
  const int m = N + n;
  ComplexMatrix gt(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) {
      gt(j, k) = (rho_[j] - rho_[k]) / (1.0 - rho_[j] - rho_[k]);
      gt(k, j) = -gt(j, k);  // antisymmetric by construction
    }
  double resid = 0.0;
  ctilde_ = inverse(gt, &resid);
  if (resid > 1e-7)
    throw NumericalError("GramKernel: ill-conditioned Gram matrix (residual " +
                         std::to_string(resid) + ")");
  double g_norm = gt.frobenius_norm(), c_norm = ctilde_.frobenius_norm();
  cond_ = g_norm * c_norm / m;

  const double em = cfg_.eta_minus();
  d1_.resize(m);
  d2_.resize(m);
  for (int k = 0; k < N; ++k) d1_[k] = rho_[k] / em;
  for (int a = 0; a < n; ++a) d1_[N + a] = std::pow(em, a);
  for (int k = 0; k < m; ++k) d2_[k] = 1.0 / std::sqrt(1.0 - 2.0 * rho_[k]);
}

cplx GramKernel::f_sum(int j, cplx z) const {
  const int m = static_cast<int>(rho_.size());
  cplx acc = 0.0;
  for (int l = 0; l < m; ++l)
    acc += (z - rho_[l]) / (1.0 - z - rho_[l]) * ctilde_(l, j);
  return acc;
}

cplx GramKernel::f_closed(int j, cplx z) const {
  const int m = static_cast<int>(rho_.size());
  cplx acc = 1.0;
  for (int k = 0; k < m; ++k) {
    if (k == j) continue;
    acc *= (z - rho_[k]) / (1.0 - z - rho_[k]) * (1.0 - rho_[j] - rho_[k]) / (rho_[j] - rho_[k]);
  }
  return acc;
}

double GramKernel::t_transform(int k, double v) const {
  // T(rho; y) = int ds/(2 pi i s) e^{y/s} (s - rho)/((1 - s - rho) sqrt(1-2s))
  const double em = cfg_.eta_minus();
  const double rho = rho_[k];
  const double r = 0.35;
  const int n = std::max(512, static_cast<int>(3.2 * em * v / r) + 64);
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double th = kTwoPi * i / n;
    cplx s = r * cplx(std::cos(th), std::sin(th));
    acc += std::exp(em * v / s) * (s - rho) / ((1.0 - s - rho) * std::sqrt(1.0 - 2.0 * s));
  }
  return std::real(acc) / n;
}

double GramKernel::eps_phi(int k, double v) const {
  return 4.0 * kPi * d1_[k] * d2_[k] * t_transform(k, v);
}

double GramKernel::ds_sum(double u, double v) const {
  const int N = cfg_.N;
  const double em = cfg_.eta_minus();
  double acc = 0.0;
  for (int j = 0; j < N; ++j) {
    double pj = std::exp(-em * u / rho_[j]);
    for (int k = 0; k < N; ++k) {
      double ckj = std::real(ctilde_(k, j)) / (4.0 * kPi * d1_[k] * d2_[k] * d1_[j] * d2_[j]);
      acc += pj * ckj * std::exp(-em * v / rho_[k]);
    }
  }
  return acc;
}

double GramKernel::s_sum(double u, double v) const {
  const int N = cfg_.N, m = static_cast<int>(rho_.size());
  const double em = cfg_.eta_minus();
  double acc = 0.0;
  for (int j = 0; j < N; ++j) {
    double pj = std::exp(-em * u / rho_[j]);
    double inner = 0.0;
    for (int k = 0; k < m; ++k) {
      // c_{kj} eps-phi_k(v): the d-factors of index k cancel
      inner += std::real(ctilde_(k, j)) / (d1_[j] * d2_[j]) * t_transform(k, v);
    }
    acc += pj * inner;
  }
  return acc;
}

double GramKernel::is_sum(double u, double v) const {
  const int m = static_cast<int>(rho_.size());
  const double em = cfg_.eta_minus();
  double acc = -weight_e(em * u, em * v);
  for (int j = 0; j < m; ++j) {
    double ej = eps_phi(j, u);
    for (int k = 0; k < m; ++k) {
      double ckj = std::real(ctilde_(k, j)) / (4.0 * kPi * d1_[k] * d2_[k] * d1_[j] * d2_[j]);
      acc += ej * ckj * eps_phi(k, v);
    }
  }
  return acc;
}

double GramKernel::ds_contour(double u, double v, int nodes) const {
  const int N = cfg_.N, m = static_cast<int>(rho_.size());
  const double em = cfg_.eta_minus();
  // w encircles rho_1..rho_N (not the extended ones, not 0, not 1/2);
  // z encircles 1-rho_1..1-rho_N (not 1-rho_ext, not 1/2, not 1)
  std::vector<cplx> winc, wexc, zinc, zexc;
  for (int k = 0; k < N; ++k) winc.push_back(rho_[k]);
  for (int k = N; k < m; ++k) wexc.push_back(rho_[k]);
  wexc.push_back(0.0);
  wexc.push_back(0.5);
  for (int k = 0; k < N; ++k) zinc.push_back(1.0 - rho_[k]);
  for (int k = N; k < m; ++k) zexc.push_back(1.0 - rho_[k]);
  zexc.push_back(0.5);
  zexc.push_back(1.0);
  Contour cw = loop_around(winc, wexc, nodes);
  Contour cz = loop_around(zinc, zexc, nodes);

  cplx acc = 0.0;
  const auto& zn = cz.nodes();
  const auto& zwt = cz.weights();
  const auto& wn = cw.nodes();
  const auto& wwt = cw.weights();
  std::vector<cplx> zfac(zn.size()), wfac(wn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx z = zn[i];
    cplx p = 1.0;
    for (int k = 0; k < m; ++k) p *= (z - rho_[k]) / (1.0 - z - rho_[k]);
    zfac[i] = std::exp(-em * v / (1.0 - z)) / (std::sqrt(2.0 * z - 1.0) * (1.0 - z)) * p * zwt[i];
  }
  for (std::size_t j = 0; j < wn.size(); ++j) {
    cplx w = wn[j];
    cplx p = 1.0;
    for (int k = 0; k < m; ++k) p *= (1.0 - w - rho_[k]) / (w - rho_[k]);
    wfac[j] = std::exp(-em * u / w) / (std::sqrt(1.0 - 2.0 * w) * w) * p * wwt[j];
  }
  for (std::size_t i = 0; i < zn.size(); ++i)
    for (std::size_t j = 0; j < wn.size(); ++j)
      acc += zfac[i] * wfac[j] * (1.0 - zn[i] - wn[j]) / (wn[j] - zn[i]);
  // weights carry dz, so divide by (2 pi i)^2
  acc /= cplx(0.0, kTwoPi) * cplx(0.0, kTwoPi);
  return em * em / (4.0 * kPi) * std::real(acc);
}

double GramKernel::s_contour_t(double u, double v, int nodes, int t_order) const {
  const int m = static_cast<int>(rho_.size());
  const double em = cfg_.eta_minus();
  // enlarged z-contour encircling every 1-rho_k
  std::vector<cplx> winc, wexc, zinc, zexc;
  const int N = cfg_.N;
  for (int k = 0; k < N; ++k) winc.push_back(rho_[k]);
  for (int k = N; k < m; ++k) wexc.push_back(rho_[k]);
  wexc.push_back(0.0);
  wexc.push_back(0.5);
  for (int k = 0; k < m; ++k) zinc.push_back(1.0 - rho_[k]);
  zexc.push_back(0.5);
  zexc.push_back(1.0);
  Contour cw = loop_around(winc, wexc, nodes);
  Contour cz = loop_around(zinc, zexc, nodes);

  const auto& zn = cz.nodes();
  const auto& zwt = cz.weights();
  const auto& wn = cw.nodes();
  const auto& wwt = cw.weights();
  std::vector<cplx> zfac(zn.size()), wfac(wn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx z = zn[i];
    cplx p = 1.0;
    for (int k = 0; k < m; ++k) p *= (z - rho_[k]) / (1.0 - z - rho_[k]);
    zfac[i] = 1.0 / (std::sqrt(2.0 * z - 1.0) * (1.0 - z)) * p * zwt[i];
  }
  for (std::size_t j = 0; j < wn.size(); ++j) {
    cplx w = wn[j];
    cplx p = 1.0;
    for (int k = 0; k < m; ++k) p *= (1.0 - w - rho_[k]) / (w - rho_[k]);
    wfac[j] = std::exp(-em * u / w) / (std::sqrt(1.0 - 2.0 * w) * w) * p * wwt[j];
  }
  // coupling reduced over w for each z node
  std::vector<cplx> zrow(zn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < wn.size(); ++j)
      sum += wfac[j] * (1.0 - zn[i] - wn[j]) / (wn[j] - zn[i]);
    zrow[i] = sum * zfac[i];
  }
  double smin = *std::min_element(cfg_.sigma.begin(), cfg_.sigma.end());
  double cap = 34.0 / (cfg_.eta_plus() * smin - em);

  std::vector<double> x, wq;
  gauss_legendre_raw(t_order, x, wq);
  const int panels = 10;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = cap * p / panels, b = cap * (p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int q = 0; q < t_order; ++q) {
      double t = c + h * x[q];
      cplx ds = 0.0;
      for (std::size_t i = 0; i < zn.size(); ++i)
        ds += std::exp(-em * t / (1.0 - zn[i])) * zrow[i];
      ds /= cplx(0.0, kTwoPi) * cplx(0.0, kTwoPi);
      double dsv = em * em / (4.0 * kPi) * std::real(ds);
      acc += h * wq[q] * weight_e(em * v, em * t) * dsv;
    }
  }
  return acc;
}

double GramKernel::ds_contour_reduced(const SpikeConfig& cfg, double u, double v, int nodes) {
  cfg.validate();
  const int N = cfg.N, n = cfg.M - cfg.N;
  const double em = cfg.eta_minus();
  std::vector<double> rho(N);
  for (int k = 0; k < N; ++k) rho[k] = cfg.rho(k);
  std::vector<cplx> winc, wexc, zinc, zexc;
  for (int k = 0; k < N; ++k) winc.push_back(rho[k]);
  wexc.push_back(0.0);
  wexc.push_back(0.5);
  for (int k = 0; k < N; ++k) zinc.push_back(1.0 - rho[k]);
  zexc.push_back(0.5);
  zexc.push_back(1.0);
  Contour cw = loop_around(winc, wexc, nodes);
  Contour cz = loop_around(zinc, zexc, nodes);
  const auto& zn = cz.nodes();
  const auto& zwt = cz.weights();
  const auto& wn = cw.nodes();
  const auto& wwt = cw.weights();
  std::vector<cplx> zfac(zn.size()), wfac(wn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    cplx z = zn[i];
    cplx p = 1.0;
    for (int k = 0; k < N; ++k) p *= (z - rho[k]) / (1.0 - z - rho[k]);
    cplx extra = n > 0 ? std::pow(z / (1.0 - z), n) : cplx(1.0);
    zfac[i] =
        std::exp(-em * v / (1.0 - z)) / (std::sqrt(2.0 * z - 1.0) * (1.0 - z)) * p * extra * zwt[i];
  }
  for (std::size_t j = 0; j < wn.size(); ++j) {
    cplx w = wn[j];
    cplx p = 1.0;
    for (int k = 0; k < N; ++k) p *= (1.0 - w - rho[k]) / (w - rho[k]);
    cplx extra = n > 0 ? std::pow((1.0 - w) / w, n) : cplx(1.0);
    wfac[j] = std::exp(-em * u / w) / (std::sqrt(1.0 - 2.0 * w) * w) * p * extra * wwt[j];
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < zn.size(); ++i)
    for (std::size_t j = 0; j < wn.size(); ++j)
      acc += zfac[i] * wfac[j] * (1.0 - zn[i] - wn[j]) / (wn[j] - zn[i]);
  acc /= cplx(0.0, kTwoPi) * cplx(0.0, kTwoPi);
  return em * em / (4.0 * kPi) * std::real(acc);
}

}  // namespace espike
