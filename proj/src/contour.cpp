#include "espike/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace espike {

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

cplx Contour::winding(cplx p) const {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] / (nodes_[i] - p);
  return acc / cplx(0.0, 2.0 * kPi);
}

Contour Contour::circle(cplx center, double radius, int order) {
  QuadRule q = trapezoid_circle(order, center, radius);
  Contour c;
  c.nodes_ = q.nodes;
  c.weights_ = q.weights;
  c.segments_.push_back(Segment::make_arc(center, radius, 0.0, 2.0 * kPi));
  c.closed_ = true;
  return c;
}

Contour Contour::polyline(const std::vector<cplx>& pts, bool close, int order_per_seg) {
  if (pts.size() < 2) throw GeometryError("polyline: need at least two points");
  Contour c;
  auto add = [&](cplx a, cplx b) {
    QuadRule q = gauss_legendre_segment(order_per_seg, a, b);
    c.nodes_.insert(c.nodes_.end(), q.nodes.begin(), q.nodes.end());
    c.weights_.insert(c.weights_.end(), q.weights.begin(), q.weights.end());
    c.segments_.push_back(Segment::make_line(a, b));
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) add(pts[i], pts[i + 1]);
  if (close && std::abs(pts.back() - pts.front()) > 1e-13) add(pts.back(), pts.front());
  c.closed_ = close;
  return c;
}

Contour Contour::stadium(double x0, double x1, double h, int order) {
  if (!(x1 > x0) || !(h > 0)) throw GeometryError("stadium: degenerate shape");
  Contour c;
  auto add_line = [&](cplx a, cplx b) {
    QuadRule q = gauss_legendre_segment(order, a, b);
    c.nodes_.insert(c.nodes_.end(), q.nodes.begin(), q.nodes.end());
    c.weights_.insert(c.weights_.end(), q.weights.begin(), q.weights.end());
    c.segments_.push_back(Segment::make_line(a, b));
  };
  auto add_arc = [&](cplx ctr, double th0, double th1) {
    std::vector<double> x, w;
    gauss_legendre_raw(order, x, w);
    for (int i = 0; i < order; ++i) {
      double th = 0.5 * (th0 + th1) + 0.5 * (th1 - th0) * x[i];
      cplx e{std::cos(th), std::sin(th)};
      c.nodes_.push_back(ctr + h * e);
      c.weights_.push_back(0.5 * (th1 - th0) * w[i] * cplx(0.0, 1.0) * h * e);
    }
    c.segments_.push_back(Segment::make_arc(ctr, h, th0, th1));
  };
  add_line(cplx(x0, -h), cplx(x1, -h));
  add_arc(cplx(x1, 0.0), -kPi / 2, kPi / 2);
  add_line(cplx(x1, h), cplx(x0, h));
  add_arc(cplx(x0, 0.0), kPi / 2, 3 * kPi / 2);
  c.closed_ = true;
  return c;
}

void Contour::add_piece(const std::vector<cplx>& nodes, const std::vector<cplx>& weights,
                        const Segment& geom) {
  nodes_.insert(nodes_.end(), nodes.begin(), nodes.end());
  weights_.insert(weights_.end(), weights.begin(), weights.end());
  segments_.push_back(geom);
}

std::string Contour::to_json() const {
  std::string s = "{\"closed\":";
  s += closed_ ? "true" : "false";
  s += ",\"segments\":[";
  char buf[256];
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& g = segments_[i];
    if (g.kind == Segment::Kind::line) {
      std::snprintf(buf, sizeof buf,
                    "{\"kind\":\"line\",\"a\":[%.17g,%.17g],\"b\":[%.17g,%.17g]}",
                    g.a.real(), g.a.imag(), g.b.real(), g.b.imag());
    } else {
      std::snprintf(buf, sizeof buf,
                    "{\"kind\":\"arc\",\"center\":[%.17g,%.17g],\"radius\":%.17g,"
                    "\"th0\":%.17g,\"th1\":%.17g}",
                    g.center.real(), g.center.imag(), g.radius, g.th0, g.th1);
    }
    s += buf;
    if (i + 1 < segments_.size()) s += ',';
  }
  s += "]}";
  return s;
}

namespace {

bool windings_ok(const Contour& c, const std::vector<cplx>& include,
                 const std::vector<cplx>& exclude, double tol) {
  for (const auto& p : include)
    if (std::abs(c.winding(p) - 1.0) > tol) return false;
  for (const auto& p : exclude)
    if (std::abs(c.winding(p)) > tol) return false;
  return true;
}

}  // namespace

Contour loop_around(const std::vector<cplx>& include, const std::vector<cplx>& exclude,
                    int order) {
  if (include.empty()) throw GeometryError("loop_around: empty include set");
  cplx centroid = 0.0;
  for (const auto& p : include) centroid += p;
  centroid /= double(include.size());
  double r_in = 0.0;
  for (const auto& p : include) r_in = std::max(r_in, std::abs(p - centroid));
  double d_ex = 1e300;
  for (const auto& q : exclude) d_ex = std::min(d_ex, std::abs(q - centroid));

  if (d_ex > r_in * (1.0 + 1e-12)) {
    double radius = 0.5 * (r_in + d_ex);
    if (r_in == 0.0 && exclude.empty()) radius = 0.5641895835477563;  // unit-area circle
    Contour c = Contour::circle(centroid, radius, order);
    if (windings_ok(c, include, exclude, 1e-10)) return c;
    c = Contour::circle(centroid, radius, order * 2);
    if (windings_ok(c, include, exclude, 1e-10)) return c;
  }
  // stadium fallback for a real-axis cluster with excluded points off-axis
  double x0 = 1e300, x1 = -1e300, ymax = 0.0;
  for (const auto& p : include) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    ymax = std::max(ymax, std::abs(p.imag()));
  }
  double gap = 1e300;
  for (const auto& q : exclude) {
    double dx = std::max({x0 - q.real(), q.real() - x1, 0.0});
    double dy = std::abs(q.imag());
    gap = std::min(gap, std::max(dx, dy));
  }
  if (gap <= ymax || gap == 0.0)
    throw GeometryError("loop_around: include/exclude sets not separable");
  double h = ymax + 0.5 * (gap - ymax);
  double pad = 0.25 * h;
  Contour c = Contour::stadium(x0 - pad, x1 + pad, h, std::max(order / 4, 32));
  if (!windings_ok(c, include, exclude, 1e-10))
    throw GeometryError("loop_around: winding verification failed");
  return c;
}

std::vector<double> panel_boundaries(double r_cut, double t_star, int refine_levels) {
  std::vector<double> b;
  b.push_back(0.0);
  if (t_star > 0.0 && t_star < r_cut && refine_levels > 0) {
    // geometric refinement toward t_star from both sides, mirrored
    double span = std::min(t_star, r_cut - t_star);
    double h = 0.5 * span;
    std::vector<double> left, right;
    double d = h;
    for (int l = 0; l < refine_levels; ++l) {
      left.push_back(t_star - d);
      right.push_back(t_star + d);
      d *= 0.5;
    }
    for (double v : left) b.push_back(v);
    for (auto it = right.rbegin(); it != right.rend(); ++it) b.push_back(*it);
    b.push_back(t_star + h);
  }
  // fine panels near the vertex (rational factors can peak there), then
  // geometric growth out to r_cut
  for (double v : {0.06, 0.15, 0.3})
    if (v < r_cut) b.push_back(v);
  double last = b.back();
  double step = 0.3;
  while (last < r_cut) {
    last = std::min(r_cut, last + step);
    b.push_back(last);
    step = std::min(1.6 * step, 1.5);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(),
                      [](double a, double c) { return std::abs(a - c) < 1e-15; }),
          b.end());
  return b;
}

Contour wedge_contour(double vertex, bool opening_left, double r_cut, int order_per_panel,
                      double t_star, int refine_levels) {
  if (!(r_cut > 0)) throw PreconditionError("wedge_contour: r_cut > 0 required");
  const cplx v{vertex, 0.0};
  cplx dir_up, dir_dn;
  if (opening_left) {
    dir_up = std::polar(1.0, 2.0 * kPi / 3.0);
    dir_dn = std::polar(1.0, -2.0 * kPi / 3.0);
  } else {
    dir_up = std::polar(1.0, kPi / 3.0);
    dir_dn = std::polar(1.0, -kPi / 3.0);
  }
  auto bounds = panel_boundaries(r_cut, t_star, refine_levels);
  std::vector<double> x, w;
  gauss_legendre_raw(order_per_panel, x, w);

  Contour c;
  std::vector<cplx> nodes, weights;
  auto emit_ray = [&](cplx dir, bool outward) {
    nodes.clear();
    weights.clear();
    if (outward) {
      for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
        double a = bounds[p], b = bounds[p + 1], cmid = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < order_per_panel; ++i) {
          nodes.push_back(v + (cmid + h * x[i]) * dir);
          weights.push_back(h * w[i] * dir);
        }
      }
    } else {
      for (std::size_t p = bounds.size() - 1; p > 0; --p) {
        double a = bounds[p], b = bounds[p - 1];  // inward traversal
        double cmid = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < order_per_panel; ++i) {
          nodes.push_back(v + (cmid + h * x[i]) * dir);
          weights.push_back(h * w[i] * dir);
        }
      }
    }
    c.add_piece(nodes, weights, Segment::make_line(outward ? v : v + r_cut * dir,
                                                   outward ? v + r_cut * dir : v));
  };
  if (opening_left) {
    emit_ray(dir_dn, false);  // from e^{-2 i pi/3} inf in to the vertex
    emit_ray(dir_up, true);   // out to e^{+2 i pi/3} inf
  } else {
    emit_ray(dir_up, false);  // from e^{+i pi/3} inf down to the vertex
    emit_ray(dir_dn, true);   // out to e^{-i pi/3} inf
  }
  return c;
}

Contour airy_rays(RayKind kind, double delta, double pi_min, double r_cut, int order) {
  if (!(delta > 0.0) || (pi_min > 0.0 && !(delta < pi_min)))
    throw PreconditionError("airy_rays: need 0 < delta < min pi");
  if (!(r_cut > 0.0)) throw PreconditionError("airy_rays: r_cut > 0 required");
  if (kind == RayKind::c_greater) return wedge_contour(0.5 * delta, true, r_cut, order);
  return wedge_contour(delta, false, r_cut, order);
}

cplx phase_f(double x, double tau, cplx z) {
  if (!(x > 0.0)) throw PreconditionError("phase_f: x > 0 required");
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("phase_f: tau in (0,1) required");
  if (std::abs(z - tau) < 1e-14 || std::abs(z - 1.0 / tau) < 1e-14)
    throw NumericalError("phase_f: z at a branch point");
  double em = tau / (1.0 - tau * tau);
  return em * x * (z + 1.0) + std::log(tau * z - 1.0) - std::log(z - tau);
}

PhasePoint saddles(double x, double tau) {
  if (!(x > 0.0)) throw PreconditionError("saddles: x > 0 required");
  PhasePoint p;
  p.x = x;
  p.tau = tau;
  double mid = 0.5 * (tau + 1.0 / tau);
  double half = 0.5 * (1.0 / tau - tau);
  p.z0 = mid;
  double disc = 1.0 - 4.0 / x;
  if (std::abs(disc) < 1e-14) {
    p.regime = 2;
    p.z_plus = p.z_minus = mid;
  } else if (disc < 0.0) {
    p.regime = 1;
    double s = std::sqrt(-disc);
    p.z_plus = cplx(mid, half * s);
    p.z_minus = cplx(mid, -half * s);
  } else {
    p.regime = 3;
    double s = std::sqrt(disc);
    p.z_plus = mid + half * s;
    p.z_minus = mid - half * s;
  }
  return p;
}

cplx pv_integrate(cplx a, cplx b, const std::function<cplx(cplx)>& f, cplx mark,
                  double half_width, int order) {
  cplx dir = b - a;
  double len = std::abs(dir);
  dir /= len;
  double tm = std::real(std::conj(dir) * (mark - a));
  if (tm <= 0.0 || tm >= len || std::abs(mark - (a + tm * dir)) > 1e-10 * len)
    throw PreconditionError("pv_integrate: mark must lie strictly inside [a,b]");

  auto eval = [&](double h) -> cplx {
    if (h >= tm || h >= len - tm)
      throw PreconditionError("pv_integrate: exclusion width exceeds the segment");
    cplx acc = 0.0;
    // away parts, plus symmetric panels hugging the exclusion
    auto piece = [&](double t0, double t1) {
      if (t1 <= t0) return;
      int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / (0.25 * len))));
      std::vector<double> x, w;
      gauss_legendre_raw(order, x, w);
      for (int p = 0; p < panels; ++p) {
        double pa = t0 + (t1 - t0) * p / panels, pb = t0 + (t1 - t0) * (p + 1) / panels;
        double c = 0.5 * (pa + pb), hh = 0.5 * (pb - pa);
        for (int i = 0; i < order; ++i) acc += hh * w[i] * dir * f(a + (c + hh * x[i]) * dir);
      }
    };
    // mirrored node layout around the exclusion for the PV cancellation
    auto mirrored = [&](double w0) {
      std::vector<double> x, w;
      gauss_legendre_raw(order, x, w);
      for (int i = 0; i < order; ++i) {
        double t = 0.5 * w0 * (x[i] + 1.0);  // (0, w0)
        double ww = 0.5 * w0 * w[i];
        acc += ww * dir * (f(a + (tm + h + t) * dir) + f(a + (tm - h - t) * dir));
      }
    };
    double w0 = std::min(tm - h, len - tm - h);
    mirrored(w0);
    piece(0.0, tm - h - w0);
    piece(tm + h + w0, len);
    return acc;
  };

  // the excluded window removes ~2h f(mark) of any regular component, so
  // halve the width and extrapolate that linear part away
  cplx prev = eval(half_width);
  cplx prev_r = prev;
  bool have_r = false;
  for (int k = 1; k <= 6; ++k) {
    cplx cur = eval(half_width * std::pow(0.5, k));
    cplx rich = 2.0 * cur - prev;
    if (have_r && std::abs(rich - prev_r) <= 1e-8 * std::max(1.0, std::abs(rich))) return rich;
    prev = cur;
    prev_r = rich;
    have_r = true;
  }
  throw ConvergenceError("pv_integrate: unstable under halving the exclusion width");
}

}  // namespace espike
