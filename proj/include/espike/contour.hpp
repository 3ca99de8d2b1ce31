#pragma once
#include <functional>
#include <string>
#include <vector>

#include "espike/linalg.hpp"
#include "espike/quadrature.hpp"

namespace espike {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Segment {
  enum class Kind { line, arc } kind = Kind::line;
  cplx a, b;            // line endpoints
  cplx center;          // arc
  double radius = 0.0;  // arc
  double th0 = 0.0, th1 = 0.0;

  static Segment make_line(cplx a, cplx b) {
    Segment s;
    s.kind = Kind::line;
    s.a = a;
    s.b = b;
    return s;
  }
  static Segment make_arc(cplx c, double r, double th0, double th1) {
    Segment s;
    s.kind = Kind::arc;
    s.center = c;
    s.radius = r;
    s.th0 = th0;
    s.th1 = th1;
    return s;
  }
};

// Oriented piecewise-smooth path with baked quadrature nodes/weights
// (weights include dz). Closed contours close to 1e-13 by construction.
class Contour {
 public:
  Contour() = default;

  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<cplx>& weights() const { return weights_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool closed() const { return closed_; }

  template <class F>
  cplx integrate(F&& f) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }
  // winding number (1/2pi i) contour-int dz/(z-p)
  cplx winding(cplx p) const;

  std::string to_json() const;

  // circle traversed anticlockwise (closed trapezoid rule)
  static Contour circle(cplx center, double radius, int order = 256);
  // polyline through the points, Gauss-Legendre per side
  static Contour polyline(const std::vector<cplx>& pts, bool close, int order_per_seg = 64);
  // stadium around the real segment [x0,x1], half-height h, anticlockwise
  static Contour stadium(double x0, double x1, double h, int order = 64);
  // append a pre-quadratured piece
  void add_piece(const std::vector<cplx>& nodes, const std::vector<cplx>& weights,
                 const Segment& geom);

 private:
  std::vector<Segment> segments_;
  std::vector<cplx> nodes_, weights_;
  bool closed_ = false;
  friend Contour join(const Contour&, const Contour&);
};

// Closed positively-oriented contour enclosing every point of `include` and
// none of `exclude`; circle first, stadium fallback, verified windings.
Contour loop_around(const std::vector<cplx>& include, const std::vector<cplx>& exclude,
                    int order = 512);

enum class RayKind { c_greater, c_less };

// Edge wedge contours. c_greater runs from exp(-2 i pi/3) inf up through
// delta/2, c_less from exp(i pi/3) inf down through delta (paper-standard
// orientation); both truncated at |t| = r_cut along the rays with
// truncation error <= exp(-r_cut^3/6) for cubic-decay integrands.
Contour airy_rays(RayKind kind, double delta, double pi_min, double r_cut, int order = 24);

// General wedge with vertex v: opening_left picks ray angles +-2pi/3
// (upward orientation), otherwise +-pi/3 (downward orientation, matching
// the kernels' conventions). Panel boundaries can be refined geometrically
// toward a crossing parameter t_star (mirror-symmetric node layout).
Contour wedge_contour(double vertex, bool opening_left, double r_cut, int order_per_panel = 20,
                      double t_star = -1.0, int refine_levels = 0);

// ray-parameter panel boundaries used by wedge_contour (exposed for tests)
std::vector<double> panel_boundaries(double r_cut, double t_star, int refine_levels);

struct PhasePoint {
  double x = 0.0;
  double tau = 0.0;
  cplx z_plus, z_minus;  // saddle points
  cplx z0;               // double saddle at x = 4
  int regime = 0;        // 1 bulk (complex pair), 2 edge (double), 3 outlier (real pair)
};

// f(x; z) = eta_- x (z+1) + log(tau z - 1) - log(z - tau), principal logs.
cplx phase_f(double x, double tau, cplx z);
PhasePoint saddles(double x, double tau);

// symmetric-exclusion principal value along the line [a,b] through `mark`
cplx pv_integrate(cplx a, cplx b, const std::function<cplx(cplx)>& f, cplx mark,
                  double half_width = 1e-3, int order = 64);

}  // namespace espike
