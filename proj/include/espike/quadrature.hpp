#pragma once
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace espike {

using cplx = std::complex<double>;

enum class QuadKind {
  gauss_legendre,
  trapezoid_closed,
  gauss_hermite,
  semi_infinite_mapped,
};

// Nodes and weights such that  integral ~= sum_i weights[i] * f(nodes[i]).
// For contour rules the weights carry the dz factor.
struct QuadRule {
  QuadKind kind = QuadKind::gauss_legendre;
  std::vector<cplx> nodes;
  std::vector<cplx> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto integrate(F&& f) const -> decltype(weights[0] * f(nodes[0])) {
    decltype(weights[0] * f(nodes[0])) acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

struct ConfigurationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nodes/weights on [-1,1]; cached per order.
void gauss_legendre_raw(int order, std::vector<double>& x, std::vector<double>& w);
// Gauss-Hermite with weight exp(-x^2); cached per order.
void gauss_hermite_raw(int order, std::vector<double>& x, std::vector<double>& w);

QuadRule gauss_legendre_rule(int order, double a, double b);
// Composite Gauss-Legendre over a straight segment in the complex plane.
QuadRule gauss_legendre_segment(int order, cplx a, cplx b);
QuadRule gauss_hermite_rule(int order);
// Closed equispaced rule for a circle contour traversed anticlockwise.
QuadRule trapezoid_circle(int order, cplx center, double radius);
// t = scale*s/(1-s) mapping of [0,1) for integrals over (0,inf).
QuadRule semi_infinite_rule(int order, double scale);

QuadRule make_quadrature(QuadKind kind, int order, double a, double b);

// Evaluates eval(order) at doubling orders until two refinements agree to
// tol (abs + rel mix); throws ConvergenceError when the budget is exhausted.
cplx refine_until(const std::function<cplx(int)>& eval, int order0, double tol,
                  int max_doublings = 6, const char* what = "quadrature");

}  // namespace espike
