#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "espike/contour.hpp"
#include "espike/kernel_limit.hpp"

using namespace espike;

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

TEST_CASE("loop_around winding checks") {
  // single point, no exclusions: unit-area circle
  Contour c1 = loop_around({cplx(1.0, 0.0)}, {});
  CHECK(std::abs(c1.winding(cplx(1.0, 0.0)) - 1.0) < 1e-10);
  // sigma/tau cluster vs +-1
  Contour c2 = loop_around({cplx(1.6), cplx(2.2), cplx(4.0)}, {cplx(1.0), cplx(-1.0)});
  for (double p : {1.6, 2.2, 4.0}) CHECK(std::abs(c2.winding(cplx(p)) - 1.0) < 1e-10);
  for (double p : {1.0, -1.0}) CHECK(std::abs(c2.winding(cplx(p))) < 1e-10);
  // tight geometry: include 2, exclude 2.1
  Contour c3 = loop_around({cplx(2.0)}, {cplx(2.1)});
  CHECK(std::abs(c3.winding(cplx(2.0)) - 1.0) < 1e-10);
  CHECK(std::abs(c3.winding(cplx(2.1))) < 1e-10);
  // inseparable sets
  CHECK_THROWS_AS(loop_around({cplx(0.0), cplx(2.0)}, {cplx(1.0)}), GeometryError);
  // closed-contour residue self check
  cplx res = c2.integrate([](cplx z) { return 1.0 / (z - 2.2); });
  CHECK(std::abs(res - cplx(0.0, 2.0 * kPi)) < 1e-10);
}

TEST_CASE("stadium contour") {
  Contour s = Contour::stadium(-1.0, 1.0, 0.4, 96);
  CHECK(std::abs(s.winding(cplx(0.0)) - 1.0) < 1e-10);
  CHECK(std::abs(s.winding(cplx(0.9, 0.0)) - 1.0) < 1e-10);
  CHECK(std::abs(s.winding(cplx(0.0, 0.6))) < 1e-10);
}

TEST_CASE("airy rays reproduce Ai(0) and truncation stability") {
  Contour cg = airy_rays(RayKind::c_greater, 0.5, 1.0, 8.0, 24);
  cplx v = cg.integrate([](cplx z) { return std::exp(-z * z * z / 3.0); });
  v /= cplx(0.0, 2.0 * kPi);
  // Ai(0) = 3^{-2/3}/Gamma(2/3), from the series evaluation
  CHECK(std::abs(v - airy_ai(0.0)) < 1e-8);
  // doubling the truncation radius changes nothing
  Contour cg2 = airy_rays(RayKind::c_greater, 0.5, 1.0, 16.0, 24);
  cplx v2 = cg2.integrate([](cplx z) { return std::exp(-z * z * z / 3.0); });
  v2 /= cplx(0.0, 2.0 * kPi);
  CHECK(std::abs(v - v2) < 1e-9);
  // reversing orientation negates: c_less with the mirrored integrand
  Contour cl = airy_rays(RayKind::c_less, 0.5, 1.0, 8.0, 24);
  cplx w = cl.integrate([](cplx z) { return std::exp(z * z * z / 3.0); });
  w /= cplx(0.0, 2.0 * kPi);
  // substitution z -> -z maps c_less onto c_greater and flips the sign
  CHECK(std::abs(w + v) < 1e-8);
  CHECK_THROWS_AS(airy_rays(RayKind::c_less, 1.5, 1.0, 8.0), PreconditionError);
}

TEST_CASE("phase function and saddles") {
  // x = 4, tau = 0.5: double saddle at 1.25
  PhasePoint p4 = saddles(4.0, 0.5);
  CHECK(p4.regime == 2);
  CHECK(std::abs(p4.z0 - cplx(1.25)) < 1e-12);
  // x = 2: z_pm = 1.25 +- 0.75 i
  PhasePoint p2 = saddles(2.0, 0.5);
  CHECK(p2.regime == 1);
  CHECK(std::abs(p2.z_plus - cplx(1.25, 0.75)) < 1e-12);
  CHECK(std::abs(p2.z_minus - cplx(1.25, -0.75)) < 1e-12);
  // x > 4: two real saddles
  PhasePoint p5 = saddles(5.0, 0.5);
  CHECK(p5.regime == 3);
  CHECK(std::abs(std::imag(p5.z_plus)) < 1e-14);
  // derivative vanishes at the saddle (finite differences)
  for (double x : {2.0, 5.0}) {
    PhasePoint p = saddles(x, 0.5);
    double h = 1e-6;
    cplx fp = (phase_f(x, 0.5, p.z_plus + h) - phase_f(x, 0.5, p.z_plus - h)) / (2.0 * h);
    CHECK(std::abs(fp) < 1e-7);
  }
  CHECK_THROWS_AS(phase_f(2.0, 0.5, cplx(0.5)), NumericalError);
}

TEST_CASE("phase maxima along the saddle circles") {
  // on C_{tau,theta} the real part of the phase peaks at angles +-theta
  double tau = 0.5;
  for (double theta : {0.4, 1.0}) {
    double r = 0.5 * (1.0 / tau - tau) / std::cos(theta);
    double x = 4.0 * std::cos(theta) * std::cos(theta);
    double best = -1e300, best_phi = 0.0;
    for (double phi = -kPi + 1e-3; phi < kPi; phi += 1e-3) {
      cplx z = tau + r * cplx(std::cos(phi), std::sin(phi));
      double re = std::real(phase_f(x, tau, z));
      if (re > best) {
        best = re;
        best_phi = phi;
      }
    }
    CHECK(std::abs(std::abs(best_phi) - theta) < 2e-3);
  }
}

TEST_CASE("principal value integration") {
  // odd symmetry
  cplx v0 = pv_integrate(cplx(-1.0), cplx(1.0), [](cplx z) { return 1.0 / z; }, cplx(0.0));
  CHECK(std::abs(v0) < 1e-10);
  // log ratio
  cplx v1 =
      pv_integrate(cplx(-1.0), cplx(1.0), [](cplx z) { return 1.0 / (z - 0.2); }, cplx(0.2));
  CHECK(std::abs(v1 - std::log(0.8 / 1.2)) < 1e-9);
  // regular integrand agrees with plain quadrature
  cplx v2 = pv_integrate(cplx(0.0), cplx(2.0), [](cplx z) { return std::exp(z); }, cplx(1.0));
  CHECK(std::abs(v2 - (std::exp(2.0) - 1.0)) < 1e-9);
}

TEST_CASE("wedge refinement layout is mirror symmetric") {
  auto b = panel_boundaries(8.0, 2.0, 10);
  // boundaries contain mirrored pairs around 2.0
  for (double d : {1.0, 0.5, 0.25}) {
    bool hasl = false, hasr = false;
    for (double x : b) {
      if (std::abs(x - (2.0 - d)) < 1e-12) hasl = true;
      if (std::abs(x - (2.0 + d)) < 1e-12) hasr = true;
    }
    CHECK(hasl);
    CHECK(hasr);
  }
  // wedge contour integrates an entire function consistently at two
  // refinement settings
  Contour a = wedge_contour(1.0, true, 10.0, 16);
  Contour c = wedge_contour(1.0, true, 10.0, 16, 2.0, 12);
  cplx ia = a.integrate([](cplx z) { return std::exp(-z * z * z / 3.0); });
  cplx ic = c.integrate([](cplx z) { return std::exp(-z * z * z / 3.0); });
  CHECK(std::abs(ia - ic) < 1e-10);
}

TEST_CASE("contour json export") {
  Contour c = Contour::circle(cplx(1.0, 0.0), 0.5, 64);
  std::string j = c.to_json();
  CHECK(j.find("\"arc\"") != std::string::npos);
  CHECK(j.find("\"closed\":true") != std::string::npos);
}
