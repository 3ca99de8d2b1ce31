#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "espike/linalg.hpp"
#include "espike/rng.hpp"
#include "espike/specfun.hpp"

using namespace espike;

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

TEST_CASE("bessel i0 values") {
  CHECK(bessel_i0(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_i0(2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-12));
  // asymptotic normalization: I0(x) sqrt(2 pi x) e^{-x} -> 1
  for (double x : {40.0, 80.0, 200.0}) {
    double v = bessel_i0(x) * std::sqrt(kTwoPi * x) * std::exp(-x);
    CHECK(std::abs(v - 1.0) < 2.0 / x);
  }
  // evenness, and the asymptotic branch against the raw series at x = 31
  CHECK(bessel_i0(-3.0) == doctest::Approx(bessel_i0(3.0)).epsilon(1e-14));
  {
    double q = 0.25 * 31.0 * 31.0, term = 1.0, series = 1.0;
    for (int k = 1; k < 300; ++k) {
      term *= q / double(k) / double(k);
      series += term;
      if (term < 1e-18 * series) break;
    }
    CHECK(bessel_i0(31.0) == doctest::Approx(series).epsilon(1e-12));
  }
}

TEST_CASE("kummer M(1/2,1,2v)") {
  CHECK(kummer_m_half(0.0) == doctest::Approx(1.0));
  // identity M(1/2,1,2v) = e^v I0(v)
  CHECK(kummer_m_half(1.0) ==
        doctest::Approx(std::exp(1.0) * bessel_i0(1.0)).epsilon(1e-12));
  for (double v = 0.5; v <= 50.0; v += 3.7) {
    double lhs = kummer_m_half(v);
    double rhs = std::exp(v) * bessel_i0(v);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
  }
  // large-v leading order e^{2v}/sqrt(2 pi v)
  double v = 20.0;
  double lead = std::exp(2.0 * v) / std::sqrt(kTwoPi * v);
  CHECK(std::abs(kummer_m_half(v) / lead - 1.0) <= 0.06);
}

TEST_CASE("g function: boundary and dual representation") {
  // g(z, 0) = -z
  CHECK(std::abs(g_fun(cplx(0.7, 0.3), 0.0) - cplx(-0.7, -0.3)) < 1e-15);
  // integral vs contour representation, specified grid
  for (cplx z : {cplx(0.2, 0.0), cplx(0.5, 0.5), cplx(2.0, 0.0), cplx(1.0, 2.0)}) {
    for (double v : {0.5, 2.0, 10.0}) {
      cplx a = g_fun(z, v);
      cplx b = g_fun_contour(z, v);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
    }
  }
  // spec example: radius-0.4 circle at z = 0.3, v = 2
  cplx c = g_fun_contour(cplx(0.3, 0.0), 2.0, 0.4);
  CHECK(std::abs(g_fun(cplx(0.3, 0.0), 2.0) - c) <= 1e-9 * std::abs(c));
}

TEST_CASE("g function: large-v asymptotic branches") {
  double v = 40.0;
  for (cplx z : {cplx(1.7, 0.2), cplx(0.4, 0.1), cplx(2.5, 0.0), cplx(-0.3, 0.0)}) {
    GFunAsympt a = GFunAsympt::classify(z);
    cplx lead = a.leading(z, v);
    cplx full = g_fun(z, v);
    CHECK(std::abs(full - lead) <= 2.5 / v * std::abs(full));
  }
  // spec example regime at v = 30, Re z > 1: relative tail error <= 0.1
  double v2 = 30.0;
  cplx z{1.6, 0.0};
  cplx lead = GFunAsympt::classify(z).leading(z, v2);
  CHECK(std::abs(g_fun(z, v2) - lead) <= 0.1 * std::abs(g_fun(z, v2)));
}

TEST_CASE("antisymmetric weight: contour vs 2D quadrature") {
  CHECK(weight_e(1.3, 1.3) == 0.0);
  double a = weight_e(1.0, 2.0);
  double b = weight_e_quad_oracle(1.0, 2.0);
  CHECK(std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(b)));
  CHECK(weight_e(2.0, 1.0) == doctest::Approx(-a).epsilon(1e-12));
  // antisymmetry exactly as computed
  for (auto [u, v] : {std::pair{0.3, 2.7}, {4.0, 0.1}, {1.0, 1.5}}) {
    CHECK(std::abs(weight_e(u, v) + weight_e(v, u)) <= 1e-12);
  }
  double c = weight_e(0.4, 3.1);
  double d = weight_e_quad_oracle(0.4, 3.1);
  CHECK(std::abs(c - d) <= 1e-7 * std::max(1.0, std::abs(d)));
}

TEST_CASE("gaussian pair integral") {
  CHECK(std::abs(gauss_pair_integral(cplx(0.2), cplx(0.2))) == 0.0);
  // alpha = 0.25, beta = 0: pi / (0.75 sqrt(0.5))
  double expect = 3.14159265358979324 / (0.75 * std::sqrt(0.5));
  CHECK(std::real(gauss_pair_integral(cplx(0.25), cplx(0.0))) ==
        doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(5.92384).epsilon(1e-5));
  cplx v1 = gauss_pair_integral(cplx(0.1, 0.05), cplx(-0.3, 0.0));
  cplx v2 = gauss_pair_integral(cplx(-0.3, 0.0), cplx(0.1, 0.05));
  CHECK(std::abs(v1 + v2) < 1e-14);
  CHECK_THROWS_AS(gauss_pair_integral(cplx(0.6), cplx(0.0)), PreconditionError);
  // closed form vs 2D quadrature for 20 random points with Re < 0.4
  RngStream rng(7, 0);
  for (int i = 0; i < 20; ++i) {
    double al = 0.8 * rng.uniform() - 0.4;
    double be = 0.8 * rng.uniform() - 0.4;
    double cf = std::real(gauss_pair_integral(cplx(al), cplx(be)));
    double quad = gauss_pair_integral_quad(al, be);
    CHECK(std::abs(cf - quad) <= 1e-7);
  }
}

TEST_CASE("pfaffian border blocks g_a and alpha_ab") {
  const double em = 1.0;
  CHECK(alpha_ab_value(2, 2, em) == 0.0);
  // g_1(0) = 0: both Bessel arguments vanish
  CHECK(std::abs(g_a_value(1, 0.0, em)) < 1e-10);
  // alpha_{1,2} with eta_- = 1 vs 2D quadrature
  double a12 = alpha_ab_value(1, 2, em);
  double a12q = alpha_ab_quad_oracle(1, 2, em);
  CHECK(std::abs(a12 - a12q) <= 1e-7 * std::max(1.0, std::abs(a12q)));
  CHECK(alpha_ab_value(2, 1, em) == doctest::Approx(-a12).epsilon(1e-10));
  for (int a = 1; a <= 2; ++a) {
    for (double u : {0.3, 1.0, 2.5}) {
      double g = g_a_value(a, u, 0.6666666666666666);
      double gq = g_a_quad_oracle(a, u, 0.6666666666666666);
      CHECK(std::abs(g - gq) <= 1e-7 * std::max(1.0, std::abs(gq)));
    }
  }
  auto [g1, a13] = g_a_alpha(1, 3, 1.0, em);
  CHECK(g1 == doctest::Approx(g_a_value(1, 1.0, em)));
  CHECK(a13 == doctest::Approx(alpha_ab_value(1, 3, em)));
}
