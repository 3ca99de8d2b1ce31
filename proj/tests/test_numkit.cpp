#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "espike/linalg.hpp"
#include "espike/pfaffian.hpp"
#include "espike/quadrature.hpp"
#include "espike/rng.hpp"

using namespace espike;

namespace {

// characteristic polynomial coefficients by the Faddeev-LeVerrier recursion
std::vector<cplx> char_poly(const ComplexMatrix& a) {
  const int n = a.rows();
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  ComplexMatrix prod = a;
  for (int k = 1; k <= n; ++k) {
    cplx tr = 0.0;
    for (int i = 0; i < n; ++i) tr += prod(i, i);
    c[k] = -tr / double(k);
    if (k == n) break;
    for (int i = 0; i < n; ++i) prod(i, i) += c[k];
    prod = a * prod;
  }
  return c;  // p(x) = sum c[k] x^{n-k}
}

// Durand-Kerner simultaneous root iteration (independent of the eigensolver)
std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<cplx> r(n);
  for (int i = 0; i < n; ++i) r[i] = std::pow(cplx(0.4, 0.9), i);
  auto eval = [&](cplx x) {
    cplx v = c[0];
    for (int k = 1; k <= n; ++k) v = v * x + c[k];
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= (r[i] - r[j]);
      cplx step = eval(r[i]) / den;
      r[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14) break;
  }
  return r;
}

ComplexMatrix random_hermitian(int n, RngStream& rng) {
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = rng.gaussian();
    for (int j = i + 1; j < n; ++j) {
      cplx v{rng.gaussian(), rng.gaussian()};
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

ComplexMatrix random_skew(int n, RngStream& rng, bool complex_entries) {
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      cplx v = complex_entries ? cplx(rng.gaussian(), rng.gaussian()) : cplx(rng.gaussian());
      a(i, j) = v;
      a(j, i) = -v;
    }
  return a;
}

ComplexMatrix random_unitary(int n, RngStream& rng) {
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian_complex();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (int i = 0; i < n; ++i) dot += std::conj(a(i, k)) * a(i, j);
      for (int i = 0; i < n; ++i) a(i, j) -= dot * a(i, k);
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += std::norm(a(i, j));
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) a(i, j) /= nrm;
  }
  return a;
}

}  // namespace

TEST_CASE("rng determinism and moments") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42, 8);
  CHECK(c.next_u64() != RngStream(42, 7).next_u64());
  RngStream g(5, 0);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double v = g.gaussian();
    s += v;
    s2 += v * v;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("gauss-legendre basics") {
  QuadRule q = gauss_legendre_rule(2, -1.0, 1.0);
  CHECK(std::abs(q.nodes[1] - 1.0 / std::sqrt(3.0)) < 1e-14);
  CHECK(std::abs(q.weights[0] - 1.0) < 1e-14);
  QuadRule q64 = gauss_legendre_rule(64, 0.25, 2.5);
  cplx sw = 0.0;
  for (auto w : q64.weights) sw += w;
  CHECK(std::abs(sw - 2.25) < 1e-13);
  QuadRule q2 = gauss_legendre_rule(2, 0.0, 1.0);
  cplx v = q2.integrate([](cplx x) { return x * x * x; });
  CHECK(std::abs(v - 0.25) < 1e-15);
  QuadRule q8 = gauss_legendre_rule(8, 0.0, 1.0);
  cplx v15 = q8.integrate([](cplx x) { return std::pow(x, 15); });
  CHECK(std::abs(v15 - 1.0 / 16.0) < 1e-13);
}

TEST_CASE("closed trapezoid circle rule") {
  QuadRule q = trapezoid_circle(256, cplx(0.5, 0.0), 1.0);
  cplx r = q.integrate([](cplx z) { return 1.0 / (z - 0.5); });
  CHECK(std::abs(r - cplx(0.0, 2.0 * 3.14159265358979324)) < 1e-12);
  QuadRule qc = trapezoid_circle(64, cplx(0.0), 2.0);
  for (int k = 0; k < 4; ++k) {
    cplx expect = cplx(0.0, 2.0 * 3.14159265358979324 / 64.0) * qc.nodes[k];
    CHECK(std::abs(qc.weights[k] - expect) < 1e-14);
  }
}

TEST_CASE("gauss-hermite rule") {
  QuadRule q = gauss_hermite_rule(48);
  cplx m0 = q.integrate([](cplx) { return cplx(1.0); });
  CHECK(std::abs(m0 - std::sqrt(3.14159265358979324)) < 1e-12);
  cplx m2 = q.integrate([](cplx x) { return x * x; });
  CHECK(std::abs(m2 - 0.5 * std::sqrt(3.14159265358979324)) < 1e-12);
}

TEST_CASE("hermitian eigenvalues: diagonal and pauli") {
  ComplexMatrix d(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  auto ev = hermitian_eigenvalues(d);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-14));
  ComplexMatrix px(2, 2);
  px(0, 1) = 1.0;
  px(1, 0) = 1.0;
  auto ev2 = hermitian_eigenvalues(px);
  CHECK(ev2[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ev2[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermitian eigenvalues vs characteristic-polynomial roots") {
  RngStream rng(11, 0);
  ComplexMatrix a = random_hermitian(6, rng);
  auto ev = hermitian_eigenvalues(a);
  auto roots = poly_roots(char_poly(a));
  std::vector<double> rr;
  for (auto r : roots) rr.push_back(std::real(r));
  std::sort(rr.begin(), rr.end());
  for (int i = 0; i < 6; ++i) CHECK(std::abs(ev[i] - rr[i]) < 1e-9);
}

TEST_CASE("hermitian eigenvalues: residual and unitary invariance") {
  RngStream rng(13, 0);
  ComplexMatrix a = random_hermitian(8, rng);
  ComplexMatrix vecs;
  auto ev = hermitian_eigenvalues(a, &vecs);
  double norm = a.frobenius_norm();
  for (int k = 0; k < 8; ++k) {
    double resid = 0.0;
    for (int i = 0; i < 8; ++i) {
      cplx av = 0.0;
      for (int j = 0; j < 8; ++j) av += a(i, j) * vecs(j, k);
      resid += std::norm(av - ev[k] * vecs(i, k));
    }
    CHECK(std::sqrt(resid) <= 1e-10 * norm);
  }
  ComplexMatrix u = random_unitary(8, rng);
  ComplexMatrix b = u * a * u.adjoint();
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) {
      cplx v = 0.5 * (b(i, j) + std::conj(b(j, i)));
      b(i, j) = v;
      b(j, i) = std::conj(v);
    }
  auto ev2 = hermitian_eigenvalues(b);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(ev[i] - ev2[i]) < 1e-9);
}

TEST_CASE("hermitian eigenvalues rejects non-hermitian input") {
  ComplexMatrix a(2, 2);
  a(0, 1) = cplx(1.0, 0.5);
  a(1, 0) = cplx(1.0, 0.5);  // not the conjugate
  CHECK_THROWS_AS(hermitian_eigenvalues(a), PreconditionError);
}

TEST_CASE("pfaffian: closed forms and sign convention") {
  ComplexMatrix a(2, 2);
  a(0, 1) = cplx(3.0, -1.0);
  a(1, 0) = -a(0, 1);
  CHECK(std::abs(pfaffian(a) - cplx(3.0, -1.0)) < 1e-14);
  ComplexMatrix j2(2, 2);
  j2(0, 1) = 1.0;
  j2(1, 0) = -1.0;
  CHECK(std::abs(pfaffian(j2) - cplx(1.0)) < 1e-15);
  RngStream rng(3, 0);
  ComplexMatrix b = random_skew(4, rng, true);
  cplx expect = b(0, 1) * b(2, 3) - b(0, 2) * b(1, 3) + b(0, 3) * b(1, 2);
  CHECK(std::abs(pfaffian(b) - expect) < 1e-12 * std::abs(expect));
  CHECK_THROWS_AS(pfaffian(random_skew(3, rng, false)), PreconditionError);
}

TEST_CASE("pfaffian squared equals determinant, orders 2..12") {
  RngStream rng(17, 0);
  for (int n = 2; n <= 12; n += 2) {
    for (int rep = 0; rep < 3; ++rep) {
      ComplexMatrix s = random_skew(n, rng, rep % 2 == 0);
      cplx pf = pfaffian(s);
      cplx det = determinant(s);
      CHECK(std::abs(pf * pf - det) <= 1e-8 * std::abs(det));
    }
  }
}

TEST_CASE("skew matrix type") {
  SkewMatrix s(4);
  s.upper(0, 1) = 2.0;
  s.upper(2, 3) = 5.0;
  CHECK(s.at(1, 0) == cplx(-2.0));
  CHECK(std::abs(pfaffian(s) - cplx(10.0)) < 1e-14);
  CHECK_THROWS_AS(SkewMatrix(5), PreconditionError);
}

TEST_CASE("schur pfaffian identity") {
  // (1-2)/(1+2); magnitude (2-1)^2/(4-1) = 1/3
  CHECK(schur_pfaffian_lhs({1.0, 2.0}) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(schur_pfaffian_lhs({1.0, 1.0, 2.0, 3.0}) == doctest::Approx(0.0));
  RngStream rng(23, 0);
  for (int m : {2, 4, 6}) {
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = 0.4 + 0.8 * i + 0.5 * rng.uniform();
    double lhs = schur_pfaffian_lhs(x);
    ComplexMatrix p(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        p(i, j) = (i == j) ? 0.0 : (x[i] - x[j]) / (x[i] + x[j]);
    cplx rhs = pfaffian(p);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
  }
  CHECK_THROWS_AS(schur_pfaffian_lhs({1.0, -1.0}), PreconditionError);
}

TEST_CASE("discrete pfaffian integration identity") {
  {
    std::vector<std::function<cplx(double)>> phi = {
        [](double) { return cplx(1.0); }, [](double x) { return cplx(x); }};
    auto eps = [](double x, double y) { return cplx(x - y); };
    auto [lhs, rhs] = de_bruijn_check(2, {0.0, 1.0}, {1.0, 1.0}, phi, eps);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
  {
    std::vector<std::function<cplx(double)>> phi = {
        [](double) { return cplx(1.0); }, [](double x) { return cplx(x); }};
    auto eps = [](double, double) { return cplx(0.0); };
    auto [lhs, rhs] = de_bruijn_check(2, {0.0, 1.0}, {1.0, 1.0}, phi, eps);
    CHECK(std::abs(lhs) == 0.0);
    CHECK(std::abs(rhs) == 0.0);
  }
  {
    RngStream rng(31, 0);
    std::vector<double> sup(5), wts(5);
    for (int i = 0; i < 5; ++i) {
      sup[i] = i + 0.3 * rng.uniform();
      wts[i] = 0.5 + rng.uniform();
    }
    std::vector<std::vector<double>> table(4, std::vector<double>(5));
    for (auto& row : table)
      for (auto& v : row) v = rng.gaussian();
    std::vector<std::function<cplx(double)>> phi;
    for (int f = 0; f < 4; ++f)
      phi.push_back([&sup, &table, f](double x) {
        for (int i = 0; i < 5; ++i)
          if (x == sup[i]) return cplx(table[f][i]);
        return cplx(0.0);
      });
    auto eps = [](double x, double y) { return cplx(std::sin(x - y)); };
    auto [lhs, rhs] = de_bruijn_check(4, sup, wts, phi, eps);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
  std::vector<std::function<cplx(double)>> phi1 = {[](double) { return cplx(1.0); }};
  CHECK_THROWS_AS(de_bruijn_check(1, {0.0}, {1.0}, phi1,
                                  [](double, double) { return cplx(0.0); }),
                  PreconditionError);
}

TEST_CASE("semi-infinite mapped rule") {
  QuadRule q = semi_infinite_rule(96, 2.0);
  cplx v = q.integrate([](cplx t) { return std::exp(-t); });
  CHECK(std::abs(v - 1.0) < 1e-10);
}
