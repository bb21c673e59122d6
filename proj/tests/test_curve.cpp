#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "koszul/curve.hpp"
#include "koszul/dense.hpp"

using namespace koszul;

namespace {

CurveModel fermat_quartic(std::uint32_t p) {
  return make_plane_curve(PrimeField(p), 4, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}});
}

// Sylvester matrix of f and f' has full rank iff their resultant is nonzero.
bool resultant_nonzero(const Poly& f, const PrimeField& field) {
  Poly df = poly::derivative(f, field);
  const int m = poly::degree(f), n = poly::degree(df);
  Matrix s(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) s(i, i + k) = f[m - k];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) s(n + i, i + k) = df[n - k];
  return dense_rank(s, field) == static_cast<std::size_t>(m + n);
}

}  // namespace

TEST_CASE("hyperelliptic construction") {
  PrimeField f(10007);
  auto c = make_hyperelliptic(f, 2, Poly{1, 0, 0, 0, 0, 1});
  CHECK(c.genus() == 2);
  CHECK(c.gonality() == 2);
  CHECK(c.canonical_multiple() == 2);
  CHECK_THROWS_AS(make_hyperelliptic(f, 2, Poly{0, 0, 0, 0, 1, 1}), NotSquarefree);
  CHECK_THROWS_AS(make_hyperelliptic(f, 2, Poly{1, 0, 0, 1}), InvalidArgument);

  auto g4 = make_hyperelliptic(f, 4, std::uint64_t{1});
  CHECK(poly::degree(g4.hyperelliptic_f()) == 9);
  CHECK(g4.hyperelliptic_f().back() == 1);
  CHECK(resultant_nonzero(g4.hyperelliptic_f(), f));
  CHECK(g4.seed() == std::uint64_t{1});
}

TEST_CASE("plane curve construction") {
  auto c = fermat_quartic(10007);
  CHECK(c.genus() == 3);
  CHECK(c.gonality() == 3);
  CHECK(c.canonical_multiple() == 1);
  CHECK(c.audit().points_checked > 1000);
  CHECK_THROWS_AS(make_plane_curve(PrimeField(10007), 4, {{{4, 0, 0}, 1}}), SingularPoint);
  CHECK_THROWS_AS(make_plane_curve(PrimeField(10007), 3, {{{3, 0, 0}, 1}}), InvalidArgument);

  auto quintic = make_plane_curve(PrimeField(10007), 5, std::uint64_t{7});
  CHECK(quintic.genus() == 6);
  CHECK(quintic.gonality() == 4);
  CHECK(quintic.audit().points_checked > 0);
}

TEST_CASE("point enumeration against brute force mod 7") {
  PrimeField f(7);
  auto c = make_hyperelliptic(f, 2, Poly{1, 0, 0, 0, 0, 1});
  std::vector<PointOnCurve> brute;
  for (std::uint32_t x = 0; x < 7; ++x)
    for (std::uint32_t y = 0; y < 7; ++y)
      if ((y * y) % 7 == (x * x * x * x * x + 1) % 7) brute.push_back({{x, y, 1}, y == 0});
  auto pts = enumerate_points(c, 1000);
  CHECK(pts.shortfall);
  REQUIRE(pts.points.size() == brute.size());
  for (std::size_t i = 0; i < brute.size(); ++i) {
    CHECK(pts.points[i] == brute[i]);
    CHECK(pts.points[i].ramified == brute[i].ramified);
  }
  CHECK(pts.points[0] == PointOnCurve{{0, 1, 1}});
  CHECK(pts.points[1] == PointOnCurve{{0, 6, 1}});
  CHECK(pts.points[2] == PointOnCurve{{1, 3, 1}});
  CHECK(pts.points[3] == PointOnCurve{{1, 4, 1}});
  CHECK(enumerate_points(c, 0).points.empty());
  auto two = enumerate_points(c, 2);
  CHECK(two.points.size() == 2);
  CHECK_FALSE(two.shortfall);
}

TEST_CASE("Fermat quartic mod 7 against brute force") {
  auto c = fermat_quartic(7);
  auto pts = enumerate_points(c, 1000).points;
  std::vector<PointOnCurve> brute;
  auto p4 = [](std::uint32_t v) { return (v * v % 7) * (v * v % 7) % 7; };
  for (std::uint32_t x = 0; x < 7; ++x)
    for (std::uint32_t y = 0; y < 7; ++y)
      if ((p4(x) + p4(y) + 1) % 7 == 0) brute.push_back({{x, y, 1}});
  for (std::uint32_t x = 0; x < 7; ++x)
    if ((p4(x) + 1) % 7 == 0) brute.push_back({{x, 1, 0}});
  REQUIRE(pts.size() == brute.size());
  for (std::size_t i = 0; i < brute.size(); ++i) CHECK(pts[i] == brute[i]);
  for (const auto& pt : pts) CHECK(pt.x() != 0);
}

TEST_CASE("enumeration is deterministic and exact") {
  auto c = make_plane_curve(PrimeField(10007), 5, std::uint64_t{7});
  auto a = enumerate_points(c, 300).points;
  auto b = enumerate_points(c, 300).points;
  CHECK(a == b);
  for (const auto& pt : a) CHECK(c.contains(pt));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1] < a[i]);
}

TEST_CASE("local expansions at ordinary and Weierstrass points") {
  PrimeField f(10007);
  auto c = make_hyperelliptic(f, 2, Poly{1, 0, 0, 0, 0, 1});
  auto e = local_expansion(c, PointOnCurve{{0, 1, 1}}, 3);
  CHECK(e.parameter == 0);
  CHECK(e.u == Series{0, 1, 0, 0});
  CHECK(e.v == Series{1, 0, 0, 0});
  CHECK(series::valuation(equation_residual(c, e)) >= 4);

  auto w = local_expansion(c, PointOnCurve{{10006, 0, 1}, true}, 3);
  CHECK(w.parameter == 1);
  CHECK(w.v == Series{0, 1, 0, 0});
  CHECK(w.u == Series{10006, 0, f.inv(Fp{5}).value, 0});
  CHECK(series::valuation(equation_residual(c, w)) >= 4);

  auto z = local_expansion(c, PointOnCurve{{0, 1, 1}}, 0);
  CHECK(z.u == Series{0});
  CHECK(z.v == Series{1});

  CHECK_THROWS_AS(local_expansion(c, PointOnCurve{{0, 1, 1}}, 9), InvalidArgument);
  CHECK_THROWS_AS(local_expansion(c, PointOnCurve{{0, 2, 1}}, 2), InvalidArgument);
}

TEST_CASE("expansions satisfy the equation on random points") {
  std::vector<CurveModel> curves{make_hyperelliptic(PrimeField(10007), 2, Poly{1, 0, 0, 0, 0, 1}),
                                 make_hyperelliptic(PrimeField(10007), 4, std::uint64_t{1}),
                                 fermat_quartic(10007), make_plane_curve(PrimeField(10007), 5, std::uint64_t{7})};
  std::mt19937_64 rng(11);
  for (const auto& c : curves) {
    auto pts = enumerate_points(c, 400).points;
    // include every Weierstrass point of the hyperelliptic models
    if (c.kind() == CurveKind::hyperelliptic)
      for (auto [r, m] : poly::roots(c.hyperelliptic_f(), c.field())) pts.push_back({{r, 0, 1}, true});
    for (int i = 0; i < 100; ++i) {
      const auto& pt = pts[uniform_below(rng, pts.size())];
      const std::size_t order = uniform_below(rng, 9);
      auto e = local_expansion(c, pt, order);
      REQUIRE(series::valuation(equation_residual(c, e)) == order + 1);
    }
  }
}

TEST_CASE("expansions at points on the line at infinity") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto c = make_plane_curve(PrimeField(10007), 4, seed);
    for (const auto& pt : enumerate_points(c, 20000).points) {
      if (!pt.at_infinity()) continue;
      auto e = local_expansion(c, pt, 5);
      CHECK(e.chart != 2);
      CHECK(series::valuation(equation_residual(c, e)) == 6);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("pencil certificates") {
  PrimeField f(10007);
  auto g2 = make_hyperelliptic(f, 2, Poly{1, 0, 0, 0, 0, 1});
  auto cert = pencil_certificate(g2);
  CHECK(cert.k == 2);
  CHECK(cert.fibers.size() >= 20);
  bool saw_weierstrass = false;
  for (const auto& fib : cert.fibers) {
    CHECK(fib.total_degree == 2);
    CHECK(fib.rational_degree == 2);
    if (fib.description == "x = 10006") saw_weierstrass = true;
  }
  CHECK(saw_weierstrass);

  auto quartic = fermat_quartic(10007);
  auto qc = pencil_certificate(quartic);
  CHECK(qc.k == 3);
  CHECK(qc.fibers.size() >= 20);
  for (const auto& fib : qc.fibers) {
    CHECK(fib.total_degree == 3);
    if (fib.split) CHECK(fib.rational_degree == 3);
  }
}
