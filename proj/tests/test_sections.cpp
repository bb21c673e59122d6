#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "koszul/errors.hpp"
#include "koszul/sections.hpp"

using namespace koszul;

namespace {

using CurvePtr = std::shared_ptr<const CurveModel>;
using SamplePtr = std::shared_ptr<const SampleSet>;

CurvePtr genus2() {
  return std::make_shared<const CurveModel>(make_hyperelliptic(PrimeField(10007), 2, Poly{1, 0, 0, 0, 0, 1}));
}

CurvePtr quartic() {
  return std::make_shared<const CurveModel>(
      make_plane_curve(PrimeField(10007), 4, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}}));
}

SamplePtr sample(const CurvePtr& c, int guard, std::vector<PointOnCurve> excluded = {}) {
  return std::make_shared<const SampleSet>(choose_sample(*c, guard, 1, excluded));
}

DivisorSpec minus_points(int base, const std::vector<PointOnCurve>& pts, int mult = 1) {
  DivisorSpec d{base, {}};
  for (const auto& p : pts) d.subtracted.push_back({p, mult});
  return d.normalized();
}

// Column spaces agree iff stacking them adds no rank.
bool same_column_space(const Matrix& a, const Matrix& b, const PrimeField& f) {
  if (a.rows() != b.rows()) return false;
  Matrix both(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) both(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) both(i, a.cols() + j) = b(i, j);
  }
  const auto r = dense_rank(both, f);
  return r == dense_rank(a, f) && r == dense_rank(b, f);
}

std::vector<PointOnCurve> affine_points(const CurveModel& c, std::size_t count) {
  std::vector<PointOnCurve> out;
  for (const auto& p : enumerate_points(c, 4 * count).points)
    if (!p.at_infinity() && !p.ramified && out.size() < count) out.push_back(p);
  return out;
}

}  // namespace

TEST_CASE("sample sets") {
  auto c = genus2();
  const auto pts = affine_points(*c, 4);
  auto s = choose_sample(*c, 60, 3, pts);
  CHECK(s.size() == 61);
  for (const auto& p : s.points) {
    CHECK_FALSE(p.at_infinity());
    for (const auto& e : pts) CHECK(p.x() != e.x());
  }
  CHECK(choose_sample(*c, 60, 3, pts).points == s.points);
  CHECK(choose_sample(*c, 0, 3).size() == 1);

  auto tiny = make_hyperelliptic(PrimeField(7), 2, Poly{1, 0, 0, 0, 0, 1});
  try {
    choose_sample(tiny, 60, 1);
    FAIL("expected Shortfall");
  } catch (const Shortfall& e) {
    CHECK(e.required == 61);
    CHECK(e.available < 15);
  }
}

TEST_CASE("Riemann-Roch spaces on the genus 2 curve") {
  auto c = genus2();
  auto s = sample(c, 20);
  auto l5 = riemann_roch_space(c, DivisorSpec::multiple(5), s);
  CHECK(l5.dim() == 4);
  CHECK(l5.generators() == std::vector<Monomial>{{{0, 0, 0}}, {{1, 0, 0}}, {{2, 0, 0}}, {{0, 1, 0}}});
  CHECK(l5.coefficients() == Matrix::identity(4));
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(2), s).dim() == 2);
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(0), s).dim() == 1);
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(-1), s).dim() == 0);
  CHECK_THROWS_AS(riemann_roch_space(c, DivisorSpec::multiple(21), s), GuardViolation);
}

TEST_CASE("jet constraints at conjugate and Weierstrass points") {
  auto c = genus2();
  const auto& f = c->field();
  auto pts = affine_points(*c, 6);
  // (x0, y0) and (x0, -y0) are consecutive in the enumeration
  REQUIRE(pts[0].x() == pts[1].x());
  const PointOnCurve w{{f.neg(Fp{1}).value, 0, 1}, true};
  std::vector<PointOnCurve> excl = pts;
  excl.push_back(w);
  auto s = sample(c, 12, excl);
  // K - P - iota(P): only x - x0 survives
  CHECK(riemann_roch_space(c, minus_points(2, {pts[0], pts[1]}), s).dim() == 1);
  // K - P - Q off a fiber: nothing survives
  CHECK(riemann_roch_space(c, minus_points(2, {pts[0], pts[2]}), s).dim() == 0);
  // K = 2W for a Weierstrass point W
  CHECK(riemann_roch_space(c, minus_points(2, {w}, 2), s).dim() == 1);
  CHECK(riemann_roch_space(c, minus_points(2, {w}, 3), s).dim() == 0);
  // nonspecial: every subtraction drops one
  for (int k = 0; k <= 5; ++k) {
    std::vector<PointOnCurve> sub(pts.begin(), pts.begin() + k);
    CHECK(riemann_roch_space(c, minus_points(12, sub), s).dim() == static_cast<std::size_t>(11 - k));
  }
  CHECK(riemann_roch_space(c, minus_points(12, {w}, 4), s).dim() == 7);

  auto bad = sample(c, 12);
  CHECK_THROWS_AS(riemann_roch_space(c, minus_points(5, {bad->points[0]}), bad), GuardViolation);
  DivisorSpec added{5, {{pts[0], -1}}};
  CHECK_THROWS_AS(riemann_roch_space(c, added, s), NotRepresentable);
}

TEST_CASE("plane quartic spaces") {
  auto c = quartic();
  auto pts = affine_points(*c, 3);
  auto s = sample(c, 40, pts);
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(2), s).dim() == 6);
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(3), s).dim() == 10);
  CHECK(riemann_roch_space(c, DivisorSpec::multiple(4), s).dim() == 14);
  CHECK(riemann_roch_space(c, minus_points(3, pts), s).dim() == 7);
  CHECK(riemann_roch_space(c, minus_points(1, {pts[0]}), s).dim() == 2);

  // a point on the line at infinity of a seeded quartic
  auto q = std::make_shared<const CurveModel>(make_plane_curve(PrimeField(10007), 4, std::uint64_t{2}));
  std::optional<PointOnCurve> inf;
  for (const auto& p : enumerate_points(*q, 20000).points)
    if (p.at_infinity()) inf = p;
  REQUIRE(inf.has_value());
  auto sq = sample(q, 12);
  CHECK(riemann_roch_space(q, minus_points(1, {*inf}), sq).dim() == 2);
  CHECK(riemann_roch_space(q, minus_points(2, {*inf}, 3), sq).dim() == 3);
}

TEST_CASE("multiplication") {
  auto c = genus2();
  auto s = sample(c, 30);
  auto l5 = riemann_roch_space(c, DivisorSpec::multiple(5), s);
  auto l10 = multiply(l5, l5);
  CHECK(l10.dim() == 9);
  CHECK(l10.divisor() == DivisorSpec::multiple(10));

  auto one = riemann_roch_space(c, DivisorSpec::multiple(0), s);
  auto same = multiply(l5, one);
  CHECK(same.dim() == l5.dim());
  CHECK(same_column_space(same.evaluation(), l5.evaluation(), c->field()));

  // monomial bases give one-term products except y * y
  auto table = product_table(l5, l5, l10);
  CHECK(table.size() == 16);
  CHECK(table[1 * 4 + 2].size() == 1);  // x * x^2 = x^3
  CHECK(table[3 * 4 + 3].size() == 2);  // y^2 = x^5 + 1

  auto q = quartic();
  auto sq = sample(q, 16);
  auto o2 = riemann_roch_space(q, DivisorSpec::multiple(2), sq);
  auto o1 = riemann_roch_space(q, DivisorSpec::multiple(1), sq);
  CHECK(multiply(o2, o1).dim() == 10);

  // target too small for the product
  auto o3 = riemann_roch_space(q, DivisorSpec::multiple(3), sq);
  auto o2b = riemann_roch_space(q, DivisorSpec::multiple(2), sq);
  CHECK_THROWS_AS(product_table(o2, o2b, o3), GuardViolation);
}

TEST_CASE("multiplication is commutative and associative on column spaces") {
  auto c = genus2();
  auto pts = affine_points(*c, 3);
  auto s = sample(c, 30, pts);
  auto a = riemann_roch_space(c, minus_points(5, {pts[0]}), s);
  auto b = riemann_roch_space(c, DivisorSpec::multiple(3), s);
  auto d = riemann_roch_space(c, minus_points(6, {pts[1]}), s);
  CHECK(same_column_space(multiply(a, b).evaluation(), multiply(b, a).evaluation(), c->field()));
  CHECK(same_column_space(multiply(multiply(a, b), d).evaluation(), multiply(a, multiply(b, d)).evaluation(),
                          c->field()));
}

TEST_CASE("h0 and h1") {
  auto c = genus2();
  CHECK(h0_h1(c, DivisorSpec::multiple(5)) == CohomologyDims{4, 0, true});
  CHECK(h0_h1(c, DivisorSpec::canonical(*c)) == CohomologyDims{2, 1, true});
  CHECK(h0_h1(quartic(), DivisorSpec::multiple(1)) == CohomologyDims{3, 1, true});
  CHECK(h0_h1(quartic(), DivisorSpec::multiple(0)) == CohomologyDims{1, 3, true});

  auto pts = affine_points(*c, 2);
  // 5*inf + P: only its Serre dual -3*inf - P has a section space
  auto dims = h0_h1(c, DivisorSpec{5, {{pts[0], -1}}});
  CHECK(dims.h0 == 5);
  CHECK(dims.h1 == 0);
  CHECK_FALSE(dims.serre_checked);
  CHECK_THROWS_AS(h0_h1(c, DivisorSpec{1, {{pts[0], -1}, {pts[1], 1}}}), NotComputable);
}

TEST_CASE("space invariants on random divisors") {
  std::vector<CurvePtr> curves{genus2(), quartic(),
                               std::make_shared<const CurveModel>(make_hyperelliptic(PrimeField(10007), 4, std::uint64_t{1}))};
  std::mt19937_64 rng(21);
  for (const auto& c : curves) {
    const auto& f = c->field();
    const int g = c->genus();
    auto pool = affine_points(*c, 8);
    const int max_base = c->kind() == CurveKind::hyperelliptic ? 4 * g + 2 : 4;
    auto s = sample(c, max_base * c->unit_degree(), pool);
    for (int trial = 0; trial < 25; ++trial) {
      DivisorSpec d{static_cast<int>(uniform_below(rng, max_base + 1)), {}};
      const auto k = uniform_below(rng, 4);
      for (std::size_t i = 0; i < k; ++i)
        d.subtracted.push_back({pool[uniform_below(rng, pool.size())], 1 + static_cast<int>(uniform_below(rng, 2))});
      d = d.normalized();
      auto space = riemann_roch_space(c, d, s);
      const int deg = d.degree(*c);
      REQUIRE(dense_rank(space.evaluation(), f) == space.dim());
      const auto dims = h0_h1(c, d, s);
      REQUIRE(dims.h0 - dims.h1 == deg - g + 1);
      if (deg > 2 * g - 2) REQUIRE(dims.h1 == 0);
      if (space.dim() == 0) continue;
      for (int t = 0; t < 100; ++t) {
        std::vector<std::uint32_t> coef(space.dim());
        bool nonzero = false;
        for (auto& x : coef) {
          x = f.random(rng).value;
          nonzero |= x != 0;
        }
        if (!nonzero) continue;
        int zeros = 0;
        for (std::size_t r = 0; r < s->size(); ++r) {
          std::uint32_t v = 0;
          for (std::size_t j = 0; j < coef.size(); ++j) v = f.addr(v, f.mulr(coef[j], space.evaluation()(r, j)));
          zeros += v == 0;
        }
        REQUIRE(zeros <= deg);
      }
    }
  }
}

TEST_CASE("csv export") {
  auto c = genus2();
  auto s = sample(c, 5);
  auto csv = to_csv(riemann_roch_space(c, DivisorSpec::multiple(5), s));
  CHECK(csv.rfind("x,y,z,s0,s1,s2,s3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
