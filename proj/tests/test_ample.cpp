#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "koszul/ample.hpp"
#include "koszul/errors.hpp"

using namespace koszul;

namespace {

using CurvePtr = std::shared_ptr<const CurveModel>;

CurvePtr genus2(Poly f = Poly{1, 0, 0, 0, 0, 1}) {
  return std::make_shared<const CurveModel>(make_hyperelliptic(PrimeField(10007), 2, f));
}

CurvePtr quartic() {
  return std::make_shared<const CurveModel>(
      make_plane_curve(PrimeField(10007), 4, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}}));
}

SectionSpace space_of(const CurvePtr& c, const DivisorSpec& d) {
  const std::vector<DivisorSpec> ds{d};
  auto s = std::make_shared<const SampleSet>(choose_sample(*c, required_guard(*c, ds), 5, support_of(ds)));
  return riemann_roch_space(c, d, s);
}

std::size_t rank_of(const SparseMatrix& m) { return rank_dense_oracle(m, Arithmetic::mod_p).rank; }

// Gradient of the Fermat quartic at a point.
std::array<std::uint32_t, 3> fermat_gradient(const PrimeField& f, const PointOnCurve& p) {
  std::array<std::uint32_t, 3> g{};
  for (int i = 0; i < 3; ++i) g[i] = f.mulr(4, f.pow(Fp{p.coords[i]}, 3).value);
  return g;
}

std::uint32_t dot(const PrimeField& f, const std::array<std::uint32_t, 3>& a, const std::array<std::uint32_t, 3>& b) {
  std::uint32_t s = 0;
  for (int i = 0; i < 3; ++i) s = f.addr(s, f.mulr(a[i], b[i]));
  return s;
}

}  // namespace

TEST_CASE("jet matrices") {
  auto c = genus2();
  const auto& f = c->field();
  auto k = space_of(c, DivisorSpec::canonical(*c));
  auto pts = enumerate_points(*c, 4).points;
  CHECK(rank_of(jet_matrix(k, EffectiveDivisor{{{pts[0], 1}}})) == 1);
  // the two points of an x-fiber give equal rows
  REQUIRE(pts[0].x() == pts[1].x());
  auto fiber = jet_matrix(k, EffectiveDivisor{{{pts[0], 1}, {pts[1], 1}}});
  CHECK(fiber.rows() == 2);
  CHECK(rank_of(fiber) == 1);
  const PointOnCurve w{{f.neg(Fp{1}).value, 0, 1}, true};
  CHECK(rank_of(jet_matrix(k, EffectiveDivisor{{{w, 2}}})) == 1);
  CHECK(rank_of(jet_matrix(k, EffectiveDivisor{{{pts[0], 2}}})) == 2);
  CHECK_THROWS_AS(jet_matrix(k, EffectiveDivisor{{{pts[0], 1}, {pts[0], 1}}}), InvalidArgument);
  CHECK_THROWS_AS(jet_matrix(k, EffectiveDivisor{{{pts[0], 10}}}), InvalidArgument);
}

TEST_CASE("canonical bundle of the genus 2 curve") {
  auto c = genus2();
  auto v0 = is_p_very_ample(c, DivisorSpec::canonical(*c), 0);
  CHECK(v0.outcome == AmplenessOutcome::no_failure_found);
  CHECK(v0.coverage.exhaustive > 1000);
  CHECK_FALSE(v0.scope.empty());

  auto v1 = is_p_very_ample(c, DivisorSpec::canonical(*c), 1);
  REQUIRE(v1.outcome == AmplenessOutcome::failure_witness);
  const auto& xi = *v1.witness;
  CHECK(xi.degree() == 2);
  REQUIRE(xi.points.size() == 2);
  CHECK(xi.points[0].point.x() == xi.points[1].point.x());
  CHECK(v1.witness_rank == 1);
  CHECK(independent_jet_rank(c, DivisorSpec::canonical(*c), xi, 99) < 2);
  CHECK(v1.coverage.multiplicity_ceiling == 2);
}

TEST_CASE("Weierstrass doubling is found first when W leads the enumeration") {
  // y^2 = x^5 + x has the Weierstrass point (0, 0)
  auto c = genus2(Poly{0, 1, 0, 0, 0, 1});
  auto v = is_p_very_ample(c, DivisorSpec::canonical(*c), 1);
  REQUIRE(v.outcome == AmplenessOutcome::failure_witness);
  REQUIRE(v.witness->points.size() == 1);
  CHECK(v.witness->points[0].multiplicity == 2);
  CHECK(v.witness->points[0].point == PointOnCurve{{0, 0, 1}});
}

TEST_CASE("degree 2g + p bundles") {
  auto c = genus2();
  auto v = is_p_very_ample(c, DivisorSpec::multiple(7), 3);
  CHECK(v.outcome == AmplenessOutcome::no_failure_found);
  CHECK(v.coverage.support_pool == 71);
  CHECK(v.coverage.sampled == 2000);

  auto pts = enumerate_points(*c, 40).points;
  for (int trial = 0; trial < 4; ++trial) {
    // deg = 2g + p with points removed from a larger base
    const int p = 1 + trial % 2;
    DivisorSpec b{2 * 2 + p + 2, {{pts[10 + trial], 1}, {pts[20 + trial], 1}}};
    AmplenessOptions o;
    o.max_supports = 20'000;
    o.random_divisors = 300;
    CHECK(is_p_very_ample(c, b, p, o).outcome == AmplenessOutcome::no_failure_found);
  }
}

TEST_CASE("canonical plane quartic") {
  auto c = quartic();
  const auto& f = c->field();
  auto v1 = is_p_very_ample(c, DivisorSpec::multiple(1), 1);
  CHECK(v1.outcome == AmplenessOutcome::no_failure_found);
  auto v0 = is_p_very_ample(c, DivisorSpec::multiple(1), 0);
  CHECK(v0.outcome == AmplenessOutcome::no_failure_found);

  auto v2 = is_p_very_ample(c, DivisorSpec::multiple(1), 2);
  REQUIRE(v2.outcome == AmplenessOutcome::failure_witness);
  const auto& xi = *v2.witness;
  CHECK(xi.degree() == 3);
  CHECK(independent_jet_rank(c, DivisorSpec::multiple(1), xi, 7) < 3);
  // oracle: the divisor lies on a line
  if (xi.points.size() == 3) {
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = xi.points[i].point.coords[j];
    CHECK(dense_rank(m, f) == 2);
  } else {
    REQUIRE(xi.points.size() == 2);
    const auto& tangent_pt = xi.points[0].multiplicity == 2 ? xi.points[0].point : xi.points[1].point;
    const auto& other = xi.points[0].multiplicity == 2 ? xi.points[1].point : xi.points[0].point;
    CHECK(dot(f, fermat_gradient(f, tangent_pt), other.coords) == 0);
  }
}

TEST_CASE("monotonicity in p") {
  AmplenessOptions o;
  o.max_supports = 50'000;
  o.random_divisors = 200;
  for (const auto& c : {genus2(), quartic()}) {
    bool failed = false;
    for (int p = 0; p <= 3; ++p) {
      const auto v = is_p_very_ample(c, DivisorSpec::canonical(*c), p, o);
      if (failed) CHECK(v.outcome == AmplenessOutcome::failure_witness);
      if (v.outcome == AmplenessOutcome::failure_witness) {
        failed = true;
        CHECK(independent_jet_rank(c, DivisorSpec::canonical(*c), *v.witness, 3) < static_cast<std::size_t>(p + 1));
      }
      // failure appears exactly at gon - 1
      CHECK((v.outcome == AmplenessOutcome::failure_witness) == (p >= c->gonality() - 1));
    }
  }
}

TEST_CASE("inner projections") {
  auto q = quartic();
  auto pts = enumerate_points(*q, 3).points;
  std::vector<PointOnCurve> one{pts[0]};
  auto d = inner_projection(*q, DivisorSpec::multiple(1), one);
  CHECK(d.degree(*q) == 3);
  CHECK(h0_h1(q, d) == CohomologyDims{2, 1, false});
  CHECK(inner_projection(*q, DivisorSpec::multiple(1), {}) == DivisorSpec::multiple(1));
  CHECK_THROWS_AS(inner_projection(*q, d, one), InvalidArgument);
  std::vector<PointOnCurve> twice{pts[1], pts[1]};
  CHECK_THROWS_AS(inner_projection(*q, DivisorSpec::multiple(1), twice), InvalidArgument);

  auto c = genus2();
  auto g2pts = enumerate_points(*c, 1).points;
  auto kx = inner_projection(*c, DivisorSpec::canonical(*c), g2pts);
  CHECK(kx.degree(*c) == 1);
  const auto dims = h0_h1(c, kx);
  CHECK(dims.h0 == 1);
  CHECK(dims.h1 == 1);
}

TEST_CASE("jets at a subtracted point use the twisted trivialization") {
  auto c = genus2();
  auto pts = enumerate_points(*c, 4).points;
  // sections of 6*inf - P, read in the trivialization at P, need not vanish there
  DivisorSpec b{6, {{pts[0], 1}}};
  auto space = space_of(c, b);
  CHECK(rank_of(jet_matrix(space, EffectiveDivisor{{{pts[0], 1}}})) == 1);
  CHECK(rank_of(jet_matrix(space, EffectiveDivisor{{{pts[0], 2}}})) == 2);
}
