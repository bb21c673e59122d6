#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "koszul/dense.hpp"
#include "koszul/field.hpp"
#include "koszul/poly.hpp"

using namespace koszul;

TEST_CASE("field operations at p = 10007") {
  PrimeField f(10007);
  CHECK(f.add(Fp{10006}, Fp{1}) == Fp{0});
  CHECK(f.pow(Fp{2}, 10006) == Fp{1});
  CHECK(f.mul(f.inv(Fp{3}), Fp{3}) == Fp{1});
  CHECK(f.sub(Fp{0}, Fp{1}) == Fp{10006});
  CHECK(f.div(Fp{6}, Fp{3}) == Fp{2});
  CHECK(f.from_int(-1) == Fp{10006});
  CHECK(f.symmetric(Fp{10006}) == -1);
  CHECK_THROWS_AS(f.inv(Fp{0}), DivisionByZero);
  CHECK_THROWS_AS(f.div(Fp{1}, Fp{0}), DivisionByZero);
}

TEST_CASE("non-prime moduli are rejected") {
  CHECK_THROWS_AS(PrimeField(10005), InvalidArgument);
  CHECK_THROWS_AS(PrimeField(2), InvalidArgument);
  CHECK_NOTHROW(PrimeField(32003));
}

TEST_CASE("field axioms on random triples") {
  PrimeField f(10007);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 10000; ++i) {
    Fp a = f.random(rng), b = f.random(rng), c = f.random(rng);
    REQUIRE(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
    REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
    REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
    REQUIRE(f.add(a, f.neg(a)) == f.zero());
    if (a.value != 0) REQUIRE(f.mul(a, f.inv(a)) == f.one());
  }
}

TEST_CASE("square roots") {
  PrimeField f(10007);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    Fp a = f.random_nonzero(rng);
    Fp sq = f.mul(a, a);
    REQUIRE(f.is_square(sq));
    Fp r = f.sqrt(sq);
    REQUIRE(f.mul(r, r) == sq);
    REQUIRE(r.value <= f.neg(r).value);
  }
}

TEST_CASE("batch inverse") {
  PrimeField f(10007);
  std::vector<Fp> xs{Fp{1}, Fp{2}, Fp{4}};
  // oracle: elementwise inversion
  CHECK(f.inv(Fp{4}) == Fp{2502});
  CHECK(batch_inverse(f, xs) == std::vector<Fp>{Fp{1}, Fp{5004}, Fp{2502}});
  CHECK(batch_inverse(f, std::vector<Fp>{Fp{1}}) == std::vector<Fp>{Fp{1}});
  try {
    batch_inverse(f, std::vector<Fp>{Fp{1}, Fp{0}, Fp{2}});
    FAIL("expected ZeroEntry");
  } catch (const ZeroEntry& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("batch inverse agrees with per-element inversion") {
  PrimeField f(32003);
  std::mt19937_64 rng(7);
  std::vector<Fp> xs(1000);
  for (auto& x : xs) x = f.random_nonzero(rng);
  const auto inv = batch_inverse(f, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(inv[i] == f.inv(xs[i]));
}

TEST_CASE("dense kernel and rank") {
  PrimeField f(10007);
  Matrix m(2, 3);
  m(0, 0) = 1, m(0, 1) = 2, m(0, 2) = 3;
  m(1, 0) = 2, m(1, 1) = 4, m(1, 2) = 6;
  CHECK(dense_rank(m, f) == 1);
  Matrix k = kernel(m, f);
  CHECK(k.cols() == 2);
  Matrix prod = m.multiply(k, f);
  for (std::size_t i = 0; i < prod.rows(); ++i)
    for (std::size_t j = 0; j < prod.cols(); ++j) CHECK(prod(i, j) == 0);
}

TEST_CASE("polynomial roots and gcd") {
  PrimeField f(7);
  // (x-1)^2 (x-3) (x^2+1); x^2+1 is irreducible mod 7
  Poly a = poly::mul(poly::mul(Poly{6, 1}, Poly{6, 1}, f), Poly{4, 1}, f);
  a = poly::mul(a, Poly{1, 0, 1}, f);
  auto rs = poly::roots(a, f);
  REQUIRE(rs.size() == 2);
  CHECK(rs[0] == std::pair<std::uint32_t, int>{1, 2});
  CHECK(rs[1] == std::pair<std::uint32_t, int>{3, 1});
  CHECK(poly::gcd(a, poly::derivative(a, f), f) == Poly{6, 1});
}
