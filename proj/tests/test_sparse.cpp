#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "koszul/errors.hpp"
#include "koszul/sparse.hpp"

using namespace koszul;

namespace {

constexpr std::uint32_t kP = 10007;

SparseMatrix random_sparse(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density,
                           std::uint32_t p = kP) {
  std::vector<Triplet> t;
  const auto count = static_cast<std::size_t>(density * static_cast<double>(rows * cols));
  for (std::size_t k = 0; k < count; ++k)
    t.push_back({static_cast<std::uint32_t>(uniform_below(rng, rows)), static_cast<std::uint32_t>(uniform_below(rng, cols)),
                 static_cast<std::uint32_t>(1 + uniform_below(rng, p - 1))});
  return SparseMatrix::from_triplets(rows, cols, p, std::move(t));
}

// Low-rank product of two random sparse factors, so rank deficiency is
// structural rather than accidental.
SparseMatrix low_rank(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t inner, double density) {
  auto a = random_sparse(rng, rows, inner, density);
  auto b = random_sparse(rng, inner, cols, density);
  return a.multiply(b);
}

std::vector<std::size_t> shuffled(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
  return v;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("koszul_test_" + name)).string();
}

}  // namespace

TEST_CASE("matrix normalization") {
  auto m = SparseMatrix::from_triplets(2, 2, kP, {{1, 1, 5}, {0, 0, 3}, {1, 1, kP - 5}, {0, 1, 0}, {0, 0, 1}});
  REQUIRE(m.nnz() == 1);
  CHECK(m.entries()[0] == Triplet{0, 0, 4});
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, kP, {{2, 0, 1}}), InvalidArgument);
}

TEST_CASE("identity and antisymmetrization") {
  std::vector<Triplet> id;
  for (std::uint32_t i = 0; i < 100; ++i) id.push_back({i, i, 1});
  auto eye = SparseMatrix::from_triplets(100, 100, kP, id);
  CHECK(rank_sparse(eye).rank == 100);

  // v_i ^ v_j -> v_i (x) v_j - v_j (x) v_i for n = 4, rows indexed a*4+b
  std::vector<Triplet> t;
  std::uint32_t col = 0;
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint32_t j = i + 1; j < 4; ++j, ++col) {
      t.push_back({i * 4 + j, col, 1});
      t.push_back({j * 4 + i, col, kP - 1});
    }
  auto anti = SparseMatrix::from_triplets(16, 6, kP, t);
  CHECK(rank_sparse(anti).rank == 6);
  CHECK(rank_wiedemann(anti, 1).rank == 6);
  CHECK(rank_dense_oracle(anti, Arithmetic::exact_rational).rank == 6);
}

TEST_CASE("random 2000 x 2000 at 1% density agrees with the dense oracle") {
  std::mt19937_64 rng(2024);
  auto m = random_sparse(rng, 2000, 2000, 0.01);
  auto s = rank_sparse(m);
  auto d = rank_dense_oracle(m, Arithmetic::mod_p);
  CHECK(s.rank == d.rank);
  CHECK(s.rank > 1900);
  CHECK(s.fill.initial_nnz == m.nnz());
  CHECK(s.fill.peak_nnz >= s.fill.initial_nnz);
}

TEST_CASE("elimination agrees with the oracle on structured low-rank matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 20 + uniform_below(rng, 120), cols = 20 + uniform_below(rng, 120);
    const std::size_t inner = 1 + uniform_below(rng, std::min(rows, cols));
    auto m = low_rank(rng, rows, cols, inner, 0.05 + 0.1 * static_cast<double>(uniform_below(rng, 4)));
    const auto want = rank_dense_oracle(m, Arithmetic::mod_p).rank;
    REQUIRE(rank_sparse(m).rank == want);
    RankBudget eager;
    eager.dense_threshold = 0.0;
    REQUIRE(rank_sparse(m, eager).rank == want);
    RankBudget never;
    never.dense_threshold = 2.0;
    REQUIRE(rank_sparse(m, never).rank == want);
  }
}

TEST_CASE("pivoting is deterministic") {
  std::mt19937_64 rng(17);
  auto m = random_sparse(rng, 300, 250, 0.02);
  auto a = rank_sparse(m), b = rank_sparse(m);
  CHECK(a.rank == b.rank);
  CHECK(a.fill.peak_nnz == b.fill.peak_nnz);
  CHECK(a.fill.sparse_pivots == b.fill.sparse_pivots);
  CHECK(a.fill.dense_rows == b.fill.dense_rows);
}

TEST_CASE("transpose and permutation invariance, subadditivity") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 10 + uniform_below(rng, 90), cols = 10 + uniform_below(rng, 90);
    auto m = low_rank(rng, rows, cols, 1 + uniform_below(rng, 40), 0.08);
    const auto r = rank_sparse(m).rank;
    REQUIRE(rank_sparse(m.transposed()).rank == r);
    const auto rp = shuffled(rng, rows), cp = shuffled(rng, cols);
    REQUIRE(rank_sparse(m.permuted(rp, cp)).rank == r);
    auto b = low_rank(rng, rows, 5 + uniform_below(rng, 60), 1 + uniform_below(rng, 20), 0.1);
    REQUIRE(rank_sparse(m.hconcat(b)).rank <= r + rank_sparse(b).rank);
  }
}

TEST_CASE("Wiedemann") {
  auto diag = SparseMatrix::from_triplets(4, 4, kP, {{0, 0, 1}, {1, 1, 2}, {3, 3, 3}});
  auto d = rank_wiedemann(diag, 3);
  CHECK(d.rank == 3);
  CHECK(d.probabilistic);
  CHECK(d.method == RankMethod::wiedemann);
  CHECK(rank_wiedemann(SparseMatrix(7, 5, kP), 1).rank == 0);

  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 5 + uniform_below(rng, 70), cols = 5 + uniform_below(rng, 70);
    auto m = trial % 2 ? random_sparse(rng, rows, cols, 0.05)
                       : low_rank(rng, rows, cols, 1 + uniform_below(rng, std::min(rows, cols)), 0.15);
    auto w = rank_wiedemann(m, 1000 + trial);
    REQUIRE(w.rank == rank_sparse(m).rank);
    REQUIRE(w.rank == rank_dense_oracle(m, Arithmetic::mod_p).rank);
  }
}

TEST_CASE("dense oracle") {
  CHECK(rank_dense_oracle(SparseMatrix(1, 1, kP), Arithmetic::exact_rational).rank == 0);
  CHECK(rank_dense_oracle(SparseMatrix(1, 1, kP), Arithmetic::mod_p).rank == 0);
  // 2520 / (i + j + 1): an integer multiple of the 5 x 5 Hilbert matrix
  std::vector<Triplet> t;
  std::vector<std::vector<long long>> h(5, std::vector<long long>(5));
  for (std::uint32_t i = 0; i < 5; ++i)
    for (std::uint32_t j = 0; j < 5; ++j) {
      h[i][j] = 2520 / (i + j + 1);
      t.push_back({i, j, static_cast<std::uint32_t>(h[i][j])});
    }
  auto hm = SparseMatrix::from_triplets(5, 5, kP, t);
  CHECK(rank_dense_oracle(hm, Arithmetic::exact_rational).rank == 5);
  CHECK(rational_rank(h) == 5);
  CHECK(rational_rank({{1, 2, 3}, {2, 4, 6}, {-1, -2, -3}}) == 1);
  CHECK(rank_dense_oracle(SparseMatrix(101, 100, kP), Arithmetic::mod_p).method == RankMethod::dense_oracle);
  CHECK_THROWS_AS(rank_dense_oracle(SparseMatrix(101, 100, kP), Arithmetic::exact_rational), CapExceeded);
  CHECK_THROWS_AS(rank_dense_oracle(SparseMatrix(3000, 3000, kP), Arithmetic::mod_p), CapExceeded);

  // Symmetric lift: -1 and 1 cancel over Q exactly as mod p.
  auto lift = SparseMatrix::from_triplets(2, 2, kP, {{0, 0, 1}, {0, 1, kP - 1}, {1, 0, kP - 1}, {1, 1, 1}});
  CHECK(rank_dense_oracle(lift, Arithmetic::exact_rational).rank == 1);
}

TEST_CASE("delayed reduction near the top of the prime range") {
  const std::uint32_t p = 2147483647u;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30 + uniform_below(rng, 30);
    auto m = random_sparse(rng, n, n + 5, 0.5, p);
    std::vector<std::uint64_t> a(m.rows() * m.cols(), 0);
    for (const auto& e : m.entries()) a[e.row * m.cols() + e.col] = e.value;
    REQUIRE(dense_rank_inplace(a, m.rows(), m.cols(), p) == rank_dense_oracle(m, Arithmetic::mod_p).rank);
  }
}

TEST_CASE("budget exhaustion leaves a readable checkpoint") {
  std::mt19937_64 rng(3);
  auto m = random_sparse(rng, 400, 400, 0.02);
  RankBudget b;
  b.max_nnz = m.nnz();
  b.dense_threshold = 2.0;
  b.checkpoint_path = temp_path("checkpoint.kzsm");
  try {
    rank_sparse(m, b);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.checkpoint == b.checkpoint_path);
    auto cp = read_matrix_cache(e.checkpoint);
    CHECK(cp.rows() == m.rows());
    // rank is preserved: pivots already taken plus the rank of what is left
    CHECK(e.pivots_done + rank_sparse(cp).rank == rank_sparse(m).rank);
  }
  std::filesystem::remove(b.checkpoint_path);

  RankBudget t;
  t.max_seconds = 0.0;
  t.dense_threshold = 2.0;
  CHECK_THROWS_AS(rank_sparse(m, t), BudgetExceeded);
}

TEST_CASE("binary cache round trip") {
  std::mt19937_64 rng(77);
  auto m = random_sparse(rng, 50, 70, 0.1);
  const auto path = temp_path("roundtrip.kzsm");
  write_matrix_cache(path, m);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 8 * 3 + 12 * m.nnz());
  CHECK(read_matrix_cache(path) == m);
  {
    std::ifstream is(path, std::ios::binary);
    char head[8];
    is.read(head, 8);
    CHECK(std::string(head, 4) == "KZSM");
    CHECK(static_cast<unsigned char>(head[4]) == 1);  // version, little-endian
  }
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "NOPE";
  }
  CHECK_THROWS_AS(read_matrix_cache(path), InvalidArgument);
  std::filesystem::remove(path);
}
