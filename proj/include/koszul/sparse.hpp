#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "koszul/dense.hpp"
#include "koszul/field.hpp"

namespace koszul {

struct Triplet {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint32_t value = 0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate-form sparse matrix over F_p. Entries are kept sorted by
/// (row, col), without duplicates and without stored zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::uint32_t prime) : rows_(rows), cols_(cols), prime_(prime) {}

  /// Sorts, sums duplicate coordinates modulo p and drops zeros.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::uint32_t prime,
                                    std::vector<Triplet> entries);
  static SparseMatrix from_dense(const Matrix& m, std::uint32_t prime);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t prime() const { return prime_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Triplet>& entries() const { return entries_; }

  /// Optional block structure from wedge indexing: rows (cols) come in
  /// consecutive blocks of this size. Zero when unknown.
  std::size_t row_block = 0;
  std::size_t col_block = 0;

  SparseMatrix transposed() const;
  /// Entry (i, j) moves to (row_perm[i], col_perm[j]).
  SparseMatrix permuted(std::span<const std::size_t> row_perm, std::span<const std::size_t> col_perm) const;
  SparseMatrix multiply(const SparseMatrix& rhs) const;
  /// [this | rhs]
  SparseMatrix hconcat(const SparseMatrix& rhs) const;
  Matrix to_dense() const;
  bool is_zero() const { return entries_.empty(); }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.prime_ == b.prime_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint32_t prime_ = 0;
  std::vector<Triplet> entries_;
};

enum class RankMethod { elimination, wiedemann, dense_oracle };
const char* to_string(RankMethod m);

struct FillStats {
  std::size_t initial_nnz = 0;
  std::size_t peak_nnz = 0;
  std::size_t sparse_pivots = 0;  // pivots taken before switching to dense
  std::size_t dense_rows = 0;     // trailing block handed to the dense kernel
  std::size_t dense_cols = 0;
};

struct RankResult {
  std::size_t rank = 0;
  RankMethod method = RankMethod::elimination;
  FillStats fill;
  double elapsed_seconds = 0;
  std::uint32_t prime = 0;
  bool probabilistic = false;
  int repetitions = 0;  // Wiedemann runs performed
};

struct RankBudget {
  double max_seconds = std::numeric_limits<double>::infinity();
  std::size_t max_nnz = 100'000'000;
  /// Active-submatrix density at which elimination hands over to the dense kernel.
  double dense_threshold = 0.08;
  /// When set, the active submatrix is written here (cache format) on budget exhaustion.
  std::string checkpoint_path;
};

/// Exact rank by sparse elimination with Markowitz pivoting (ties: lowest
/// row, then lowest column), switching to dense elimination on the trailing
/// block. Throws BudgetExceeded.
RankResult rank_sparse(const SparseMatrix& m, const RankBudget& budget = {});

/// Monte Carlo black-box rank from the minimal polynomial of a diagonally
/// preconditioned symmetric operator. Runs until two independent seeds agree;
/// falls back to elimination after `max_repetitions` runs.
RankResult rank_wiedemann(const SparseMatrix& m, std::uint64_t seed, int max_repetitions = 6);

enum class Arithmetic { mod_p, exact_rational };

struct OracleCaps {
  std::size_t mod_p_entries = 4'000'000;
  std::size_t rational_entries = 10'000;
};

/// Plain Gaussian elimination. The exact_rational path lifts each entry to
/// its symmetric representative in (-p/2, p/2] and works over Q with GMP.
/// Throws CapExceeded when rows * cols is above the cap.
RankResult rank_dense_oracle(const SparseMatrix& m, Arithmetic arithmetic, const OracleCaps& caps = {});

/// Rank over Q of an integer matrix given row-major.
std::size_t rational_rank(const std::vector<std::vector<long long>>& rows);

/// Dense elimination kernel used for trailing blocks; `a` is row-major with
/// entries in [0, p) and is destroyed.
std::size_t dense_rank_inplace(std::vector<std::uint64_t>& a, std::size_t rows, std::size_t cols, std::uint32_t p);

// Binary matrix cache: little-endian header
//   magic "KZSM" | u32 version | u32 prime | u64 rows | u64 cols | u64 nnz
// followed by nnz triplets (u32 row, u32 col, u32 value) sorted by (row, col).
inline constexpr std::uint32_t kMatrixCacheVersion = 1;
void write_matrix_cache(const std::string& path, const SparseMatrix& m);
SparseMatrix read_matrix_cache(const std::string& path);

}  // namespace koszul
