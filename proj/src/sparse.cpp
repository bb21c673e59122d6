#include "koszul/sparse.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <fstream>
#include <random>

#include "koszul/errors.hpp"

namespace koszul {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool row_major_less(const Triplet& a, const Triplet& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

}  // namespace

const char* to_string(RankMethod m) {
  switch (m) {
    case RankMethod::elimination: return "elimination";
    case RankMethod::wiedemann: return "wiedemann";
    case RankMethod::dense_oracle: return "dense_oracle";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::uint32_t prime,
                                         std::vector<Triplet> entries) {
  if (rows > UINT32_MAX || cols > UINT32_MAX) throw InvalidArgument("sparse matrix dimensions exceed 2^32");
  SparseMatrix m(rows, cols, prime);
  for (const auto& t : entries)
    if (t.row >= rows || t.col >= cols) throw InvalidArgument("sparse matrix entry out of range");
  std::sort(entries.begin(), entries.end(), row_major_less);
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries.size();) {
    std::uint64_t sum = 0;
    std::size_t j = i;
    for (; j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col; ++j)
      sum += entries[j].value % prime;
    sum %= prime;
    if (sum != 0) entries[out++] = Triplet{entries[i].row, entries[i].col, static_cast<std::uint32_t>(sum)};
    i = j;
  }
  entries.resize(out);
  m.entries_ = std::move(entries);
  return m;
}

SparseMatrix SparseMatrix::from_dense(const Matrix& d, std::uint32_t prime) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) % prime != 0)
        t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d(i, j) % prime});
  return from_triplets(d.rows(), d.cols(), prime, std::move(t));
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t(cols_, rows_, prime_);
  t.entries_.reserve(entries_.size());
  for (const auto& e : entries_) t.entries_.push_back({e.col, e.row, e.value});
  std::sort(t.entries_.begin(), t.entries_.end(), row_major_less);
  t.row_block = col_block;
  t.col_block = row_block;
  return t;
}

SparseMatrix SparseMatrix::permuted(std::span<const std::size_t> row_perm, std::span<const std::size_t> col_perm) const {
  if (row_perm.size() != rows_ || col_perm.size() != cols_) throw InvalidArgument("permutation size mismatch");
  SparseMatrix m(rows_, cols_, prime_);
  m.entries_.reserve(entries_.size());
  for (const auto& e : entries_)
    m.entries_.push_back({static_cast<std::uint32_t>(row_perm[e.row]), static_cast<std::uint32_t>(col_perm[e.col]), e.value});
  std::sort(m.entries_.begin(), m.entries_.end(), row_major_less);
  return m;
}

SparseMatrix SparseMatrix::multiply(const SparseMatrix& rhs) const {
  if (cols_ != rhs.rows_ || prime_ != rhs.prime_) throw InvalidArgument("sparse product: shape or prime mismatch");
  std::vector<std::size_t> start(rhs.rows_ + 1, 0);
  for (const auto& e : rhs.entries_) ++start[e.row + 1];
  for (std::size_t i = 0; i < rhs.rows_; ++i) start[i + 1] += start[i];
  std::vector<std::uint64_t> acc(rhs.cols_, 0);
  std::vector<char> touched(rhs.cols_, 0);
  std::vector<std::uint32_t> cols_used;
  SparseMatrix out(rows_, rhs.cols_, prime_);
  for (std::size_t i = 0; i < entries_.size();) {
    const std::uint32_t row = entries_[i].row;
    for (; i < entries_.size() && entries_[i].row == row; ++i) {
      const std::uint64_t a = entries_[i].value;
      const std::uint32_t k = entries_[i].col;
      for (std::size_t s = start[k]; s < start[k + 1]; ++s) {
        const auto& b = rhs.entries_[s];
        if (!touched[b.col]) touched[b.col] = 1, cols_used.push_back(b.col);
        acc[b.col] = (acc[b.col] + a * b.value) % prime_;
      }
    }
    std::sort(cols_used.begin(), cols_used.end());
    for (auto c : cols_used) {
      if (acc[c] != 0) out.entries_.push_back({row, c, static_cast<std::uint32_t>(acc[c])});
      acc[c] = 0;
      touched[c] = 0;
    }
    cols_used.clear();
  }
  return out;
}

SparseMatrix SparseMatrix::hconcat(const SparseMatrix& rhs) const {
  if (rows_ != rhs.rows_ || prime_ != rhs.prime_) throw InvalidArgument("hconcat: shape or prime mismatch");
  std::vector<Triplet> t = entries_;
  for (const auto& e : rhs.entries_) t.push_back({e.row, static_cast<std::uint32_t>(e.col + cols_), e.value});
  return from_triplets(rows_, cols_ + rhs.cols_, prime_, std::move(t));
}

Matrix SparseMatrix::to_dense() const {
  Matrix d(rows_, cols_);
  for (const auto& e : entries_) d(e.row, e.col) = e.value;
  return d;
}

// ---------------------------------------------------------------------------
// Dense kernel with delayed reduction

std::size_t dense_rank_inplace(std::vector<std::uint64_t>& a, std::size_t rows, std::size_t cols, std::uint32_t prime) {
  if (a.size() != rows * cols) throw InvalidArgument("dense block size mismatch");
  if (rows == 0 || cols == 0) return 0;
  const std::uint64_t p = prime;
  // Each pivot step adds at most (p-1)^2 to an entry.
  const std::uint64_t max_steps = (UINT64_MAX - p) / ((p - 1) * (p - 1));
  const PrimeField field(prime);
  std::vector<std::uint64_t*> row(rows);
  for (std::size_t i = 0; i < rows; ++i) row[i] = a.data() + i * cols;
  std::vector<std::uint64_t> pivot(cols);
  std::size_t rank = 0;
  std::uint64_t pending = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t sel = rows;
    for (std::size_t i = rank; i < rows; ++i) {
      row[i][c] %= p;
      if (row[i][c] != 0 && sel == rows) sel = i;
    }
    if (sel == rows) continue;
    std::swap(row[rank], row[sel]);
    std::uint64_t* pr = row[rank];
    const std::uint64_t inv = field.invr(static_cast<std::uint32_t>(pr[c]));
    for (std::size_t j = c + 1; j < cols; ++j) pivot[j] = pr[j] % p * inv % p;
    for (std::size_t i = rank + 1; i < rows; ++i) {
      std::uint64_t* r = row[i];
      const std::uint64_t x = r[c];
      if (x == 0) continue;
      const std::uint64_t f = p - x;
      for (std::size_t j = c + 1; j < cols; ++j) r[j] += f * pivot[j];
      r[c] = 0;
    }
    ++rank;
    if (++pending >= max_steps) {
      for (std::size_t i = rank; i < rows; ++i)
        for (std::size_t j = c + 1; j < cols; ++j) row[i][j] %= p;
      pending = 0;
    }
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Sparse elimination

namespace {

struct Entry {
  std::uint32_t col;
  std::uint32_t val;
};
using Row = std::vector<Entry>;

const Entry* find_entry(const Row& r, std::uint32_t col) {
  auto it = std::lower_bound(r.begin(), r.end(), col, [](const Entry& e, std::uint32_t c) { return e.col < c; });
  return it != r.end() && it->col == col ? &*it : nullptr;
}

class Eliminator {
 public:
  Eliminator(const SparseMatrix& m, const RankBudget& budget)
      : m_(m), budget_(budget), p_(m.prime()), field_(m.prime()), rows_(m.rows()), active_row_(m.rows(), 1),
        col_count_(m.cols(), 0), col_rows_(m.cols()) {
    for (const auto& t : m.entries()) {
      rows_[t.row].push_back({t.col, t.value});
      ++col_count_[t.col];
      col_rows_[t.col].push_back(t.row);
    }
    nnz_ = m.nnz();
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].empty()) active_row_[i] = 0;
      else ++active_rows_;
    for (auto c : col_count_)
      if (c > 0) ++active_cols_;
    stats_.initial_nnz = stats_.peak_nnz = nnz_;
  }

  RankResult run() {
    const auto start = Clock::now();
    while (active_rows_ > 0 && active_cols_ > 0) {
      const double cells = static_cast<double>(active_rows_) * static_cast<double>(active_cols_);
      if (static_cast<double>(nnz_) >= budget_.dense_threshold * cells && cells <= kMaxDenseCells) break;
      if ((stats_.sparse_pivots & 63) == 0 && seconds_since(start) > budget_.max_seconds)
        fail("time budget exhausted during sparse elimination");
      const auto [r, c] = choose_pivot();
      eliminate(r, c);
      ++rank_;
      ++stats_.sparse_pivots;
      if (nnz_ > stats_.peak_nnz) stats_.peak_nnz = nnz_;
      if (nnz_ > budget_.max_nnz) fail("fill-in budget exhausted during sparse elimination");
    }
    if (active_rows_ > 0 && active_cols_ > 0) rank_ += dense_tail();
    RankResult res;
    res.rank = rank_;
    res.method = RankMethod::elimination;
    res.fill = stats_;
    res.prime = p_;
    res.elapsed_seconds = seconds_since(start);
    return res;
  }

 private:
  static constexpr double kMaxDenseCells = 400'000'000.0;
  static constexpr std::size_t kCandidates = 4;

  struct Pivot {
    std::uint64_t cost;
    std::uint32_t row, col;
    bool operator<(const Pivot& o) const {
      if (cost != o.cost) return cost < o.cost;
      if (row != o.row) return row < o.row;
      return col < o.col;
    }
  };

  [[noreturn]] void fail(const std::string& what) {
    std::string path = budget_.checkpoint_path;
    if (!path.empty()) write_matrix_cache(path, active_matrix());
    throw BudgetExceeded(what, stats_.sparse_pivots, path);
  }

  SparseMatrix active_matrix() const {
    std::vector<Triplet> t;
    t.reserve(nnz_);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (active_row_[i])
        for (const auto& e : rows_[i]) t.push_back({static_cast<std::uint32_t>(i), e.col, e.val});
    return SparseMatrix::from_triplets(m_.rows(), m_.cols(), p_, std::move(t));
  }

  // Drops stale row references from a column list.
  void compact_column(std::uint32_t c) {
    auto& list = col_rows_[c];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    std::erase_if(list, [&](std::uint32_t r) { return !active_row_[r] || find_entry(rows_[r], c) == nullptr; });
  }

  // Markowitz search restricted to the sparsest few columns and rows.
  std::pair<std::uint32_t, std::uint32_t> choose_pivot() {
    std::array<std::pair<std::uint32_t, std::uint32_t>, kCandidates> best_cols, best_rows;
    std::size_t ncols = 0, nrows = 0;
    auto offer = [](auto& arr, std::size_t& n, std::pair<std::uint32_t, std::uint32_t> item) {
      if (n < kCandidates) {
        arr[n++] = item;
      } else if (item < arr[n - 1]) {
        arr[n - 1] = item;
      } else {
        return;
      }
      for (std::size_t i = n - 1; i > 0 && arr[i] < arr[i - 1]; --i) std::swap(arr[i], arr[i - 1]);
    };
    for (std::uint32_t c = 0; c < col_count_.size(); ++c)
      if (col_count_[c] > 0) offer(best_cols, ncols, {col_count_[c], c});
    for (std::uint32_t r = 0; r < rows_.size(); ++r)
      if (active_row_[r]) offer(best_rows, nrows, {static_cast<std::uint32_t>(rows_[r].size()), r});

    Pivot best{UINT64_MAX, UINT32_MAX, UINT32_MAX};
    for (std::size_t k = 0; k < ncols; ++k) {
      const std::uint32_t c = best_cols[k].second;
      compact_column(c);
      for (auto r : col_rows_[c]) {
        Pivot cand{static_cast<std::uint64_t>(rows_[r].size() - 1) * (col_count_[c] - 1), r, c};
        if (cand < best) best = cand;
      }
    }
    for (std::size_t k = 0; k < nrows; ++k) {
      const std::uint32_t r = best_rows[k].second;
      for (const auto& e : rows_[r]) {
        Pivot cand{static_cast<std::uint64_t>(rows_[r].size() - 1) * (col_count_[e.col] - 1), r, e.col};
        if (cand < best) best = cand;
      }
    }
    return {best.row, best.col};
  }

  void drop_from_column(std::uint32_t c) {
    if (--col_count_[c] == 0) --active_cols_;
  }

  void eliminate(std::uint32_t pr, std::uint32_t pc) {
    compact_column(pc);
    const Row& pivot = rows_[pr];
    const std::uint64_t inv = field_.invr(find_entry(pivot, pc)->val);
    for (auto k : col_rows_[pc]) {
      if (k == pr) continue;
      Row& target = rows_[k];
      const std::uint64_t factor = p_ - find_entry(target, pc)->val * inv % p_;
      Row out;
      out.reserve(target.size() + pivot.size());
      std::size_t i = 0, j = 0;
      while (i < target.size() || j < pivot.size()) {
        if (j == pivot.size() || (i < target.size() && target[i].col < pivot[j].col)) {
          out.push_back(target[i++]);
        } else if (i == target.size() || pivot[j].col < target[i].col) {
          const std::uint32_t col = pivot[j].col;
          out.push_back({col, static_cast<std::uint32_t>(factor * pivot[j].val % p_)});
          ++col_count_[col];
          col_rows_[col].push_back(k);
          ++nnz_;
          ++j;
        } else {
          const std::uint32_t col = pivot[j].col;
          const auto v = static_cast<std::uint32_t>((target[i].val + factor * pivot[j].val) % p_);
          if (v != 0) {
            out.push_back({col, v});
          } else {
            drop_from_column(col);
            --nnz_;
          }
          ++i, ++j;
        }
      }
      target = std::move(out);
      if (target.empty()) {
        active_row_[k] = 0;
        --active_rows_;
      }
    }
    for (const auto& e : pivot) drop_from_column(e.col);
    nnz_ -= pivot.size();
    rows_[pr] = Row{};
    active_row_[pr] = 0;
    --active_rows_;
    col_rows_[pc].clear();
  }

  std::size_t dense_tail() {
    std::vector<std::uint32_t> col_index(col_count_.size(), UINT32_MAX);
    std::size_t ncols = 0;
    for (std::size_t c = 0; c < col_count_.size(); ++c)
      if (col_count_[c] > 0) col_index[c] = static_cast<std::uint32_t>(ncols++);
    std::size_t nrows = 0;
    std::vector<std::uint64_t> a(static_cast<std::size_t>(active_rows_) * ncols, 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!active_row_[i]) continue;
      for (const auto& e : rows_[i]) a[nrows * ncols + col_index[e.col]] = e.val;
      ++nrows;
    }
    stats_.dense_rows = nrows;
    stats_.dense_cols = ncols;
    // Fewer long rows beat many short ones for the row-oriented kernel.
    if (nrows > ncols) {
      std::vector<std::uint64_t> t(a.size());
      for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j) t[j * nrows + i] = a[i * ncols + j];
      return dense_rank_inplace(t, ncols, nrows, p_);
    }
    return dense_rank_inplace(a, nrows, ncols, p_);
  }

  const SparseMatrix& m_;
  const RankBudget& budget_;
  std::uint64_t p_;
  PrimeField field_;
  std::vector<Row> rows_;
  std::vector<char> active_row_;
  std::vector<std::uint32_t> col_count_;
  std::vector<std::vector<std::uint32_t>> col_rows_;
  std::size_t nnz_ = 0;
  std::size_t active_rows_ = 0;
  std::size_t active_cols_ = 0;
  std::size_t rank_ = 0;
  FillStats stats_;
};

}  // namespace

RankResult rank_sparse(const SparseMatrix& m, const RankBudget& budget) {
  if (m.is_zero()) {
    RankResult r;
    r.prime = m.prime();
    return r;
  }
  return Eliminator(m, budget).run();
}

// ---------------------------------------------------------------------------
// Wiedemann

namespace {

// Minimal connection polynomial C with C(0) = 1 of a linearly recurrent
// sequence; returns (C, L) with L the linear complexity.
std::pair<std::vector<std::uint32_t>, std::size_t> berlekamp_massey(const std::vector<std::uint32_t>& s,
                                                                    const PrimeField& f) {
  std::vector<std::uint32_t> c{1}, b{1};
  std::size_t len = 0, shift = 1;
  std::uint32_t last = 1;
  for (std::size_t n = 0; n < s.size(); ++n) {
    std::uint64_t d = 0;
    for (std::size_t i = 0; i <= len && i < c.size(); ++i) d = (d + static_cast<std::uint64_t>(c[i]) * s[n - i]) % f.prime();
    if (d == 0) {
      ++shift;
      continue;
    }
    const std::uint32_t coef = f.mulr(static_cast<std::uint32_t>(d), f.invr(last));
    auto t = c;
    if (c.size() < b.size() + shift) c.resize(b.size() + shift, 0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + shift] = f.subr(c[i + shift], f.mulr(coef, b[i]));
    if (2 * len <= n) {
      len = n + 1 - len;
      b = std::move(t);
      last = static_cast<std::uint32_t>(d);
      shift = 1;
    } else {
      ++shift;
    }
  }
  c.resize(len + 1, 0);
  return {c, len};
}

struct Csr {
  std::size_t rows = 0;
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> col;
  std::vector<std::uint32_t> val;

  explicit Csr(const SparseMatrix& m) : rows(m.rows()), start(m.rows() + 1, 0) {
    for (const auto& e : m.entries()) ++start[e.row + 1];
    for (std::size_t i = 0; i < rows; ++i) start[i + 1] += start[i];
    col.reserve(m.nnz());
    val.reserve(m.nnz());
    for (const auto& e : m.entries()) col.push_back(e.col), val.push_back(e.value);
  }
};

std::size_t wiedemann_once(const SparseMatrix& a, std::uint64_t seed) {
  const PrimeField f(a.prime());
  const std::uint64_t p = a.prime();
  const std::size_t n = a.cols();
  const Csr A(a);
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> d1(a.rows()), d2(n), u(n), v(n);
  for (auto& x : d1) x = f.random_nonzero(rng).value;
  for (auto& x : d2) x = f.random_nonzero(rng).value;
  for (auto& x : u) x = f.random(rng).value;
  for (auto& x : v) x = f.random(rng).value;

  std::vector<std::uint64_t> w(n), y(a.rows());
  // v <- D2 A^T D1 A D2 v
  auto apply = [&](std::vector<std::uint64_t>& x) {
    for (std::size_t j = 0; j < n; ++j) w[j] = x[j] * d2[j] % p;
    for (std::size_t i = 0; i < A.rows; ++i) {
      std::uint64_t s = 0;
      for (std::size_t k = A.start[i]; k < A.start[i + 1]; ++k) s = (s + A.val[k] * w[A.col[k]]) % p;
      y[i] = s * d1[i] % p;
    }
    std::fill(x.begin(), x.end(), 0);
    for (std::size_t i = 0; i < A.rows; ++i)
      for (std::size_t k = A.start[i]; k < A.start[i + 1]; ++k) x[A.col[k]] = (x[A.col[k]] + A.val[k] * y[i]) % p;
    for (std::size_t j = 0; j < n; ++j) x[j] = x[j] * d2[j] % p;
  };
  auto dot = [&](const std::vector<std::uint64_t>& x) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < n; ++j) s = (s + u[j] * x[j]) % p;
    return static_cast<std::uint32_t>(s);
  };

  std::vector<std::uint32_t> seq;
  seq.reserve(2 * n + 2);
  for (std::size_t i = 0; i < 2 * n + 2; ++i) {
    seq.push_back(dot(v));
    if (i + 1 < 2 * n + 2) apply(v);
  }
  const auto [c, len] = berlekamp_massey(seq, f);
  // The reversed polynomial is divisible by x exactly when c[len] vanishes.
  return len - (len > 0 && c[len] == 0 ? 1 : 0);
}

}  // namespace

RankResult rank_wiedemann(const SparseMatrix& m, std::uint64_t seed, int max_repetitions) {
  const auto start = Clock::now();
  RankResult res;
  res.prime = m.prime();
  res.method = RankMethod::wiedemann;
  res.probabilistic = true;
  res.fill.initial_nnz = res.fill.peak_nnz = m.nnz();
  if (m.is_zero()) {
    res.elapsed_seconds = seconds_since(start);
    return res;
  }
  const SparseMatrix a = m.cols() > m.rows() ? m.transposed() : m;
  std::vector<std::size_t> seen;
  std::mt19937_64 seeder(seed);
  for (int rep = 0; rep < max_repetitions; ++rep) {
    const std::size_t r = wiedemann_once(a, seeder());
    res.repetitions = rep + 1;
    if (std::find(seen.begin(), seen.end(), r) != seen.end()) {
      res.rank = r;
      res.elapsed_seconds = seconds_since(start);
      return res;
    }
    seen.push_back(r);
  }
  RankResult fallback = rank_sparse(m);
  fallback.repetitions = res.repetitions;
  fallback.elapsed_seconds = seconds_since(start);
  return fallback;
}

// ---------------------------------------------------------------------------
// Dense oracle

namespace {

std::size_t rational_rank_impl(std::vector<std::vector<mpq_class>> a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t sel = rank;
    while (sel < rows && a[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(a[rank], a[sel]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      const mpq_class f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

// Row echelon form with a reduction after every operation; deliberately
// independent of the delayed-reduction kernel.
std::size_t modp_rank_plain(Matrix a, std::uint64_t p) {
  const PrimeField f(static_cast<std::uint32_t>(p));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < a.cols() && rank < a.rows(); ++c) {
    std::size_t sel = rank;
    while (sel < a.rows() && a(sel, c) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != rank) std::swap_ranges(a.row(sel).begin(), a.row(sel).end(), a.row(rank).begin());
    const std::uint64_t inv = f.invr(a(rank, c));
    auto pr = a.row(rank);
    for (std::size_t i = rank + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      const std::uint64_t factor = p - a(i, c) * inv % p;
      auto r = a.row(i);
      for (std::size_t j = c; j < a.cols(); ++j) r[j] = static_cast<std::uint32_t>((r[j] + factor * pr[j]) % p);
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t rational_rank(const std::vector<std::vector<long long>>& rows) {
  std::vector<std::vector<mpq_class>> a;
  a.reserve(rows.size());
  for (const auto& r : rows) {
    if (!a.empty() && r.size() != rows[0].size()) throw InvalidArgument("ragged integer matrix");
    std::vector<mpq_class> q;
    q.reserve(r.size());
    for (long long v : r) q.emplace_back(mpz_class(std::to_string(v)));
    a.push_back(std::move(q));
  }
  return rational_rank_impl(std::move(a));
}

RankResult rank_dense_oracle(const SparseMatrix& m, Arithmetic arithmetic, const OracleCaps& caps) {
  const auto start = Clock::now();
  const std::size_t cells = m.rows() * m.cols();
  RankResult res;
  res.prime = m.prime();
  res.method = RankMethod::dense_oracle;
  res.fill.initial_nnz = res.fill.peak_nnz = m.nnz();
  if (arithmetic == Arithmetic::mod_p) {
    if (cells > caps.mod_p_entries)
      throw CapExceeded("dense mod-p oracle: " + std::to_string(cells) + " entries exceed cap " +
                        std::to_string(caps.mod_p_entries));
    res.rank = modp_rank_plain(m.to_dense(), m.prime());
  } else {
    if (cells > caps.rational_entries)
      throw CapExceeded("dense rational oracle: " + std::to_string(cells) + " entries exceed cap " +
                        std::to_string(caps.rational_entries));
    const PrimeField f(m.prime());
    std::vector<std::vector<mpq_class>> a(m.rows(), std::vector<mpq_class>(m.cols(), 0));
    for (const auto& e : m.entries()) a[e.row][e.col] = mpq_class(mpz_class(std::to_string(f.symmetric(Fp{e.value}))));
    res.rank = rational_rank_impl(std::move(a));
  }
  res.elapsed_seconds = seconds_since(start);
  return res;
}

// ---------------------------------------------------------------------------
// Binary cache

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  os.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> buf;
  if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw InvalidArgument("matrix cache: truncated file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

constexpr char kMagic[4] = {'K', 'Z', 'S', 'M'};

}  // namespace

void write_matrix_cache(const std::string& path, const SparseMatrix& m) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidArgument("matrix cache: cannot open " + tmp);
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, kMatrixCacheVersion);
    put_le<std::uint32_t>(os, m.prime());
    put_le<std::uint64_t>(os, m.rows());
    put_le<std::uint64_t>(os, m.cols());
    put_le<std::uint64_t>(os, m.nnz());
    for (const auto& t : m.entries()) {
      put_le<std::uint32_t>(os, t.row);
      put_le<std::uint32_t>(os, t.col);
      put_le<std::uint32_t>(os, t.value);
    }
    if (!os) throw InvalidArgument("matrix cache: write failed for " + tmp);
  }
  std::rename(tmp.c_str(), path.c_str());
}

SparseMatrix read_matrix_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("matrix cache: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument("matrix cache: bad magic in " + path);
  if (get_le<std::uint32_t>(is) != kMatrixCacheVersion) throw InvalidArgument("matrix cache: unsupported version");
  const auto prime = get_le<std::uint32_t>(is);
  const auto rows = get_le<std::uint64_t>(is);
  const auto cols = get_le<std::uint64_t>(is);
  const auto nnz = get_le<std::uint64_t>(is);
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    Triplet e;
    e.row = get_le<std::uint32_t>(is);
    e.col = get_le<std::uint32_t>(is);
    e.value = get_le<std::uint32_t>(is);
    t.push_back(e);
  }
  auto m = SparseMatrix::from_triplets(rows, cols, prime, std::move(t));
  if (m.nnz() != nnz) throw InvalidArgument("matrix cache: duplicate or zero entries in " + path);
  return m;
}

}  // namespace koszul
