#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "koszul/sections.hpp"
#include "koszul/sparse.hpp"

namespace koszul {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Strictly increasing p-subsets of {0..n-1} in lexicographic order.
class WedgeBasis {
 public:
  WedgeBasis(std::size_t n, long long p);

  /// False when p < 0 or p > n; the basis is then empty.
  bool valid() const { return valid_; }
  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  std::size_t size() const { return size_; }

  std::size_t rank(std::span<const std::uint32_t> subset) const;
  std::span<const std::uint32_t> unrank(std::size_t r) const { return {subsets_.data() + r * p_, p_}; }

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::size_t size_ = 0;
  bool valid_ = false;
  std::vector<std::uint32_t> subsets_;  // size_ * p_ entries
  std::vector<std::vector<std::size_t>> choose_;
};

/// Matrix of  e_{i_1..i_p} (x) w  ->  sum_k (-1)^(k+1) e_{..^i_k..} (x) (v_{i_k} w)
/// with rows (wedge rank of the (p-1)-subset) * dim Wq1 + index, columns
/// (wedge rank of the p-subset) * dim Wq + index. Throws GuardViolation when a
/// product is not contained in Wq1.
SparseMatrix assemble_differential(const SectionSpace& v, const SectionSpace& wq, const SectionSpace& wq1, long long p);

struct KoszulOptions {
  std::uint64_t seed = 0;
  RankMethod method = RankMethod::elimination;
  RankBudget budget;
  int max_complex_check_p = 4;  // verify delta o delta = 0 for p up to this
  std::string cache_dir;        // binary matrix cache; empty disables it
  unsigned threads = 1;         // concurrent cells in betti_table
};

struct MatrixShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nnz = 0;
};

struct KoszulCell {
  long long p = 0;
  int q = 0;
  std::uint64_t dim_source = 0;  // C(n, p) * h0(B + qL)
  std::uint64_t rank_out = 0;    // rank of delta_{p,q}
  std::uint64_t rank_in = 0;     // rank of delta_{p+1,q-1}
  long long dim_kpq = -1;
  bool computed = false;
  std::string error;  // set when the cell could not be computed
  // provenance
  std::uint32_t prime = 0;
  std::uint64_t seed = 0;
  MatrixShape out_shape;
  MatrixShape in_shape;
  std::string method;
  bool complex_checked = false;
  double elapsed_seconds = 0;
};

/// Sections of L and of B + qL on one shared sample set, with memoized
/// differential ranks. Safe to query from several threads.
class KoszulComplex {
 public:
  /// Materializes W_q for -1 <= q <= max_q + 1.
  KoszulComplex(std::shared_ptr<const CurveModel> curve, DivisorSpec b, DivisorSpec l, int max_q,
                KoszulOptions options = {});

  const CurveModel& curve() const { return *curve_; }
  const DivisorSpec& b() const { return b_; }
  const DivisorSpec& l() const { return l_; }
  const KoszulOptions& options() const { return options_; }
  std::size_t n() const { return v_->dim(); }
  long long r() const { return static_cast<long long>(n()) - 1; }
  int max_q() const { return max_q_; }

  const SectionSpace& v() const { return *v_; }
  /// H^0(B + qL); q outside the materialized range throws InvalidArgument.
  const SectionSpace& w(int q) const;

  /// delta_{p,q}: wedge^p V (x) W_q -> wedge^{p-1} V (x) W_{q+1}
  SparseMatrix differential(long long p, int q) const;
  MatrixShape shape(long long p, int q) const;
  std::uint64_t rank(long long p, int q) const;
  KoszulCell cell(long long p, int q) const;

 private:
  struct RankInfo {
    std::uint64_t rank = 0;
    std::size_t nnz = 0;
  };
  struct RankEntry {
    std::shared_future<RankInfo> value;
  };

  RankInfo compute_rank(long long p, int q) const;
  RankInfo rank_info(long long p, int q) const;
  bool is_zero_map(long long p, int q) const;
  std::string cache_path(long long p, int q) const;

  std::shared_ptr<const CurveModel> curve_;
  DivisorSpec b_;
  DivisorSpec l_;
  int max_q_;
  KoszulOptions options_;
  std::shared_ptr<const SampleSet> sample_;
  std::shared_ptr<const SectionSpace> v_;
  std::vector<std::shared_ptr<const SectionSpace>> w_;  // index q + 1
  mutable std::mutex mutex_;
  mutable std::map<std::pair<long long, int>, RankEntry> ranks_;
};

/// Single cell; builds a complex covering q.
KoszulCell koszul_dim(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, const DivisorSpec& l, long long p,
                      int q, const KoszulOptions& options = {});

struct BettiTable {
  std::string curve_id;
  DivisorSpec b;
  DivisorSpec l;
  long long r = 0;
  int gonality = 0;
  long long pmax = 0;
  std::vector<int> q_list;
  std::vector<KoszulCell> cells;  // q-major, p ascending

  const KoszulCell* at(long long p, int q) const;
  /// Dimension, or -1 when the cell is missing or failed.
  long long dim(long long p, int q) const;
  nlohmann::json to_json(const CurveModel& curve, bool timings = false) const;
  std::string to_csv() const;
};

/// Cells for p in [0, pmax] and each q; cell errors are recorded in place.
BettiTable betti_table(const KoszulComplex& complex, long long pmax, std::vector<int> q_list);
BettiTable betti_table(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, const DivisorSpec& l,
                       long long pmax, std::vector<int> q_list, const KoszulOptions& options = {});

enum class StrandStrategy { direct, dual };

struct StrandBoundary {
  long long last_nonzero_p = 0;  // largest p with K_{p,1}(C; L) != 0 among those computed
  long long expected = 0;        // r - gon
  StrandStrategy strategy = StrandStrategy::direct;
  std::vector<KoszulCell> cells;  // in the dual strategy these are cells of K_{r-1-p,1}(C, K; L)
  std::vector<long long> p_values;  // p of K_{p,1}(C; L) represented by each cell
};

/// Locates the end of the linear strand around p = r - gon, computing
/// K_{p,1}(C; L) directly or as K_{r-1-p,1}(C, K; L).
StrandBoundary strand_boundary(std::shared_ptr<const CurveModel> curve, const DivisorSpec& l, StrandStrategy strategy,
                               std::optional<int> gonality = std::nullopt, const KoszulOptions& options = {});

nlohmann::json divisor_to_json(const CurveModel& curve, const DivisorSpec& d);
nlohmann::json cell_to_json(const KoszulCell& cell, bool timings = false);
const char* to_string(StrandStrategy s);

}  // namespace koszul
