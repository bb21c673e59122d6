#include "koszul/ample.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

#include "koszul/errors.hpp"

namespace koszul {

int EffectiveDivisor::degree() const {
  int d = 0;
  for (const auto& sp : points) d += sp.multiplicity;
  return d;
}

std::string EffectiveDivisor::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) os << " + ";
    if (points[i].multiplicity != 1) os << points[i].multiplicity << '*';
    os << points[i].point.to_string();
  }
  return points.empty() ? "0" : os.str();
}

const char* to_string(AmplenessOutcome outcome) {
  return outcome == AmplenessOutcome::failure_witness ? "failure_witness" : "no_failure_found";
}

namespace {

// Jet rows of the basis sections at a point (mult x h). At a point already
// subtracted m times from B the sections are functions vanishing to order m,
// so B is trivialized by t^m and the jets start at t^m.
Matrix section_jets(const SectionSpace& space, const PointOnCurve& pt, int mult) {
  const auto& field = space.curve().field();
  int shift = 0;
  for (const auto& sp : space.divisor().subtracted)
    if (sp.point == pt) shift = sp.multiplicity;
  const Matrix full = generator_jets(space.curve(), space.generators(), pt, shift + mult).multiply(space.coefficients(), field);
  Matrix out(static_cast<std::size_t>(mult), full.cols());
  for (std::size_t k = 0; k < out.rows(); ++k)
    for (std::size_t j = 0; j < out.cols(); ++j) out(k, j) = full(k + static_cast<std::size_t>(shift), j);
  return out;
}

// Rank of a handful of stacked rows.
class SmallRank {
 public:
  SmallRank(std::size_t cols, std::uint32_t prime) : cols_(cols), field_(prime) {}

  void clear() { rows_.clear(); }
  void add(std::span<const std::uint32_t> row) { rows_.emplace_back(row.begin(), row.end()); }

  std::size_t rank() {
    const std::uint64_t p = field_.prime();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_.size(); ++c) {
      std::size_t sel = r;
      while (sel < rows_.size() && rows_[sel][c] == 0) ++sel;
      if (sel == rows_.size()) continue;
      std::swap(rows_[r], rows_[sel]);
      const std::uint64_t inv = field_.invr(rows_[r][c]);
      for (std::size_t i = r + 1; i < rows_.size(); ++i) {
        if (rows_[i][c] == 0) continue;
        const std::uint64_t f = p - rows_[i][c] * inv % p;
        for (std::size_t j = c; j < cols_; ++j)
          rows_[i][j] = static_cast<std::uint32_t>((rows_[i][j] + f * rows_[r][j]) % p);
      }
      ++r;
    }
    return r;
  }

 private:
  std::size_t cols_;
  PrimeField field_;
  std::vector<std::vector<std::uint32_t>> rows_;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1ull << 62)) return 1ull << 62;
  }
  return r;
}

// Next composition of `total` into parts.size() parts within [1, cap], lex order.
bool next_composition(std::vector<int>& parts, int cap) {
  const std::size_t k = parts.size();
  // find rightmost position (not last) that can grow while the tail stays feasible
  for (std::size_t i = k - 1; i-- > 0;) {
    int tail = 0;
    for (std::size_t j = i + 1; j < k; ++j) tail += parts[j];
    const int remaining_after = tail - 1;  // after moving one unit into position i
    const auto slots = static_cast<int>(k - i - 1);
    if (parts[i] < cap && remaining_after >= slots) {
      ++parts[i];
      // fill the tail as lexicographically small as possible: ones, remainder at the end
      int rest = remaining_after;
      for (std::size_t j = k; j-- > i + 1;) {
        const int free_slots = static_cast<int>(j - i - 1);
        const int v = std::min(cap, rest - free_slots);
        parts[j] = v;
        rest -= v;
      }
      return true;
    }
  }
  return false;
}

// Lexicographically smallest composition, or empty when infeasible.
std::vector<int> first_composition(int total, std::size_t k, int cap) {
  if (k == 0 || static_cast<int>(k) > total || static_cast<long long>(k) * cap < total) return {};
  std::vector<int> parts(k, 1);
  int rest = total - static_cast<int>(k);
  for (std::size_t j = k; j-- > 0 && rest > 0;) {
    const int add = std::min(cap - 1, rest);
    parts[j] += add;
    rest -= add;
  }
  return parts;
}

bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SparseMatrix jet_matrix(const SectionSpace& space, const EffectiveDivisor& xi) {
  const auto& field = space.curve().field();
  for (std::size_t i = 0; i < xi.points.size(); ++i) {
    if (xi.points[i].multiplicity < 1) throw InvalidArgument("effective divisor needs positive multiplicities");
    for (std::size_t j = 0; j < i; ++j)
      if (xi.points[i].point == xi.points[j].point)
        throw InvalidArgument("point " + xi.points[i].point.to_string() + " repeated in divisor");
  }
  std::vector<Triplet> t;
  std::uint32_t row = 0;
  for (const auto& sp : xi.points) {
    const Matrix jets = section_jets(space, sp.point, sp.multiplicity);
    for (std::size_t k = 0; k < jets.rows(); ++k, ++row)
      for (std::size_t j = 0; j < jets.cols(); ++j)
        if (jets(k, j) != 0) t.push_back({row, static_cast<std::uint32_t>(j), jets(k, j)});
  }
  return SparseMatrix::from_triplets(row, space.dim(), field.prime(), std::move(t));
}

AmplenessVerdict is_p_very_ample(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, int p,
                                 const AmplenessOptions& options) {
  if (p < 0) throw InvalidArgument("p must be nonnegative");
  const int degree = p + 1;
  int m_max = std::max(1, options.m_max);
  if (curve->kind() == CurveKind::hyperelliptic && b.normalized() == DivisorSpec::canonical(*curve))
    m_max = std::max(m_max, degree);
  m_max = std::min(m_max, degree);
  m_max = std::min<int>(m_max, static_cast<int>(curve->options().max_expansion_order) + 1);

  const std::vector<DivisorSpec> bs{b};
  auto sample = std::make_shared<const SampleSet>(
      choose_sample(*curve, required_guard(*curve, bs), options.seed, support_of(bs)));
  const SectionSpace space = riemann_roch_space(curve, b, sample);
  const std::size_t h = space.dim();

  AmplenessVerdict verdict;
  verdict.p = p;
  verdict.h0 = h;
  verdict.coverage.multiplicity_ceiling = m_max;

  std::size_t e_bound = static_cast<std::size_t>(degree);
  while (binomial(e_bound + 1, degree) <= options.max_supports && e_bound < 2'000'000) ++e_bound;
  const auto listing = enumerate_points(*curve, std::max(e_bound, options.random_pool));
  const auto& all = listing.points;
  const std::size_t e = std::min(e_bound, all.size());
  verdict.coverage.support_pool = e;
  verdict.coverage.pool_is_all_points = listing.shortfall && e == all.size();

  std::unordered_map<std::size_t, Matrix> jets;
  auto jets_at = [&](std::size_t i) -> const Matrix& {
    auto it = jets.find(i);
    if (it == jets.end()) it = jets.emplace(i, section_jets(space, all[i], m_max)).first;
    return it->second;
  };

  SmallRank small(h, curve->field().prime());
  auto check = [&](std::span<const std::size_t> idx, std::span<const int> mult) {
    small.clear();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Matrix& j = jets_at(idx[k]);
      for (int r = 0; r < mult[k]; ++r) small.add(j.row(static_cast<std::size_t>(r)));
    }
    const std::size_t rank = small.rank();
    if (rank < static_cast<std::size_t>(degree)) {
      EffectiveDivisor xi;
      for (std::size_t k = 0; k < idx.size(); ++k) xi.points.push_back({all[idx[k]], mult[k]});
      verdict.outcome = AmplenessOutcome::failure_witness;
      verdict.witness = std::move(xi);
      verdict.witness_rank = rank;
      return true;
    }
    return false;
  };

  for (std::size_t k = 1; k <= static_cast<std::size_t>(degree) && k <= e; ++k) {
    const auto first = first_composition(degree, k, m_max);
    if (first.empty()) continue;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    do {
      auto mult = first;
      do {
        ++verdict.coverage.exhaustive;
        if (check(idx, mult)) return verdict;
      } while (next_composition(mult, m_max));
    } while (next_subset(idx, e));
  }

  const std::size_t random_pool = std::min(all.size(), std::max(options.random_pool, e));
  if (random_pool > 0) {
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ull);
    for (std::size_t t = 0; t < options.random_divisors; ++t) {
      std::size_t k;
      std::vector<int> mult;
      do {
        k = 1 + uniform_below(rng, std::min<std::size_t>(degree, random_pool));
        mult.assign(k, 0);
        int sum = 0;
        for (auto& m : mult) sum += (m = 1 + static_cast<int>(uniform_below(rng, m_max)));
        if (sum == degree) break;
      } while (true);
      std::vector<std::size_t> idx;
      while (idx.size() < k) {
        const auto i = uniform_below(rng, random_pool);
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
      }
      ++verdict.coverage.sampled;
      if (check(idx, mult)) return verdict;
    }
  }

  std::ostringstream scope;
  scope << "no failure among " << verdict.coverage.exhaustive << " divisors supported on the first " << e
        << " rational points (multiplicities <= " << m_max << ") and " << verdict.coverage.sampled
        << " random rational divisors; not a proof over the full symmetric product";
  verdict.scope = scope.str();
  return verdict;
}

std::size_t independent_jet_rank(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b,
                                 const EffectiveDivisor& xi, std::uint64_t seed) {
  const std::vector<DivisorSpec> bs{b};
  auto sample = std::make_shared<const SampleSet>(choose_sample(*curve, required_guard(*curve, bs), seed, support_of(bs)));
  const auto space = riemann_roch_space(curve, b, sample);
  return rank_dense_oracle(jet_matrix(space, xi), Arithmetic::mod_p).rank;
}

DivisorSpec inner_projection(const CurveModel& curve, const DivisorSpec& b, std::span<const PointOnCurve> points) {
  DivisorSpec out = b.normalized();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!curve.contains(points[i])) throw InvalidArgument("projection point " + points[i].to_string() + " is not on the curve");
    for (std::size_t j = 0; j < i; ++j)
      if (points[i] == points[j]) throw InvalidArgument("projection point " + points[i].to_string() + " repeated");
    for (const auto& sp : out.subtracted)
      if (sp.point == points[i])
        throw InvalidArgument("projection point " + points[i].to_string() + " already subtracted");
  }
  for (const auto& pt : points) out.subtracted.push_back({pt, 1});
  return out.normalized();
}

}  // namespace koszul
