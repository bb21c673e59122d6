#include "koszul/koszul.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <sstream>

#include "koszul/errors.hpp"

namespace koszul {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t choose_or_zero(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------
// WedgeBasis

WedgeBasis::WedgeBasis(std::size_t n, long long p) : n_(n) {
  if (p < 0 || static_cast<std::size_t>(p) > n) return;
  valid_ = true;
  p_ = static_cast<std::size_t>(p);
  size_ = binomial(n, p_);
  choose_.assign(n + 1, std::vector<std::size_t>(p_ + 2, 0));
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = 0; b <= p_ + 1; ++b) choose_[a][b] = binomial(a, b);
  subsets_.reserve(size_ * p_);
  std::vector<std::uint32_t> s(p_);
  for (std::size_t i = 0; i < p_; ++i) s[i] = static_cast<std::uint32_t>(i);
  for (std::size_t r = 0; r < size_; ++r) {
    subsets_.insert(subsets_.end(), s.begin(), s.end());
    for (std::size_t i = p_; i-- > 0;) {
      if (s[i] < n - p_ + i) {
        ++s[i];
        for (std::size_t j = i + 1; j < p_; ++j) s[j] = s[j - 1] + 1;
        break;
      }
    }
  }
}

std::size_t WedgeBasis::rank(std::span<const std::uint32_t> subset) const {
  // lex rank = C(n,p) - 1 - sum_i C(n-1-s_i, p-i)
  std::size_t acc = 0;
  for (std::size_t i = 0; i < p_; ++i) acc += choose_[n_ - 1 - subset[i]][p_ - i];
  return size_ - 1 - acc;
}

// ---------------------------------------------------------------------------
// Assembly

SparseMatrix assemble_differential(const SectionSpace& v, const SectionSpace& wq, const SectionSpace& wq1, long long p) {
  const std::size_t n = v.dim(), hq = wq.dim(), hq1 = wq1.dim();
  const std::uint32_t prime = v.curve().field().prime();
  const auto rows = choose_or_zero(static_cast<long long>(n), p - 1) * hq1;
  const auto cols = choose_or_zero(static_cast<long long>(n), p) * hq;
  SparseMatrix empty(rows, cols, prime);
  empty.row_block = hq1;
  empty.col_block = hq;
  if (p <= 0 || rows == 0 || cols == 0) return empty;

  const auto table = product_table(v, wq, wq1);
  const WedgeBasis src(n, p), tgt(n, p - 1);
  const std::size_t pp = src.p();
  std::vector<Triplet> t;
  std::size_t estimate = 0;
  for (const auto& c : table) estimate += c.size();
  t.reserve(src.size() * pp * estimate / std::max<std::size_t>(n, 1));
  std::vector<std::uint32_t> face(pp > 0 ? pp - 1 : 0);
  for (std::size_t s = 0; s < src.size(); ++s) {
    const auto subset = src.unrank(s);
    for (std::size_t k = 0; k < pp; ++k) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < pp; ++i)
        if (i != k) face[w++] = subset[i];
      const std::size_t trow = tgt.rank(face);
      const bool negative = k % 2 == 1;  // (-1)^(k+1) with k counted from 1
      const std::size_t vi = subset[k];
      for (std::size_t j = 0; j < hq; ++j)
        for (const auto& [c, val] : table[vi * hq + j]) {
          const std::uint32_t value = negative ? prime - val : val;
          t.push_back({static_cast<std::uint32_t>(trow * hq1 + c), static_cast<std::uint32_t>(s * hq + j), value});
        }
    }
  }
  auto m = SparseMatrix::from_triplets(rows, cols, prime, std::move(t));
  m.row_block = hq1;
  m.col_block = hq;
  return m;
}

// ---------------------------------------------------------------------------
// KoszulComplex

KoszulComplex::KoszulComplex(std::shared_ptr<const CurveModel> curve, DivisorSpec b, DivisorSpec l, int max_q,
                             KoszulOptions options)
    : curve_(std::move(curve)), b_(b.normalized()), l_(l.normalized()), max_q_(max_q), options_(std::move(options)) {
  if (max_q < 0) throw InvalidArgument("max_q must be nonnegative");
  if (!l_.representable()) throw NotRepresentable("L = " + l_.to_string() + " has no section space");
  std::vector<DivisorSpec> needed{l_};
  std::vector<DivisorSpec> twists;
  for (int q = -1; q <= max_q + 1; ++q) {
    auto d = b_ + l_.times(q);
    twists.push_back(d);
    if (d.representable() && d.base >= 0 && d.degree(*curve_) >= 0) needed.push_back(d);
  }
  sample_ = std::make_shared<const SampleSet>(
      choose_sample(*curve_, required_guard(*curve_, needed), options_.seed, support_of(needed)));
  v_ = std::make_shared<const SectionSpace>(riemann_roch_space(curve_, l_, sample_));
  for (const auto& d : twists) {
    if (d.degree(*curve_) < 0 || d.representable())
      w_.push_back(std::make_shared<const SectionSpace>(
          riemann_roch_space(curve_, d.representable() ? d : DivisorSpec::multiple(-1), sample_)));
    else
      w_.push_back(nullptr);
  }
}

const SectionSpace& KoszulComplex::w(int q) const {
  if (q < -1 || q > max_q_ + 1) throw InvalidArgument("q = " + std::to_string(q) + " outside the materialized range");
  const auto& s = w_[static_cast<std::size_t>(q + 1)];
  if (!s) throw NotRepresentable("B + " + std::to_string(q) + "L has no section space");
  return *s;
}

bool KoszulComplex::is_zero_map(long long p, int q) const {
  if (p <= 0 || p > static_cast<long long>(n())) return true;
  if (q < -1 || q + 1 > max_q_ + 1) throw InvalidArgument("differential outside the materialized range");
  return w(q).dim() == 0 || w(q + 1).dim() == 0;
}

MatrixShape KoszulComplex::shape(long long p, int q) const {
  MatrixShape s;
  const auto h = [&](int k) -> std::size_t {
    if (k < -1 || k > max_q_ + 1) return 0;
    return w_[static_cast<std::size_t>(k + 1)] ? w_[static_cast<std::size_t>(k + 1)]->dim() : 0;
  };
  s.rows = choose_or_zero(static_cast<long long>(n()), p - 1) * h(q + 1);
  s.cols = choose_or_zero(static_cast<long long>(n()), p) * h(q);
  return s;
}

std::string KoszulComplex::cache_path(long long p, int q) const {
  std::ostringstream key;
  key << curve_->id() << '|' << b_.to_string() << '|' << l_.to_string() << '|' << p << '|' << q << '|'
      << curve_->field().prime() << '|' << options_.seed;
  std::ostringstream name;
  name << "delta_" << std::hex << fnv1a(key.str()) << ".kzsm";
  return (std::filesystem::path(options_.cache_dir) / name.str()).string();
}

SparseMatrix KoszulComplex::differential(long long p, int q) const {
  if (is_zero_map(p, q)) {
    const auto s = shape(p, q);
    return SparseMatrix(s.rows, s.cols, curve_->field().prime());
  }
  if (!options_.cache_dir.empty()) {
    const auto path = cache_path(p, q);
    if (std::filesystem::exists(path)) {
      auto m = read_matrix_cache(path);
      m.row_block = w(q + 1).dim();
      m.col_block = w(q).dim();
      return m;
    }
    auto m = assemble_differential(*v_, w(q), w(q + 1), p);
    std::filesystem::create_directories(options_.cache_dir);
    write_matrix_cache(path, m);
    return m;
  }
  return assemble_differential(*v_, w(q), w(q + 1), p);
}

KoszulComplex::RankInfo KoszulComplex::compute_rank(long long p, int q) const {
  if (is_zero_map(p, q)) return {};
  const auto m = differential(p, q);
  switch (options_.method) {
    case RankMethod::wiedemann: return {rank_wiedemann(m, options_.seed).rank, m.nnz()};
    case RankMethod::dense_oracle: return {rank_dense_oracle(m, Arithmetic::mod_p).rank, m.nnz()};
    case RankMethod::elimination: break;
  }
  return {rank_sparse(m, options_.budget).rank, m.nnz()};
}

std::uint64_t KoszulComplex::rank(long long p, int q) const { return rank_info(p, q).rank; }

KoszulComplex::RankInfo KoszulComplex::rank_info(long long p, int q) const {
  std::shared_future<RankInfo> fut;
  std::promise<RankInfo> promise;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = ranks_.find({p, q});
    if (it == ranks_.end()) {
      fut = promise.get_future().share();
      ranks_.emplace(std::pair{p, q}, RankEntry{fut});
      owner = true;
    } else {
      fut = it->second.value;
    }
  }
  if (owner) {
    try {
      promise.set_value(compute_rank(p, q));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

KoszulCell KoszulComplex::cell(long long p, int q) const {
  const auto start = Clock::now();
  KoszulCell c;
  c.p = p;
  c.q = q;
  c.prime = curve_->field().prime();
  c.seed = options_.seed;
  c.method = to_string(options_.method);
  const auto hq = [&](int k) -> std::uint64_t {
    if (k < -1 || k > max_q_ + 1) throw InvalidArgument("q outside the materialized range");
    const auto& s = w_[static_cast<std::size_t>(k + 1)];
    if (!s) throw NotRepresentable("B + " + std::to_string(k) + "L has no section space");
    return s->dim();
  };
  c.dim_source = choose_or_zero(static_cast<long long>(n()), p) * (p >= 0 && p <= static_cast<long long>(n()) ? hq(q) : 0);
  c.out_shape = shape(p, q);
  c.in_shape = shape(p + 1, q - 1);
  const auto out_info = rank_info(p, q);
  c.rank_out = out_info.rank;
  c.out_shape.nnz = out_info.nnz;
  if (q - 1 >= -1) {
    const auto in_info = rank_info(p + 1, q - 1);
    c.rank_in = in_info.rank;
    c.in_shape.nnz = in_info.nnz;
  }
  const long long dim = static_cast<long long>(c.dim_source) - static_cast<long long>(c.rank_out) -
                        static_cast<long long>(c.rank_in);
  if (dim < 0) throw ModelInconsistency("negative Koszul cohomology dimension", 0, dim);
  c.dim_kpq = dim;
  if (p <= options_.max_complex_check_p && !is_zero_map(p, q) && q - 1 >= -1 && !is_zero_map(p + 1, q - 1)) {
    const auto out = differential(p, q);
    const auto in = differential(p + 1, q - 1);
    if (!out.multiply(in).is_zero())
      throw ModelInconsistency("composite of consecutive differentials is nonzero at p=" + std::to_string(p), 0, 1);
    c.complex_checked = true;
  }
  c.computed = true;
  c.elapsed_seconds = seconds_since(start);
  return c;
}

KoszulCell koszul_dim(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, const DivisorSpec& l, long long p,
                      int q, const KoszulOptions& options) {
  KoszulComplex complex(std::move(curve), b, l, std::max(q, 0), options);
  return complex.cell(p, q);
}

// ---------------------------------------------------------------------------
// Betti tables

const KoszulCell* BettiTable::at(long long p, int q) const {
  for (const auto& c : cells)
    if (c.p == p && c.q == q) return &c;
  return nullptr;
}

long long BettiTable::dim(long long p, int q) const {
  const auto* c = at(p, q);
  return c && c->computed ? c->dim_kpq : -1;
}

BettiTable betti_table(const KoszulComplex& complex, long long pmax, std::vector<int> q_list) {
  BettiTable t;
  t.curve_id = complex.curve().id();
  t.b = complex.b();
  t.l = complex.l();
  t.r = complex.r();
  t.gonality = complex.curve().gonality();
  t.pmax = pmax;
  t.q_list = q_list;
  std::vector<std::pair<long long, int>> jobs;
  for (int q : q_list)
    for (long long p = 0; p <= pmax; ++p) jobs.emplace_back(p, q);
  auto run = [&complex](long long p, int q) {
    try {
      return complex.cell(p, q);
    } catch (const Error& e) {
      KoszulCell c;
      c.p = p;
      c.q = q;
      c.prime = complex.curve().field().prime();
      c.seed = complex.options().seed;
      c.error = e.what();
      return c;
    }
  };
  const unsigned threads = std::max(1u, complex.options().threads);
  if (threads == 1) {
    for (auto [p, q] : jobs) t.cells.push_back(run(p, q));
    return t;
  }
  for (std::size_t i = 0; i < jobs.size(); i += threads) {
    std::vector<std::future<KoszulCell>> batch;
    for (std::size_t j = i; j < std::min(jobs.size(), i + threads); ++j)
      batch.push_back(std::async(std::launch::async, run, jobs[j].first, jobs[j].second));
    for (auto& f : batch) t.cells.push_back(f.get());
  }
  return t;
}

BettiTable betti_table(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, const DivisorSpec& l,
                       long long pmax, std::vector<int> q_list, const KoszulOptions& options) {
  const int max_q = q_list.empty() ? 0 : std::max(0, *std::max_element(q_list.begin(), q_list.end()));
  KoszulComplex complex(std::move(curve), b, l, max_q, options);
  return betti_table(complex, pmax, std::move(q_list));
}

// ---------------------------------------------------------------------------
// Strand boundary

const char* to_string(StrandStrategy s) { return s == StrandStrategy::direct ? "direct" : "dual"; }

StrandBoundary strand_boundary(std::shared_ptr<const CurveModel> curve, const DivisorSpec& l, StrandStrategy strategy,
                               std::optional<int> gonality, const KoszulOptions& options) {
  const int gon = gonality.value_or(curve->gonality());
  if (gon <= 0) throw InvalidArgument("strand boundary needs the gonality");
  const DivisorSpec b = strategy == StrandStrategy::direct ? DivisorSpec::multiple(0) : DivisorSpec::canonical(*curve);
  KoszulComplex complex(curve, b, l, 1, options);
  StrandBoundary out;
  out.strategy = strategy;
  const long long r = complex.r();
  out.expected = r - gon;
  std::map<long long, long long> dims;
  auto dim_at = [&](long long p) {
    if (p < 1 || p > r - 1) return 0LL;
    if (auto it = dims.find(p); it != dims.end()) return it->second;
    const auto c = complex.cell(strategy == StrandStrategy::direct ? p : r - 1 - p, 1);
    out.cells.push_back(c);
    out.p_values.push_back(p);
    return dims[p] = c.dim_kpq;
  };
  const long long p0 = std::max<long long>(out.expected, 1);
  dim_at(p0);
  dim_at(p0 + 1);
  long long p = p0;
  if (dim_at(p0) != 0) {
    while (p + 1 <= r - 1 && dim_at(p + 1) != 0) ++p;
  } else {
    while (p >= 1 && dim_at(p) == 0) --p;
  }
  out.last_nonzero_p = std::max<long long>(p, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json divisor_to_json(const CurveModel& curve, const DivisorSpec& d) {
  const auto dn = d.normalized();
  nlohmann::json j;
  j["base"] = dn.base;
  j["unit"] = curve.kind() == CurveKind::hyperelliptic ? "inf" : "H";
  j["degree"] = dn.degree(curve);
  auto pts = nlohmann::json::array();
  for (const auto& sp : dn.subtracted)
    pts.push_back({{"point", {sp.point.coords[0], sp.point.coords[1], sp.point.coords[2]}}, {"multiplicity", sp.multiplicity}});
  j["subtracted"] = pts;
  return j;
}

nlohmann::json cell_to_json(const KoszulCell& c, bool timings) {
  auto shape = [](const MatrixShape& s) { return nlohmann::json{{"rows", s.rows}, {"cols", s.cols}, {"nnz", s.nnz}}; };
  nlohmann::json j{{"p", c.p},
                   {"q", c.q},
                   {"computed", c.computed},
                   {"dim", c.computed ? nlohmann::json(c.dim_kpq) : nlohmann::json(nullptr)},
                   {"dim_source", c.dim_source},
                   {"rank_out", c.rank_out},
                   {"rank_in", c.rank_in}};
  nlohmann::json prov{{"prime", c.prime},
                      {"seed", c.seed},
                      {"method", c.method},
                      {"out_shape", shape(c.out_shape)},
                      {"in_shape", shape(c.in_shape)},
                      {"complex_checked", c.complex_checked}};
  if (timings) prov["elapsed_seconds"] = c.elapsed_seconds;
  j["provenance"] = prov;
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

nlohmann::json BettiTable::to_json(const CurveModel& curve, bool timings) const {
  nlohmann::json j;
  j["curve"] = curve_id;
  j["B"] = divisor_to_json(curve, b);
  j["L"] = divisor_to_json(curve, l);
  j["r"] = r;
  j["gonality"] = gonality;
  j["pmax"] = pmax;
  j["q_list"] = q_list;
  nlohmann::json grid;
  for (int q : q_list) {
    auto row = nlohmann::json::array();
    for (long long p = 0; p <= pmax; ++p) row.push_back(dim(p, q));
    grid[std::to_string(q)] = row;
  }
  j["grid"] = grid;
  auto cs = nlohmann::json::array();
  for (const auto& c : cells) cs.push_back(cell_to_json(c, timings));
  j["cells"] = cs;
  return j;
}

std::string BettiTable::to_csv() const {
  std::ostringstream os;
  os << "p\\q";
  for (int q : q_list) os << ',' << q;
  os << '\n';
  for (long long p = 0; p <= pmax; ++p) {
    os << p;
    for (int q : q_list) os << ',' << dim(p, q);
    os << '\n';
  }
  return os.str();
}

}  // namespace koszul
