#include "koszul/sections.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>

#include "koszul/errors.hpp"

namespace koszul {

// ---------------------------------------------------------------------------
// DivisorSpec

DivisorSpec DivisorSpec::normalized() const {
  DivisorSpec out{base, {}};
  auto pts = subtracted;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.point < b.point; });
  for (const auto& sp : pts) {
    if (!out.subtracted.empty() && out.subtracted.back().point == sp.point)
      out.subtracted.back().multiplicity += sp.multiplicity;
    else
      out.subtracted.push_back(sp);
  }
  std::erase_if(out.subtracted, [](const auto& sp) { return sp.multiplicity == 0; });
  return out;
}

int DivisorSpec::subtracted_degree() const {
  int total = 0;
  for (const auto& sp : subtracted) total += sp.multiplicity;
  return total;
}

bool DivisorSpec::representable() const {
  return std::all_of(subtracted.begin(), subtracted.end(), [](const auto& sp) { return sp.multiplicity > 0; });
}

DivisorSpec DivisorSpec::operator+(const DivisorSpec& other) const {
  DivisorSpec out{base + other.base, subtracted};
  out.subtracted.insert(out.subtracted.end(), other.subtracted.begin(), other.subtracted.end());
  return out.normalized();
}

DivisorSpec DivisorSpec::operator-(const DivisorSpec& other) const { return *this + other.times(-1); }

DivisorSpec DivisorSpec::times(int k) const {
  DivisorSpec out{base * k, subtracted};
  for (auto& sp : out.subtracted) sp.multiplicity *= k;
  return out.normalized();
}

std::string DivisorSpec::to_string() const {
  std::ostringstream os;
  os << base << "*U";
  for (const auto& sp : normalized().subtracted) {
    const int m = sp.multiplicity;
    os << (m > 0 ? " - " : " + ");
    if (std::abs(m) != 1) os << std::abs(m) << '*';
    os << sp.point.to_string();
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Sample sets

namespace {

bool same_fiber(const CurveModel& curve, const PointOnCurve& a, const PointOnCurve& b) {
  if (curve.kind() == CurveKind::hyperelliptic) return a.x() == b.x();
  return a == b;
}

}  // namespace

bool SampleSet::contains(const PointOnCurve& pt) const {
  return std::find(points.begin(), points.end(), pt) != points.end();
}

SampleSet choose_sample(const CurveModel& curve, int guard, std::uint64_t seed, std::span<const PointOnCurve> excluded) {
  if (guard < 0) throw InvalidArgument("guard degree must be nonnegative");
  const std::size_t need = static_cast<std::size_t>(guard) + 1;
  const std::size_t pool_size = 4 * need + 2 * excluded.size() + 64;
  auto pool = enumerate_points(curve, pool_size).points;
  std::erase_if(pool, [&](const PointOnCurve& pt) {
    if (pt.at_infinity()) return true;
    return std::any_of(excluded.begin(), excluded.end(), [&](const auto& e) { return same_fiber(curve, pt, e); });
  });
  if (pool.size() < need) throw Shortfall(need, pool.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < need; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  pool.resize(need);
  std::sort(pool.begin(), pool.end());
  return SampleSet{std::move(pool), guard, seed, {excluded.begin(), excluded.end()}};
}

int required_guard(const CurveModel& curve, std::span<const DivisorSpec> divisors) {
  int guard = 0;
  for (const auto& d : divisors) guard = std::max(guard, d.base_degree(curve));
  return guard;
}

std::vector<PointOnCurve> support_of(std::span<const DivisorSpec> divisors) {
  std::vector<PointOnCurve> out;
  for (const auto& d : divisors)
    for (const auto& sp : d.subtracted) out.push_back(sp.point);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Jets

Matrix generator_jets(const CurveModel& curve, std::span<const Monomial> generators, const PointOnCurve& pt, int mult) {
  if (mult < 1) throw InvalidArgument("jet multiplicity must be at least 1");
  const auto order = static_cast<std::size_t>(mult - 1);
  if (order > curve.options().max_expansion_order)
    throw InvalidArgument("multiplicity " + std::to_string(mult) + " exceeds the local expansion truncation");
  const auto exp = local_expansion(curve, pt, order);
  Matrix jets(static_cast<std::size_t>(mult), generators.size());
  for (std::size_t j = 0; j < generators.size(); ++j) {
    const auto s = expand_monomial(curve, generators[j], exp);
    for (std::size_t k = 0; k <= order && k < s.size(); ++k) jets(k, j) = s[k];
  }
  return jets;
}

// ---------------------------------------------------------------------------
// Section spaces

namespace {

long long binom2(long long m) { return m < 0 ? 0 : (m + 2) * (m + 1) / 2; }

Matrix stack(const std::vector<Matrix>& blocks, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Matrix out(rows, cols);
  std::size_t r = 0;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.rows(); ++i, ++r) std::copy(b.row(i).begin(), b.row(i).end(), out.row(r).begin());
  return out;
}

// Column basis in reduced column echelon form.
Matrix column_echelon(const Matrix& c, const PrimeField& field) {
  Matrix t = c.transposed();
  const auto pivots = rref(t, field);
  Matrix out(c.rows(), pivots.size());
  for (std::size_t k = 0; k < pivots.size(); ++k)
    for (std::size_t i = 0; i < c.rows(); ++i) out(i, k) = t(k, i);
  return out;
}

}  // namespace

SectionSpace riemann_roch_space(std::shared_ptr<const CurveModel> curve_ptr, const DivisorSpec& d,
                                std::shared_ptr<const SampleSet> sample_ptr) {
  if (!curve_ptr || !sample_ptr) throw InvalidArgument("section space needs a curve and a sample set");
  if (!d.representable()) throw NotRepresentable("divisor " + d.to_string() + " adds points; no section space");
  const CurveModel& curve = *curve_ptr;
  const SampleSet& sample = *sample_ptr;
  const PrimeField& field = curve.field();
  const int g = curve.genus();

  SectionSpace s;
  s.curve_ = curve_ptr;
  s.sample_ = sample_ptr;
  s.divisor_ = d.normalized();
  const DivisorSpec& div = s.divisor_;
  const std::size_t n = sample.size();
  const int deg = div.degree(curve);

  if (div.base < 0 || deg < 0) {
    s.evaluation_ = Matrix(n, 0);
    return s;
  }
  if (div.base_degree(curve) > sample.guard)
    throw GuardViolation("base degree " + std::to_string(div.base_degree(curve)) + " exceeds sample guard " +
                         std::to_string(sample.guard));
  for (const auto& sp : div.subtracted) {
    if (!curve.contains(sp.point)) throw InvalidArgument("subtracted point " + sp.point.to_string() + " is not on the curve");
    if (sample.contains(sp.point))
      throw GuardViolation("subtracted point " + sp.point.to_string() + " is a sample point");
  }

  // Independent generators, greedily in generator order.
  const auto all = curve.generators(div.base);
  Matrix eval_all(n, all.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < all.size(); ++j) eval_all(i, j) = curve.evaluate(all[j], sample.points[i]).value;
  Matrix reduced = eval_all;
  const auto pivots = rref(reduced, field);
  long long expected;
  if (curve.kind() == CurveKind::hyperelliptic) {
    expected = static_cast<long long>(all.size());
    if (div.base > 2 * g - 2 && expected != div.base - g + 1)
      throw ModelInconsistency("gap-sequence count for " + std::to_string(div.base) + "*inf", div.base - g + 1, expected);
  } else {
    expected = binom2(div.base) - binom2(div.base - curve.plane_degree());
  }
  if (static_cast<long long>(pivots.size()) != expected)
    throw ModelInconsistency("independent generators of the base class " + std::to_string(div.base), expected,
                             static_cast<long long>(pivots.size()));
  for (auto c : pivots) s.generators_.push_back(all[c]);
  const Matrix eval_gen = eval_all.select_columns(pivots);
  const std::size_t gcount = s.generators_.size();

  if (div.subtracted.empty()) {
    s.coefficients_ = Matrix::identity(gcount);
  } else {
    std::vector<Matrix> blocks;
    for (const auto& sp : div.subtracted) blocks.push_back(generator_jets(curve, s.generators_, sp.point, sp.multiplicity));
    s.coefficients_ = column_echelon(kernel(stack(blocks, gcount), field), field);
  }
  s.evaluation_ = eval_gen.multiply(s.coefficients_, field);
  const auto h = static_cast<long long>(s.coefficients_.cols());

  // Riemann-Roch audit; Clifford's bound in the special range.
  if (deg > 2 * g - 2) {
    if (h != deg - g + 1) throw ModelInconsistency("h0 of nonspecial " + div.to_string(), deg - g + 1, h);
  } else if (h < std::max(0, deg - g + 1) || 2 * (h - 1) > deg) {
    throw ModelInconsistency("h0 of special " + div.to_string() + " outside the Riemann-Roch/Clifford range",
                             std::max(0, deg - g + 1), h);
  }

  // Rows where the evaluation matrix is invertible, for solving.
  Matrix et = s.evaluation_.transposed();
  s.solve_rows_ = rref(et, field);
  if (static_cast<long long>(s.solve_rows_.size()) != h)
    throw GuardViolation("evaluation at the sample set is not injective on " + div.to_string());
  const auto hs = static_cast<std::size_t>(h);
  Matrix aug(hs, 2 * hs);
  for (std::size_t i = 0; i < hs; ++i) {
    for (std::size_t k = 0; k < hs; ++k) aug(i, k) = s.evaluation_(s.solve_rows_[i], k);
    aug(i, hs + i) = 1;
  }
  rref(aug, field, hs);
  s.solve_inverse_ = Matrix(hs, hs);
  for (std::size_t i = 0; i < hs; ++i)
    for (std::size_t k = 0; k < hs; ++k) s.solve_inverse_(i, k) = aug(i, hs + k);
  return s;
}

Coordinates SectionSpace::coordinates(std::span<const std::uint32_t> values) const {
  const auto& field = curve_->field();
  const std::uint64_t p = field.prime();
  const std::size_t n = evaluation_.rows(), h = evaluation_.cols();
  if (values.size() != n) throw InvalidArgument("coordinate solve: vector length differs from sample size");
  std::vector<std::uint64_t> c(h, 0);
  for (std::size_t i = 0; i < h; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < h; ++k) acc = (acc + std::uint64_t{solve_inverse_(i, k)} * values[solve_rows_[k]]) % p;
    c[i] = acc;
  }
  for (std::size_t r = 0; r < n; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < h; ++k) acc = (acc + std::uint64_t{evaluation_(r, k)} * c[k]) % p;
    if (acc != values[r])
      throw GuardViolation("vector is not in the section space of " + divisor_.to_string());
  }
  Coordinates out;
  for (std::size_t k = 0; k < h; ++k)
    if (c[k] != 0) out.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(c[k]));
  return out;
}

std::vector<Coordinates> product_table(const SectionSpace& a, const SectionSpace& b, const SectionSpace& target) {
  if (a.sample_ptr() != b.sample_ptr() || a.sample_ptr() != target.sample_ptr())
    throw InvalidArgument("product of section spaces on different sample sets");
  const auto& field = a.curve().field();
  const std::size_t n = a.sample().size();
  std::vector<Coordinates> table;
  table.reserve(a.dim() * b.dim());
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) {
      for (std::size_t r = 0; r < n; ++r) v[r] = field.mulr(a.evaluation()(r, i), b.evaluation()(r, j));
      table.push_back(target.coordinates(v));
    }
  return table;
}

SectionSpace multiply(const SectionSpace& a, const SectionSpace& b) {
  auto target = riemann_roch_space(a.curve_ptr(), a.divisor() + b.divisor(), a.sample_ptr());
  product_table(a, b, target);
  return target;
}

// ---------------------------------------------------------------------------
// Cohomology

CohomologyDims h0_h1(std::shared_ptr<const CurveModel> curve, const DivisorSpec& d,
                     std::shared_ptr<const SampleSet> sample) {
  const int g = curve->genus();
  const int deg = d.degree(*curve);
  const DivisorSpec dual = DivisorSpec::canonical(*curve) - d;
  std::optional<int> h0, h1_dual;
  if (d.representable()) h0 = static_cast<int>(riemann_roch_space(curve, d, sample).dim());
  if (dual.representable()) h1_dual = static_cast<int>(riemann_roch_space(curve, dual, sample).dim());
  if (!h0 && !h1_dual)
    throw NotComputable("neither " + d.to_string() + " nor its Serre dual has a section space");
  CohomologyDims out;
  if (h0) {
    out.h0 = *h0;
    out.h1 = *h0 - deg + g - 1;
    if (h1_dual) {
      if (*h1_dual != out.h1) throw ModelInconsistency("Serre duality for " + d.to_string(), *h1_dual, out.h1);
      out.serre_checked = true;
    }
  } else {
    out.h1 = *h1_dual;
    out.h0 = out.h1 + deg - g + 1;
  }
  if (deg > 2 * g - 2 && out.h1 != 0) throw ModelInconsistency("h1 of nonspecial " + d.to_string(), 0, out.h1);
  return out;
}

CohomologyDims h0_h1(std::shared_ptr<const CurveModel> curve, const DivisorSpec& d, std::uint64_t seed) {
  const DivisorSpec dual = DivisorSpec::canonical(*curve) - d;
  std::vector<DivisorSpec> both{d};
  if (dual.representable()) both.push_back(dual);
  const auto excluded = support_of(both);
  auto sample = std::make_shared<const SampleSet>(choose_sample(*curve, required_guard(*curve, both), seed, excluded));
  return h0_h1(std::move(curve), d, std::move(sample));
}

std::string to_csv(const SectionSpace& space) {
  std::ostringstream os;
  os << "x,y,z";
  for (std::size_t k = 0; k < space.dim(); ++k) os << ",s" << k;
  os << '\n';
  const auto& pts = space.sample().points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << pts[i].coords[0] << ',' << pts[i].coords[1] << ',' << pts[i].coords[2];
    for (std::size_t k = 0; k < space.dim(); ++k) os << ',' << space.evaluation()(i, k);
    os << '\n';
  }
  return os.str();
}

}  // namespace koszul
