#include "koszul/curve.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "koszul/errors.hpp"

namespace koszul {

std::string PointOnCurve::to_string() const {
  std::ostringstream os;
  os << '(' << coords[0] << ':' << coords[1] << ':' << coords[2] << ')';
  return os.str();
}

namespace {

std::uint32_t pow_u(const PrimeField& f, std::uint32_t base, int e) {
  return f.pow(Fp{base}, static_cast<std::uint64_t>(e)).value;
}

// F and its partials at projective coordinates.
std::uint32_t eval_form(const PrimeField& f, const std::vector<PlaneTerm>& terms,
                        const std::array<std::uint32_t, 3>& c) {
  std::uint32_t acc = 0;
  for (const auto& t : terms) {
    std::uint32_t v = t.coef;
    for (int k = 0; k < 3; ++k) v = f.mulr(v, pow_u(f, c[k], t.exp[k]));
    acc = f.addr(acc, v);
  }
  return acc;
}

std::uint32_t eval_partial(const PrimeField& f, const std::vector<PlaneTerm>& terms,
                           const std::array<std::uint32_t, 3>& c, int var) {
  std::uint32_t acc = 0;
  for (const auto& t : terms) {
    if (t.exp[var] == 0) continue;
    std::uint32_t v = f.mulr(t.coef, f.from_int(t.exp[var]).value);
    for (int k = 0; k < 3; ++k) v = f.mulr(v, pow_u(f, c[k], t.exp[k] - (k == var ? 1 : 0)));
    acc = f.addr(acc, v);
  }
  return acc;
}

std::string poly_symmetric(const PrimeField& f, const Poly& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << f.symmetric(Fp{a[i]});
  os << ']';
  return os.str();
}

std::vector<PlaneTerm> normalize_terms(const PrimeField& f, int degree, const std::vector<PlaneTerm>& terms) {
  std::map<std::array<int, 3>, std::uint32_t> acc;
  for (const auto& t : terms) {
    if (t.exp[0] < 0 || t.exp[1] < 0 || t.exp[2] < 0 || t.exp[0] + t.exp[1] + t.exp[2] != degree)
      throw InvalidArgument("plane curve term is not homogeneous of degree " + std::to_string(degree));
    acc[t.exp] = f.addr(acc[t.exp], t.coef % f.prime());
  }
  std::vector<PlaneTerm> out;
  // descending exponent order: x^D first
  for (auto it = acc.rbegin(); it != acc.rend(); ++it)
    if (it->second != 0) out.push_back({it->first, it->second});
  return out;
}

void audit_plane(CurveModel& curve, SmoothnessAudit& audit);

}  // namespace

std::string CurveModel::id() const {
  std::ostringstream os;
  if (kind_ == CurveKind::hyperelliptic) {
    os << "hyperelliptic(g=" << genus_ << ",p=" << field_.prime() << ",f=" << poly_symmetric(field_, f_) << ')';
  } else {
    os << "plane(D=" << degree_ << ",p=" << field_.prime() << ",F=";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      os << (i ? "+" : "") << field_.symmetric(Fp{t.coef}) << "*x^" << t.exp[0] << "y^" << t.exp[1] << "z^"
         << t.exp[2];
    }
    os << ')';
  }
  return os.str();
}

CurveModel CurveModel::with_prime(std::uint32_t prime) const {
  PrimeField other(prime);
  if (kind_ == CurveKind::hyperelliptic) {
    Poly g(f_.size());
    for (std::size_t i = 0; i < f_.size(); ++i) g[i] = other.from_int(field_.symmetric(Fp{f_[i]})).value;
    CurveModel c = make_hyperelliptic(other, genus_, g, options_);
    c.seed_ = seed_;
    return c;
  }
  std::vector<PlaneTerm> terms;
  for (const auto& t : terms_) terms.push_back({t.exp, other.from_int(field_.symmetric(Fp{t.coef})).value});
  CurveModel c = make_plane_curve(other, degree_, terms, options_);
  c.seed_ = seed_;
  return c;
}

bool CurveModel::contains(const PointOnCurve& pt) const {
  if (kind_ == CurveKind::hyperelliptic) {
    if (pt.coords[2] != 1) return false;
    const Fp lhs = field_.mul(Fp{pt.y()}, Fp{pt.y()});
    return lhs == poly::eval(f_, Fp{pt.x()}, field_);
  }
  return eval_form(field_, terms_, pt.coords) == 0;
}

std::vector<Monomial> CurveModel::generators(int m) const {
  std::vector<Monomial> out;
  if (m < 0) return out;
  if (kind_ == CurveKind::hyperelliptic) {
    for (int i = 0; 2 * i <= m; ++i) out.push_back({{i, 0, 0}});
    for (int j = 0; 2 * j + 2 * genus_ + 1 <= m; ++j) out.push_back({{j, 1, 0}});
    return out;
  }
  for (int a = m; a >= 0; --a)
    for (int b = m - a; b >= 0; --b) out.push_back({{a, b, m - a - b}});
  return out;
}

Fp CurveModel::evaluate(const Monomial& mono, const PointOnCurve& pt) const {
  if (pt.at_infinity()) throw InvalidArgument("evaluation needs an affine point");
  std::uint32_t v = pow_u(field_, pt.x(), mono.exp[0]);
  v = field_.mulr(v, pow_u(field_, pt.y(), mono.exp[1]));
  return Fp{v};
}

std::vector<std::array<std::uint32_t, 3>> CurveModel::chart_equation(int chart) const {
  std::vector<std::array<std::uint32_t, 3>> out;
  if (kind_ == CurveKind::hyperelliptic) {
    if (chart != 2) throw InvalidArgument("hyperelliptic model only has the affine chart");
    out.push_back({0, 2, 1});
    for (std::size_t i = 0; i < f_.size(); ++i)
      if (f_[i] != 0) out.push_back({static_cast<std::uint32_t>(i), 0, field_.negr(f_[i])});
    return out;
  }
  for (const auto& t : terms_) {
    std::array<std::uint32_t, 3> term{};
    int k = 0;
    for (int c = 0; c < 3; ++c)
      if (c != chart) term[k++] = static_cast<std::uint32_t>(t.exp[c]);
    term[2] = t.coef;
    out.push_back(term);
  }
  return out;
}

CurveModel make_hyperelliptic(const PrimeField& field, int genus, const Poly& f, CurveOptions opts) {
  if (genus < 2) throw InvalidArgument("hyperelliptic genus must be at least 2");
  Poly g = f;
  for (auto& c : g) c %= field.prime();
  poly::trim(g);
  if (poly::degree(g) != 2 * genus + 1)
    throw InvalidArgument("hyperelliptic f must have degree 2g+1 = " + std::to_string(2 * genus + 1));
  Poly common = poly::gcd(g, poly::derivative(g, field), field);
  if (poly::degree(common) > 0)
    throw NotSquarefree("f is not squarefree; gcd(f, f') = " + poly::to_string(common), poly::to_string(common));
  CurveModel c(CurveKind::hyperelliptic, field);
  c.genus_ = genus;
  c.gonality_ = 2;
  c.f_ = std::move(g);
  c.options_ = opts;
  c.audit_.proven = true;
  return c;
}

CurveModel make_hyperelliptic(const PrimeField& field, int genus, std::uint64_t seed, CurveOptions opts) {
  if (genus < 2) throw InvalidArgument("hyperelliptic genus must be at least 2");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Poly f(2 * genus + 2);
    for (int i = 0; i <= 2 * genus; ++i) f[i] = field.random(rng).value;
    f.back() = 1;
    try {
      CurveModel c = make_hyperelliptic(field, genus, f, opts);
      c.seed_ = seed;
      return c;
    } catch (const NotSquarefree&) {
    }
  }
  throw Error("no squarefree polynomial found");
}

CurveModel make_plane_curve(const PrimeField& field, int degree, const std::vector<PlaneTerm>& terms,
                            CurveOptions opts) {
  if (degree < 4) throw InvalidArgument("plane curve degree must be at least 4");
  CurveModel c(CurveKind::plane, field);
  c.degree_ = degree;
  c.terms_ = normalize_terms(field, degree, terms);
  if (c.terms_.empty()) throw InvalidArgument("plane curve form is zero");
  c.genus_ = (degree - 1) * (degree - 2) / 2;
  c.gonality_ = degree - 1;
  c.options_ = opts;
  audit_plane(c, c.audit_);
  return c;
}

CurveModel make_plane_curve(const PrimeField& field, int degree, std::uint64_t seed, CurveOptions opts) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<PlaneTerm> terms;
    for (int a = degree; a >= 0; --a)
      for (int b = degree - a; b >= 0; --b) terms.push_back({{a, b, degree - a - b}, field.random(rng).value});
    try {
      CurveModel c = make_plane_curve(field, degree, terms, opts);
      c.seed_ = seed;
      return c;
    } catch (const SingularPoint&) {
    } catch (const InvalidArgument&) {
    }
  }
  throw Error("no smooth plane curve found");
}

namespace {

// Points with x = x0 on the z = 1 chart of a plane curve, ascending in y.
std::vector<std::uint32_t> plane_fiber(const CurveModel& c, std::uint32_t x0) {
  const auto& f = c.field();
  Poly g(c.plane_degree() + 1, 0);
  for (const auto& t : c.plane_terms())
    g[t.exp[1]] = f.addr(g[t.exp[1]], f.mulr(t.coef, pow_u(f, x0, t.exp[0])));
  poly::trim(g);
  std::vector<std::uint32_t> ys;
  if (g.empty()) {
    ys.resize(f.prime());
    for (std::uint32_t y = 0; y < f.prime(); ++y) ys[y] = y;
    return ys;
  }
  for (auto [r, m] : poly::roots(g, f)) ys.push_back(r);
  return ys;
}

void audit_plane(CurveModel& c, SmoothnessAudit& audit) {
  const auto pts = enumerate_points(c, c.options().audit_points);
  const auto& f = c.field();
  for (const auto& pt : pts.points) {
    bool singular = true;
    for (int v = 0; v < 3 && singular; ++v) singular = eval_partial(f, c.plane_terms(), pt.coords, v) == 0;
    if (singular) throw SingularPoint("singular rational point " + pt.to_string(), pt.to_string());
  }
  audit.points_checked = pts.points.size();
  audit.exhaustive = pts.shortfall;
}

}  // namespace

PointList enumerate_points(const CurveModel& curve, std::size_t max_count) {
  PointList out;
  const auto& f = curve.field();
  const std::uint32_t p = f.prime();
  if (max_count == 0) return out;
  if (curve.kind() == CurveKind::hyperelliptic) {
    for (std::uint32_t x = 0; x < p; ++x) {
      const Fp fx = poly::eval(curve.hyperelliptic_f(), Fp{x}, f);
      if (fx.value == 0) {
        out.points.push_back({{x, 0, 1}, true});
      } else if (f.is_square(fx)) {
        const Fp y = f.sqrt(fx);
        out.points.push_back({{x, y.value, 1}, false});
        if (out.points.size() == max_count) return out;
        out.points.push_back({{x, f.neg(y).value, 1}, false});
      }
      if (out.points.size() >= max_count) {
        out.points.resize(max_count);
        return out;
      }
    }
    out.shortfall = true;
    return out;
  }
  auto ramified = [&](const std::array<std::uint32_t, 3>& c) {
    return eval_partial(f, curve.plane_terms(), c, 1) == 0;
  };
  for (std::uint32_t x = 0; x < p; ++x) {
    for (std::uint32_t y : plane_fiber(curve, x)) {
      std::array<std::uint32_t, 3> c{x, y, 1};
      out.points.push_back({c, ramified(c)});
      if (out.points.size() == max_count) return out;
    }
  }
  // line at infinity: (x : 1 : 0), then (1 : 0 : 0)
  Poly g(curve.plane_degree() + 1, 0);
  for (const auto& t : curve.plane_terms())
    if (t.exp[2] == 0) g[t.exp[0]] = f.addr(g[t.exp[0]], t.coef);
  poly::trim(g);
  std::vector<std::uint32_t> xs;
  if (g.empty()) {
    for (std::uint32_t x = 0; x < p; ++x) xs.push_back(x);
  } else {
    for (auto [r, m] : poly::roots(g, f)) xs.push_back(r);
  }
  for (std::uint32_t x : xs) {
    std::array<std::uint32_t, 3> c{x, 1, 0};
    out.points.push_back({c, ramified(c)});
    if (out.points.size() == max_count) return out;
  }
  if (eval_form(f, curve.plane_terms(), {1, 0, 0}) == 0) {
    std::array<std::uint32_t, 3> c{1, 0, 0};
    out.points.push_back({c, ramified(c)});
    if (out.points.size() == max_count) return out;
  }
  out.shortfall = true;
  return out;
}

namespace {

// Affine coordinates (u0, v0) of the point in the chart.
std::pair<std::uint32_t, std::uint32_t> chart_coords(const PointOnCurve& pt, int chart) {
  std::uint32_t uv[2];
  int k = 0;
  for (int c = 0; c < 3; ++c)
    if (c != chart) uv[k++] = pt.coords[c];
  return {uv[0], uv[1]};
}

int chart_of(const CurveModel& curve, const PointOnCurve& pt) {
  if (curve.kind() == CurveKind::hyperelliptic) return 2;
  if (pt.coords[2] != 0) return 2;
  if (pt.coords[1] != 0) return 1;
  return 0;
}

Series eval_equation(const std::vector<std::array<std::uint32_t, 3>>& eq, const Series& u, const Series& v,
                     const PrimeField& f) {
  std::uint32_t max_a = 0, max_b = 0;
  for (const auto& t : eq) {
    max_a = std::max(max_a, t[0]);
    max_b = std::max(max_b, t[1]);
  }
  std::vector<Series> upow{series::constant(1, u.size())}, vpow{series::constant(1, v.size())};
  for (std::uint32_t i = 1; i <= max_a; ++i) upow.push_back(series::mul(upow.back(), u, f));
  for (std::uint32_t i = 1; i <= max_b; ++i) vpow.push_back(series::mul(vpow.back(), v, f));
  Series acc(u.size(), 0);
  for (const auto& t : eq)
    acc = series::add(acc, series::scale(series::mul(upow[t[0]], vpow[t[1]], f), Fp{t[2]}, f), f);
  return acc;
}

}  // namespace

LocalExpansion local_expansion(const CurveModel& curve, const PointOnCurve& pt, std::size_t order) {
  if (order > curve.options().max_expansion_order)
    throw InvalidArgument("expansion order " + std::to_string(order) + " exceeds configured truncation " +
                          std::to_string(curve.options().max_expansion_order));
  if (!curve.contains(pt)) throw InvalidArgument("point " + pt.to_string() + " is not on the curve");
  const auto& f = curve.field();
  LocalExpansion e;
  e.point = pt;
  e.order = order;
  e.chart = chart_of(curve, pt);
  const auto eq = curve.chart_equation(e.chart);
  const auto [u0, v0] = chart_coords(pt, e.chart);

  std::uint32_t gu = 0, gv = 0;
  for (const auto& t : eq) {
    if (t[0] > 0)
      gu = f.addr(gu, f.mulr(f.mulr(t[2], f.from_int(t[0]).value),
                             f.mulr(pow_u(f, u0, static_cast<int>(t[0]) - 1), pow_u(f, v0, static_cast<int>(t[1])))));
    if (t[1] > 0)
      gv = f.addr(gv, f.mulr(f.mulr(t[2], f.from_int(t[1]).value),
                             f.mulr(pow_u(f, u0, static_cast<int>(t[0])), pow_u(f, v0, static_cast<int>(t[1]) - 1))));
  }
  const std::size_t len = order + 1;
  e.u = series::constant(u0, len);
  e.v = series::constant(v0, len);
  std::uint32_t slope;
  Series* unknown;
  if (gv != 0) {
    e.parameter = 0;
    if (len > 1) e.u[1] = 1;
    slope = gv;
    unknown = &e.v;
  } else if (gu != 0) {
    e.parameter = 1;
    if (len > 1) e.v[1] = 1;
    slope = gu;
    unknown = &e.u;
  } else {
    throw SingularPoint("no nonvanishing partial at " + pt.to_string(), pt.to_string());
  }
  const Fp inv_slope = f.inv(Fp{slope});
  for (std::size_t it = 0; it < order; ++it) {
    Series r = eval_equation(eq, e.u, e.v, f);
    *unknown = series::sub(*unknown, series::scale(r, inv_slope, f), f);
  }
  return e;
}

Series expand_monomial(const CurveModel& curve, const Monomial& mono, const LocalExpansion& exp) {
  const auto& f = curve.field();
  int ea, eb;
  if (curve.kind() == CurveKind::hyperelliptic) {
    ea = mono.exp[0];
    eb = mono.exp[1];
  } else {
    int e[2];
    int k = 0;
    for (int c = 0; c < 3; ++c)
      if (c != exp.chart) e[k++] = mono.exp[c];
    ea = e[0];
    eb = e[1];
  }
  return series::mul(series::pow(exp.u, static_cast<unsigned>(ea), f), series::pow(exp.v, static_cast<unsigned>(eb), f),
                     f);
}

Series equation_residual(const CurveModel& curve, const LocalExpansion& exp) {
  return eval_equation(curve.chart_equation(exp.chart), exp.u, exp.v, curve.field());
}

namespace {

GonalityCertificate hyperelliptic_certificate(const CurveModel& curve, std::size_t min_fibers) {
  const auto& f = curve.field();
  GonalityCertificate cert;
  cert.k = 2;
  cert.pencil = "x-map y^2 = f(x) -> P^1";
  auto fiber_at = [&](std::uint32_t x0) -> std::optional<FiberRecord> {
    const Fp fx = poly::eval(curve.hyperelliptic_f(), Fp{x0}, f);
    FiberRecord rec;
    rec.description = "x = " + std::to_string(x0);
    rec.total_degree = 2;
    std::vector<PointOnCurve> pts;
    if (fx.value == 0) {
      pts.push_back({{x0, 0, 1}, true});
    } else if (f.is_square(fx)) {
      const Fp y = f.sqrt(fx);
      pts.push_back({{x0, y.value, 1}, false});
      pts.push_back({{x0, f.neg(y).value, 1}, false});
    } else {
      return std::nullopt;
    }
    for (const auto& pt : pts) {
      // multiplicity of the fiber at pt = order of vanishing of x - x0
      const auto e = local_expansion(curve, pt, 3);
      Series dx = e.u;
      dx[0] = f.subr(dx[0], x0);
      rec.rational_degree += static_cast<int>(series::valuation(dx));
    }
    rec.split = true;
    return rec;
  };
  std::set<std::uint32_t> done;
  for (auto [r, m] : poly::roots(curve.hyperelliptic_f(), f)) {
    if (auto rec = fiber_at(r)) {
      cert.fibers.push_back(*rec);
      done.insert(r);
    }
  }
  for (std::uint32_t x0 = 0; x0 < f.prime() && cert.fibers.size() < min_fibers + done.size(); ++x0) {
    if (done.count(x0)) continue;
    if (auto rec = fiber_at(x0)) cert.fibers.push_back(*rec);
  }
  return cert;
}

GonalityCertificate plane_certificate(const CurveModel& curve, std::size_t min_fibers) {
  const auto& f = curve.field();
  const int d = curve.plane_degree();
  GonalityCertificate cert;
  cert.k = d - 1;
  const auto pts = enumerate_points(curve, 4 * min_fibers + 8).points;
  if (pts.size() < 2) throw Shortfall(2, pts.size());
  const PointOnCurve center = pts.front();
  cert.center = center;
  cert.pencil = "projection from " + center.to_string();
  std::set<std::array<std::uint32_t, 3>> lines;
  for (std::size_t qi = 1; qi < pts.size() && cert.fibers.size() < min_fibers; ++qi) {
    const auto& q = pts[qi];
    // line through center and q, as normalized coefficient vector (cross product)
    const auto& a = center.coords;
    const auto& b = q.coords;
    std::array<std::uint32_t, 3> ln{f.subr(f.mulr(a[1], b[2]), f.mulr(a[2], b[1])),
                                    f.subr(f.mulr(a[2], b[0]), f.mulr(a[0], b[2])),
                                    f.subr(f.mulr(a[0], b[1]), f.mulr(a[1], b[0]))};
    int lead = 0;
    while (lead < 3 && ln[lead] == 0) ++lead;
    if (lead == 3) continue;
    const Fp inv = f.inv(Fp{ln[lead]});
    for (auto& c : ln) c = f.mulr(c, inv.value);
    if (!lines.insert(ln).second) continue;

    // phi(s) = F(center + s * q); its degree deficit counts the root at q (s = infinity)
    Poly phi(d + 1, 0);
    for (const auto& t : curve.plane_terms()) {
      Poly term{t.coef};
      for (int k = 0; k < 3; ++k) {
        Poly lin{a[k], b[k]};
        for (int e = 0; e < t.exp[k]; ++e) term = poly::mul(term, lin, f);
      }
      phi = poly::add(phi, term, f);
    }
    poly::trim(phi);
    if (phi.empty())
      throw ModelInconsistency("line through projection center is a component of the curve", d - 1, 0);
    if (phi[0] != 0) throw ModelInconsistency("projection center is not on the curve", 0, 1);
    Poly psi(phi.begin() + 1, phi.end());
    const int at_q = d - 1 - poly::degree(psi);
    if (at_q < 1) throw ModelInconsistency("fiber misses the point defining the line", 1, at_q);
    FiberRecord rec;
    rec.description = "line through " + center.to_string() + " and " + q.to_string();
    rec.total_degree = poly::degree(psi) + at_q;
    rec.rational_degree = at_q;
    for (auto [r, m] : poly::roots(psi, f)) rec.rational_degree += m;
    rec.split = rec.rational_degree == rec.total_degree;
    cert.fibers.push_back(rec);
  }
  return cert;
}

}  // namespace

GonalityCertificate pencil_certificate(const CurveModel& curve, std::size_t min_fibers) {
  GonalityCertificate cert = curve.kind() == CurveKind::hyperelliptic ? hyperelliptic_certificate(curve, min_fibers)
                                                                      : plane_certificate(curve, min_fibers);
  if (cert.fibers.size() < min_fibers) throw Shortfall(min_fibers, cert.fibers.size());
  for (const auto& fib : cert.fibers) {
    if (fib.total_degree != cert.k)
      throw ModelInconsistency("fiber degree mismatch on " + fib.description, cert.k, fib.total_degree);
    if (fib.split && fib.rational_degree != cert.k)
      throw ModelInconsistency("split fiber multiplicity mismatch on " + fib.description, cert.k,
                               fib.rational_degree);
  }
  return cert;
}

}  // namespace koszul
