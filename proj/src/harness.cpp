#include "koszul/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "koszul/errors.hpp"

namespace koszul {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Curves

const std::vector<std::string>& curve_presets() {
  static const std::vector<std::string> names{"g2hyp", "g3quartic", "g4hyp", "g5hyp"};
  return names;
}

namespace {

// y^2 = x^(2g+1) + 1
CurvePtr odd_hyperelliptic(std::uint32_t prime, int genus) {
  Poly f(static_cast<std::size_t>(2 * genus + 2), 0);
  f.front() = 1;
  f.back() = 1;
  return std::make_shared<const CurveModel>(make_hyperelliptic(PrimeField(prime), genus, f));
}

CurvePtr preset(const std::string& name, std::uint32_t prime) {
  if (name == "g2hyp") return odd_hyperelliptic(prime, 2);
  if (name == "g4hyp") return odd_hyperelliptic(prime, 4);
  if (name == "g5hyp") return odd_hyperelliptic(prime, 5);
  if (name == "g3quartic")
    return std::make_shared<const CurveModel>(
        make_plane_curve(PrimeField(prime), 4, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}}));
  throw InvalidArgument("unknown curve preset '" + name + "'");
}

std::uint32_t reduce(const PrimeField& f, const json& v) {
  if (!v.is_number_integer()) throw InvalidArgument("curve coefficients must be integers");
  return f.from_int(v.get<std::int64_t>()).value;
}

}  // namespace

CurvePtr curve_from_spec(const json& spec, std::uint32_t default_prime) {
  if (spec.is_string()) return preset(spec.get<std::string>(), default_prime);
  if (!spec.is_object()) throw InvalidArgument("curve spec must be a preset name or an object");
  const std::uint32_t prime = spec.contains("prime") ? spec.at("prime").get<std::uint32_t>() : default_prime;
  if (spec.contains("preset")) return preset(spec.at("preset").get<std::string>(), prime);
  const PrimeField field(prime);
  const auto kind = spec.value("kind", std::string{});
  if (kind == "hyperelliptic") {
    if (!spec.contains("genus")) throw InvalidArgument("hyperelliptic curve spec needs 'genus'");
    const int genus = spec.at("genus").get<int>();
    if (spec.contains("f")) {
      Poly f;
      for (const auto& c : spec.at("f")) f.push_back(reduce(field, c));
      return std::make_shared<const CurveModel>(make_hyperelliptic(field, genus, f));
    }
    if (spec.contains("seed"))
      return std::make_shared<const CurveModel>(make_hyperelliptic(field, genus, spec.at("seed").get<std::uint64_t>()));
    throw InvalidArgument("hyperelliptic curve spec needs 'f' or 'seed'");
  }
  if (kind == "plane") {
    if (!spec.contains("degree")) throw InvalidArgument("plane curve spec needs 'degree'");
    const int degree = spec.at("degree").get<int>();
    if (spec.contains("terms")) {
      std::vector<PlaneTerm> terms;
      for (const auto& t : spec.at("terms")) {
        if (!t.is_array() || t.size() != 4) throw InvalidArgument("plane terms are [a, b, c, coef]");
        terms.push_back({{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()}, reduce(field, t[3])});
      }
      return std::make_shared<const CurveModel>(make_plane_curve(field, degree, terms));
    }
    if (spec.contains("seed"))
      return std::make_shared<const CurveModel>(make_plane_curve(field, degree, spec.at("seed").get<std::uint64_t>()));
    throw InvalidArgument("plane curve spec needs 'terms' or 'seed'");
  }
  throw InvalidArgument("curve spec 'kind' must be 'hyperelliptic' or 'plane'");
}

CurvePtr curve_from_argument(const std::string& arg, std::uint32_t default_prime) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '{') {
    try {
      return curve_from_spec(json::parse(arg), default_prime);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("curve JSON: ") + e.what());
    }
  }
  if (std::ranges::find(curve_presets(), arg) != curve_presets().end()) return preset(arg, default_prime);
  std::ifstream in(arg);
  if (!in) throw InvalidArgument("'" + arg + "' is neither a preset, inline JSON, nor a readable file");
  try {
    return curve_from_spec(json::parse(in), default_prime);
  } catch (const json::exception& e) {
    throw InvalidArgument("curve file " + arg + ": " + e.what());
  }
}

json curve_to_json(const CurveModel& curve) {
  const auto& f = curve.field();
  json j{{"prime", f.prime()}};
  if (curve.kind() == CurveKind::hyperelliptic) {
    j["kind"] = "hyperelliptic";
    j["genus"] = curve.genus();
    auto coeffs = json::array();
    for (auto c : curve.hyperelliptic_f()) coeffs.push_back(f.symmetric(Fp{c}));
    j["f"] = coeffs;
  } else {
    j["kind"] = "plane";
    j["degree"] = curve.plane_degree();
    auto terms = json::array();
    for (const auto& t : curve.plane_terms()) terms.push_back({t.exp[0], t.exp[1], t.exp[2], f.symmetric(Fp{t.coef})});
    j["terms"] = terms;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Divisor recipes

namespace {

const char* unit_name(const CurveModel& curve) { return curve.kind() == CurveKind::hyperelliptic ? "inf" : "H"; }

std::string trim(std::string s) {
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); }));
  s.erase(std::find_if(s.rbegin(), s.rend(), [](unsigned char c) { return !std::isspace(c); }).base(), s.end());
  return s;
}

PointOnCurve parse_point(const CurveModel& curve, const std::string& atom) {
  // (x:y:z)
  std::array<std::uint32_t, 3> c{};
  std::string body = atom.substr(1, atom.size() - 2);
  std::istringstream is(body);
  std::string part;
  int k = 0;
  while (std::getline(is, part, ':')) {
    if (k == 3) throw InvalidArgument("point '" + atom + "' needs three coordinates");
    try {
      std::size_t used = 0;
      const long long v = std::stoll(trim(part), &used);
      if (used != trim(part).size()) throw std::invalid_argument("trailing characters");
      c[static_cast<std::size_t>(k++)] = curve.field().from_int(v).value;
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad coordinate in point '" + atom + "'");
    }
  }
  if (k != 3) throw InvalidArgument("point '" + atom + "' needs three coordinates");
  PointOnCurve pt{c, false};
  if (curve.kind() == CurveKind::hyperelliptic) {
    if (c[2] != 1) throw InvalidArgument("hyperelliptic points are affine (x:y:1)");
    pt.ramified = c[1] == 0;
  }
  if (!curve.contains(pt)) throw InvalidArgument("point " + atom + " is not on the curve");
  return pt;
}

}  // namespace

DivisorSpec parse_divisor(const CurveModel& curve, const std::string& recipe) {
  DivisorSpec d;
  std::string s = trim(recipe);
  if (s.empty()) throw InvalidArgument("empty divisor recipe");
  std::size_t i = 0;
  bool first = true;
  std::vector<PointOnCurve> listing;
  auto point_index = [&](std::size_t idx) {
    if (listing.size() <= idx) {
      listing = enumerate_points(curve, std::max<std::size_t>(idx + 1, 64)).points;
      if (listing.size() <= idx)
        throw InvalidArgument("the curve has only " + std::to_string(listing.size()) + " rational points");
    }
    return listing[idx];
  };
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw InvalidArgument("expected '+' or '-' in recipe '" + recipe + "'");
    }
    first = false;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    long long coef = 1;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      coef = std::stoll(s.substr(i, j - i));
      std::size_t k = j;
      while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
      if (k < s.size() && s[k] == '*') {
        i = k + 1;
      } else if (k == s.size() || s[k] == '+' || s[k] == '-') {
        if (coef != 0) throw InvalidArgument("bare integer in recipe '" + recipe + "'");
        i = k;
        continue;
      } else {
        i = j;
      }
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    std::string atom;
    if (i < s.size() && s[i] == '(') {
      const auto close = s.find(')', i);
      if (close == std::string::npos) throw InvalidArgument("unclosed point in recipe '" + recipe + "'");
      atom = s.substr(i, close - i + 1);
      i = close + 1;
    } else {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      atom = s.substr(i, j - i);
      i = j;
    }
    if (atom.empty()) throw InvalidArgument("missing term in recipe '" + recipe + "'");
    const long long c = sign * coef;
    if (atom == "inf") {
      if (curve.kind() != CurveKind::hyperelliptic) throw InvalidArgument("'inf' is the hyperelliptic unit; use H");
      d.base += static_cast<int>(c);
    } else if (atom == "H") {
      if (curve.kind() != CurveKind::plane) throw InvalidArgument("'H' is the plane unit; use inf");
      d.base += static_cast<int>(c);
    } else if (atom == "K" || atom == "canonical") {
      d.base += static_cast<int>(c) * curve.canonical_multiple();
    } else if (atom == "O" || atom == "trivial") {
    } else if (atom.front() == '(') {
      d.subtracted.push_back({parse_point(curve, atom), static_cast<int>(-c)});
    } else if (atom.size() > 1 && atom.front() == 'P' &&
               std::all_of(atom.begin() + 1, atom.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      d.subtracted.push_back({point_index(std::stoul(atom.substr(1))), static_cast<int>(-c)});
    } else {
      throw InvalidArgument("unknown term '" + atom + "' in recipe '" + recipe + "'");
    }
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  return d.normalized();
}

std::string divisor_recipe(const CurveModel& curve, const DivisorSpec& d) {
  const auto n = d.normalized();
  std::ostringstream os;
  bool empty = true;
  if (n.base != 0) {
    os << n.base << '*' << unit_name(curve);
    empty = false;
  }
  for (const auto& sp : n.subtracted) {
    const int m = sp.multiplicity;
    os << (m > 0 ? (empty ? "-" : " - ") : (empty ? "" : " + "));
    if (std::abs(m) != 1) os << std::abs(m) << '*';
    os << sp.point.to_string();
    empty = false;
  }
  return empty ? "trivial" : os.str();
}

std::string degree_recipe(const CurveModel& curve, int degree, int extra_points, std::uint64_t seed, std::size_t pool) {
  const int u = curve.unit_degree();
  const int need = degree + std::max(extra_points, 0);
  const int base = need >= 0 ? (need + u - 1) / u : -((-need) / u);
  const int s = base * u - degree;
  std::ostringstream os;
  os << base << '*' << unit_name(curve);
  if (s <= 0) return os.str();
  const auto pts = enumerate_points(curve, pool).points;
  if (static_cast<std::size_t>(s) > pts.size())
    throw InvalidArgument("not enough rational points to build a divisor of degree " + std::to_string(degree));
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  for (auto k : idx) os << " - P" << k;
  return os.str();
}

// ---------------------------------------------------------------------------
// Reports

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::hypothesis_unmet: return "hypothesis_unmet";
    case CheckStatus::budget_exceeded: return "budget_exceeded";
  }
  return "fail";
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"thm11",        "thm12",        "duality", "green_regression",
                                              "veronese_exception", "prop32_sweep", "prop36_sweep",
                                              "cor39",        "remark4"};
  return names;
}

bool CheckReport::hypotheses_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(), [](const auto& h) { return h.holds; });
}

json CheckReport::to_json(bool timings) const {
  json j{{"check", check}, {"status", koszul::to_string(status)}, {"inputs", inputs}};
  auto hyps = json::array();
  for (const auto& h : hypotheses) hyps.push_back({{"name", h.name}, {"method", h.method}, {"value", h.value}, {"holds", h.holds}});
  j["hypotheses"] = hyps;
  auto cs = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto c = cell_to_json(cells[i], timings);
    c["role"] = i < cell_roles.size() ? cell_roles[i] : "";
    cs.push_back(c);
  }
  j["cells"] = cs;
  j["notes"] = notes;
  j["provenance"] = provenance;
  j["reproduce"] = reproduce;
  if (!error.empty()) j["error"] = error;
  return j;
}

json CheckRequest::to_json() const {
  json j{{"check", check}, {"curve", curve}, {"seed", seed}};
  if (b) j["B"] = *b;
  if (l) j["L"] = *l;
  if (p) j["p"] = *p;
  if (q) j["q"] = *q;
  return j;
}

CheckRequest CheckRequest::from_json(const json& j) {
  CheckRequest r;
  r.check = j.at("check").get<std::string>();
  if (j.contains("curve")) r.curve = j.at("curve");
  if (j.contains("B")) r.b = j.at("B").get<std::string>();
  if (j.contains("L")) r.l = j.at("L").get<std::string>();
  if (j.contains("p")) r.p = j.at("p").get<int>();
  if (j.contains("q")) r.q = j.at("q").get<int>();
  r.seed = j.value("seed", std::uint64_t{0});
  return r;
}

KoszulOptions CheckContext::koszul_options() const {
  KoszulOptions o;
  o.seed = seed;
  o.method = method;
  o.budget.max_seconds = budget_seconds;
  o.budget.max_nnz = max_nnz;
  return o;
}

// ---------------------------------------------------------------------------
// Checks

namespace {

const DivisorSpec kTrivial = DivisorSpec::multiple(0);

CheckReport start(const std::string& id, const CurvePtr& curve, const std::optional<DivisorSpec>& b,
                  const std::optional<DivisorSpec>& l, std::optional<int> p, std::optional<int> q,
                  const CheckContext& ctx) {
  CheckReport rep;
  rep.check = id;
  rep.inputs["curve"] = curve_to_json(*curve);
  rep.inputs["curve_id"] = curve->id();
  rep.inputs["genus"] = curve->genus();
  rep.inputs["gonality"] = curve->gonality();
  if (b) {
    rep.inputs["B"] = divisor_to_json(*curve, *b);
    rep.inputs["B"]["recipe"] = divisor_recipe(*curve, *b);
  }
  if (l) {
    rep.inputs["L"] = divisor_to_json(*curve, *l);
    rep.inputs["L"]["recipe"] = divisor_recipe(*curve, *l);
  }
  if (p) rep.inputs["p"] = *p;
  if (q) rep.inputs["q"] = *q;
  rep.provenance = {{"prime", curve->field().prime()},
                    {"seed", ctx.seed},
                    {"strategy", to_string(ctx.strategy)},
                    {"rank_method", to_string(ctx.method)},
                    {"budget_seconds_per_cell", ctx.budget_seconds},
                    {"max_nnz", ctx.max_nnz}};
  // a single-check sweep config that reruns this report in isolation
  CheckRequest again{id, rep.inputs["curve"], std::nullopt, std::nullopt, p, q, ctx.seed};
  if (b) again.b = divisor_recipe(*curve, *b);
  if (l) again.l = divisor_recipe(*curve, *l);
  auto entry = again.to_json();
  entry.erase("seed");
  rep.reproduce = {{"seed", ctx.seed},
                   {"primes", {curve->field().prime()}},
                   {"budget_seconds", ctx.budget_seconds},
                   {"strategy", to_string(ctx.strategy)},
                   {"checks", {entry}}};
  return rep;
}

HypothesisAudit degree_at_least(const std::string& name, int value, int bound) {
  return {name, "divisor degree", json{{"degree", value}, {"bound", bound}}, value >= bound};
}

HypothesisAudit h1_vanishes(const CurvePtr& curve, const std::string& name, const DivisorSpec& d, std::uint64_t seed) {
  HypothesisAudit h{name, "h0_h1", json::object(), false};
  const int deg = d.degree(*curve);
  h.value["degree"] = deg;
  try {
    const auto dims = h0_h1(curve, d.normalized(), seed);
    h.value["h0"] = dims.h0;
    h.value["h1"] = dims.h1;
    h.value["serre_checked"] = dims.serre_checked;
    h.holds = dims.h1 == 0;
  } catch (const NotComputable& e) {
    if (deg > 2 * curve->genus() - 2) {
      h.method = "degree above 2g-2";
      h.value["h1"] = 0;
      h.holds = true;
    } else {
      h.method = "not computable";
      h.value["reason"] = e.what();
    }
  }
  return h;
}

HypothesisAudit p_very_ample(const CurvePtr& curve, const std::string& name, const DivisorSpec& b, int p,
                             const CheckContext& ctx, CheckReport& rep) {
  HypothesisAudit h{name, "is_p_very_ample", json::object(), false};
  try {
    auto opts = ctx.ampleness;
    opts.seed = ctx.seed;
    const auto v = is_p_very_ample(curve, b.normalized(), p, opts);
    h.value = verdict_to_json(*curve, b, v);
    h.holds = v.outcome == AmplenessOutcome::no_failure_found;
    rep.provenance["ampleness"].push_back({{"hypothesis", name}, {"coverage", h.value["coverage"]}, {"scope", v.scope}});
    if (h.holds) rep.notes.push_back(name + ": verdict is not exhaustive; " + v.scope);
  } catch (const NotRepresentable& e) {
    h.method = "not representable";
    h.value["reason"] = e.what();
  }
  return h;
}

std::string group(long long p, int q, const std::string& b) {
  std::ostringstream os;
  os << "K_{" << p << ',' << q << "}(C" << (b.empty() ? "" : "," + b) << ";L)";
  return os.str();
}

void add_cell(CheckReport& rep, const KoszulCell& c, std::string role) {
  rep.cells.push_back(c);
  rep.cell_roles.push_back(std::move(role));
}

// K_{p,1}(C; L) through the configured strategy.
struct Strand {
  KoszulComplex complex;
  StrandStrategy strategy;
  long long r() const { return complex.r(); }
  KoszulCell cell(long long p, CheckReport& rep) const {
    if (strategy == StrandStrategy::direct) {
      auto c = complex.cell(p, 1);
      add_cell(rep, c, group(p, 1, ""));
      return c;
    }
    auto c = complex.cell(r() - 1 - p, 1);
    add_cell(rep, c, group(r() - 1 - p, 1, "K") + " for " + group(p, 1, ""));
    return c;
  }
};

Strand make_strand(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx) {
  const auto b = ctx.strategy == StrandStrategy::direct ? kTrivial : DivisorSpec::canonical(*curve);
  return Strand{KoszulComplex(curve, b, l, 1, ctx.koszul_options()), ctx.strategy};
}

void conclude_vanishing(CheckReport& rep, const KoszulCell& c) {
  rep.status = c.dim_kpq == 0 ? CheckStatus::pass : CheckStatus::fail;
  if (c.dim_kpq != 0) rep.notes.push_back("expected vanishing but dim = " + std::to_string(c.dim_kpq));
}

CheckReport vanishing_check(const std::string& id, const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l,
                            int p, int b_slack, int l_slack, const CheckContext& ctx) {
  auto rep = start(id, curve, b, l, p, std::nullopt, ctx);
  const int g = curve->genus();
  rep.hypotheses.push_back(degree_at_least("deg B >= 2g+" + std::to_string(b_slack), b.degree(*curve), 2 * g + b_slack));
  rep.hypotheses.push_back(degree_at_least("deg L >= 2g+" + std::to_string(l_slack), l.degree(*curve), 2 * g + l_slack));
  rep.hypotheses.push_back(h1_vanishes(curve, "h1(L) = 0", l, ctx.seed));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  rep.hypotheses.push_back(p_very_ample(curve, "B is p-very ample", b, p, ctx, rep));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto c = koszul_dim(curve, b, l, p, 1, ctx.koszul_options());
  add_cell(rep, c, group(p, 1, "B"));
  conclude_vanishing(rep, c);
  return rep;
}

}  // namespace

CheckReport check_thm11(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx) {
  auto rep = start("thm11", curve, std::nullopt, l, std::nullopt, std::nullopt, ctx);
  const int g = curve->genus();
  const int gon = curve->gonality();
  rep.hypotheses.push_back({"gonality metadata present", "family certificate", gon, gon > 0});
  rep.hypotheses.push_back(degree_at_least("deg L >= 4g-3", l.degree(*curve), 4 * g - 3));
  rep.hypotheses.push_back(h1_vanishes(curve, "h1(L - K) = 0", l - DivisorSpec::canonical(*curve), ctx.seed));
  if (gon <= 0) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }

  const auto strand = make_strand(curve, l, ctx);
  const long long r = strand.r();
  const long long expected = r - gon;
  rep.inputs["r"] = r;
  rep.inputs["r_minus_gon"] = expected;

  std::map<long long, long long> dims;
  auto dim_at = [&](long long p) {
    if (p < 1 || p > r - 1) return 0LL;
    if (auto it = dims.find(p); it != dims.end()) return it->second;
    return dims[p] = strand.cell(p, rep).dim_kpq;
  };
  long long last = 0;
  bool exact = true;
  if (ctx.full_strand) {
    for (long long p = 1; p <= r - 1; ++p) {
      const bool nonzero = dim_at(p) != 0;
      if (nonzero) last = p;
      exact = exact && nonzero == (p <= expected);
    }
  } else {
    const long long p0 = std::max<long long>(expected, 1);
    long long p = p0;
    if (dim_at(p0) != 0) {
      while (p + 1 <= r - 1 && dim_at(p + 1) != 0) ++p;
    } else {
      while (p >= 1 && dim_at(p) == 0) --p;
    }
    last = std::max<long long>(p, 0);
  }
  bool first_nonzero = true;
  if (expected >= 1) {
    if (dims.count(1) == 0) {
      const auto c = koszul_dim(curve, kTrivial, l, 1, 1, ctx.koszul_options());
      add_cell(rep, c, group(1, 1, ""));
      dims[1] = c.dim_kpq;
    }
    first_nonzero = dims[1] != 0;
  }
  rep.inputs["last_nonzero_p"] = last;
  const bool ok = last == expected && first_nonzero && exact;
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    if (!ok)
      rep.notes.push_back("boundary anomaly outside the hypothesis: last nonzero p = " + std::to_string(last) +
                          ", r - gon = " + std::to_string(expected));
    return rep;
  }
  rep.status = ok ? CheckStatus::pass : CheckStatus::fail;
  if (!ok)
    rep.notes.push_back("last nonzero p = " + std::to_string(last) + ", expected r - gon = " + std::to_string(expected));
  return rep;
}

CheckReport check_thm12(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                        const CheckContext& ctx) {
  auto rep = start("thm12", curve, b, l, p, std::nullopt, ctx);
  rep.hypotheses.push_back(h1_vanishes(curve, "h1(L) = 0", l, ctx.seed));
  rep.hypotheses.push_back(h1_vanishes(curve, "h1(L - B) = 0", l - b, ctx.seed));
  rep.hypotheses.push_back(p_very_ample(curve, "B is p-very ample", b, p, ctx, rep));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto c = koszul_dim(curve, b, l, p, 1, ctx.koszul_options());
  add_cell(rep, c, group(p, 1, "B"));
  conclude_vanishing(rep, c);
  return rep;
}

CheckReport check_duality(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, std::optional<int> p,
                          std::optional<int> q, const CheckContext& ctx) {
  auto rep = start("duality", curve, b, l, p, q, ctx);
  const auto kb = (DivisorSpec::canonical(*curve) - b).normalized();
  rep.hypotheses.push_back({"B representable", "divisor arithmetic", divisor_recipe(*curve, b), b.normalized().representable()});
  rep.hypotheses.push_back({"K - B representable", "divisor arithmetic", divisor_recipe(*curve, kb), kb.representable()});
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto opts = ctx.koszul_options();
  KoszulComplex left(curve, b, l, 2, opts);
  KoszulComplex right(curve, kb, l, 2, opts);
  const long long r = left.r();
  rep.inputs["r"] = r;
  std::vector<std::pair<long long, int>> pairs;
  if (p && q) {
    pairs.emplace_back(*p, *q);
  } else {
    for (int qq = 0; qq <= 2; ++qq)
      for (long long pp = 0; pp <= r - 1; ++pp)
        if ((!p || pp == *p) && (!q || qq == *q)) pairs.emplace_back(pp, qq);
  }
  bool all_equal = true;
  auto mismatches = json::array();
  for (const auto& [pp, qq] : pairs) {
    if (qq < 0 || qq > 2 || pp < 0 || pp > r - 1) throw InvalidArgument("duality needs 0 <= p <= r-1 and 0 <= q <= 2");
    const auto a = left.cell(pp, qq);
    const auto d = right.cell(r - 1 - pp, 2 - qq);
    add_cell(rep, a, group(pp, qq, "B"));
    add_cell(rep, d, group(r - 1 - pp, 2 - qq, "K-B"));
    if (a.dim_kpq != d.dim_kpq) {
      all_equal = false;
      mismatches.push_back({{"p", pp}, {"q", qq}, {"left", a.dim_kpq}, {"right", d.dim_kpq}});
    }
  }
  rep.inputs["pairs"] = pairs.size();
  if (!all_equal) rep.notes.push_back("mismatched pairs: " + mismatches.dump());
  rep.status = all_equal ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

CheckReport check_green_regression(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx) {
  auto rep = start("green_regression", curve, std::nullopt, l, std::nullopt, std::nullopt, ctx);
  rep.hypotheses.push_back(degree_at_least("deg L >= 2g+1", l.degree(*curve), 2 * curve->genus() + 1));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto strand = make_strand(curve, l, ctx);
  rep.inputs["r"] = strand.r();
  conclude_vanishing(rep, strand.cell(strand.r() - 1, rep));
  return rep;
}

CheckReport check_veronese_exception(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx) {
  auto rep = start("veronese_exception", curve, std::nullopt, l, std::nullopt, std::nullopt, ctx);
  const int deg = l.degree(*curve);
  const int g = curve->genus();
  rep.hypotheses.push_back({"genus 3", "curve model", g, g == 3});
  rep.hypotheses.push_back({"non-hyperelliptic", "curve family", (curve->kind() == CurveKind::plane ? "plane" : "hyperelliptic"), curve->kind() == CurveKind::plane});
  rep.hypotheses.push_back({"L = 2K", "divisor arithmetic", divisor_recipe(*curve, l),
                            l.normalized() == DivisorSpec::canonical(*curve).times(2).normalized()});
  rep.hypotheses.push_back({"deg L = 8 < 4g-3", "divisor degree", deg, deg == 8 && deg < 4 * g - 3});
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto strand = make_strand(curve, l, ctx);
  const long long r = strand.r();
  rep.hypotheses.push_back({"r = 5", "h0(L) - 1", r, r == 5});
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  rep.inputs["r_minus_gon"] = r - curve->gonality();
  const auto c = strand.cell(3, rep);
  rep.status = c.dim_kpq != 0 ? CheckStatus::pass : CheckStatus::fail;
  rep.notes.push_back("K_{3,1} = " + std::to_string(c.dim_kpq) + " while r - gon = " + std::to_string(r - curve->gonality()));
  return rep;
}

CheckReport check_prop32(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                         const CheckContext& ctx) {
  return vanishing_check("prop32_sweep", curve, b, l, p, 2 * p + 1, 2 * p, ctx);
}

CheckReport check_prop36(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                         const CheckContext& ctx) {
  auto rep = vanishing_check("prop36_sweep", curve, b, l, p, p + 1, 2 * p + 1, ctx);
  if (rep.status == CheckStatus::fail)
    rep.notes.push_back("COUNTEREXAMPLE to the sketched statement (deg B >= 2g+p+1, deg L >= 2g+2p+1)");
  return rep;
}

CheckReport check_cor39(const CurvePtr& curve, const DivisorSpec& l, int p, const CheckContext& ctx) {
  const auto k = DivisorSpec::canonical(*curve);
  auto rep = start("cor39", curve, k, l, p, std::nullopt, ctx);
  const int g = curve->genus();
  const int e = g - 2 - 2 * p;
  rep.hypotheses.push_back({"g - 2 - 2p >= 0", "arithmetic", e, e >= 0});
  rep.hypotheses.push_back(degree_at_least("deg L >= 2g+4p+1", l.degree(*curve), 2 * g + 4 * p + 1));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  // D = K - E with E effective of degree g - 2 - 2p, so deg D = g + 2p and h1(D) = h0(E)
  std::vector<HypothesisAudit> last;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto pts = enumerate_points(*curve, 64).points;
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(ctx.seed * 31 + static_cast<std::uint64_t>(attempt));
    std::shuffle(idx.begin(), idx.end(), rng);
    DivisorSpec d = k;
    for (int i = 0; i < e; ++i) d.subtracted.push_back({pts[idx[static_cast<std::size_t>(i)]], 1});
    d = d.normalized();
    CheckReport scratch;
    last = {h1_vanishes(curve, "h1(D) = 1 for D = " + divisor_recipe(*curve, d), d, ctx.seed),
            p_very_ample(curve, "D is p-very ample", d, p, ctx, scratch)};
    auto& h1 = last[0];
    h1.holds = h1.value.contains("h1") && h1.value["h1"] == 1;
    if (last[0].holds && last[1].holds) {
      rep.inputs["D"] = divisor_to_json(*curve, d);
      rep.inputs["D"]["recipe"] = divisor_recipe(*curve, d);
      for (auto& a : scratch.provenance["ampleness"]) rep.provenance["ampleness"].push_back(a);
      break;
    }
    if (e == 0) break;
  }
  for (auto& h : last) rep.hypotheses.push_back(std::move(h));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto c = koszul_dim(curve, k, l, p, 1, ctx.koszul_options());
  add_cell(rep, c, group(p, 1, "K"));
  conclude_vanishing(rep, c);
  return rep;
}

CheckReport check_remark4(const CurvePtr& curve, const DivisorSpec& l, int p, const CheckContext& ctx) {
  const auto k = DivisorSpec::canonical(*curve);
  auto rep = start("remark4", curve, k, l, p, std::nullopt, ctx);
  const int g = curve->genus();
  rep.hypotheses.push_back({"gon(C) >= p+3", "family certificate", curve->gonality(), curve->gonality() >= p + 3});
  rep.hypotheses.push_back(degree_at_least("deg L >= 4g-5", l.degree(*curve), 4 * g - 5));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  rep.hypotheses.push_back(p_very_ample(curve, "K is (p+1)-very ample", k, p + 1, ctx, rep));
  if (!rep.hypotheses_hold()) {
    rep.status = CheckStatus::hypothesis_unmet;
    return rep;
  }
  const auto c = koszul_dim(curve, k, l, p, 1, ctx.koszul_options());
  add_cell(rep, c, group(p, 1, "K"));
  conclude_vanishing(rep, c);
  return rep;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

CheckReport dispatch(const CheckRequest& req, const CurvePtr& curve, const CheckContext& ctx) {
  auto need = [&](const std::optional<std::string>& v, const char* what) -> DivisorSpec {
    if (!v) throw InvalidArgument(req.check + " needs " + what);
    return parse_divisor(*curve, *v);
  };
  auto need_p = [&]() {
    if (!req.p) throw InvalidArgument(req.check + " needs p");
    if (*req.p < 0) throw InvalidArgument("p must be nonnegative");
    return *req.p;
  };
  const auto& id = req.check;
  if (id == "thm11") return check_thm11(curve, need(req.l, "L"), ctx);
  if (id == "thm12") return check_thm12(curve, need(req.b, "B"), need(req.l, "L"), need_p(), ctx);
  if (id == "duality")
    return check_duality(curve, req.b ? parse_divisor(*curve, *req.b) : kTrivial, need(req.l, "L"), req.p, req.q, ctx);
  if (id == "green_regression") return check_green_regression(curve, need(req.l, "L"), ctx);
  if (id == "veronese_exception")
    return check_veronese_exception(curve, req.l ? parse_divisor(*curve, *req.l) : DivisorSpec::canonical(*curve).times(2), ctx);
  if (id == "prop32_sweep") return check_prop32(curve, need(req.b, "B"), need(req.l, "L"), need_p(), ctx);
  if (id == "prop36_sweep") return check_prop36(curve, need(req.b, "B"), need(req.l, "L"), need_p(), ctx);
  if (id == "cor39") return check_cor39(curve, need(req.l, "L"), need_p(), ctx);
  if (id == "remark4") return check_remark4(curve, need(req.l, "L"), need_p(), ctx);
  throw InvalidArgument("unknown check '" + id + "'");
}

CheckReport guarded(const CheckRequest& req, const CurvePtr& curve, const CheckContext& ctx) {
  try {
    return dispatch(req, curve, ctx);
  } catch (const BudgetExceeded& e) {
    CheckReport rep;
    rep.check = req.check;
    rep.status = CheckStatus::budget_exceeded;
    rep.error = e.what();
    rep.inputs = req.to_json();
    rep.reproduce = {{"seed", ctx.seed}, {"primes", {ctx.prime}}, {"checks", {req.to_json()}}};
    if (!e.checkpoint.empty()) rep.provenance["checkpoint"] = e.checkpoint;
    return rep;
  } catch (const std::exception& e) {
    CheckReport rep;
    rep.check = req.check;
    rep.status = CheckStatus::fail;
    rep.error = e.what();
    rep.inputs = req.to_json();
    rep.reproduce = {{"seed", ctx.seed}, {"primes", {ctx.prime}}, {"checks", {req.to_json()}}};
    return rep;
  }
}

std::vector<long long> dims_of(const CheckReport& r) {
  std::vector<long long> d;
  for (const auto& c : r.cells) d.push_back(c.dim_kpq);
  return d;
}

}  // namespace

CheckReport run_check(const CheckRequest& request, const CheckContext& base) {
  CheckContext ctx = base;
  ctx.seed = request.seed;
  CurvePtr curve;
  try {
    curve = curve_from_spec(request.curve, ctx.prime);
  } catch (const std::exception& e) {
    CheckReport rep;
    rep.check = request.check;
    rep.status = CheckStatus::fail;
    rep.error = std::string("curve: ") + e.what();
    rep.inputs = request.to_json();
    return rep;
  }
  auto rep = guarded(request, curve, ctx);
  rep.provenance["request"] = request.to_json();
  if (!ctx.second_prime || rep.status == CheckStatus::budget_exceeded) return rep;

  CheckContext ctx2 = ctx;
  ctx2.prime = *ctx.second_prime;
  ctx2.second_prime.reset();
  CurvePtr other;
  try {
    other = std::make_shared<const CurveModel>(curve->with_prime(ctx2.prime));
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("second prime skipped: ") + e.what());
    return rep;
  }
  const auto rep2 = guarded(request, other, ctx2);
  json cross{{"prime", ctx2.prime}, {"status", to_string(rep2.status)}, {"dims", dims_of(rep2)}};
  if (!rep2.error.empty()) cross["error"] = rep2.error;
  rep.provenance["second_prime"] = cross;
  if (rep2.status == CheckStatus::budget_exceeded) {
    rep.notes.push_back("second prime exceeded the budget");
  } else if (rep2.status != rep.status || dims_of(rep2) != dims_of(rep)) {
    rep.notes.push_back("dimensions or status differ between primes " + std::to_string(ctx.prime) + " and " +
                        std::to_string(ctx2.prime));
    rep.status = CheckStatus::fail;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

std::vector<int> int_list(const json& v) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<int>());
  } else {
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<std::string> string_list(const json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<std::string>());
  } else {
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::pair<int, int> range_of(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 2) throw InvalidArgument(std::string(key) + " must be [lo, hi]");
  const auto r = std::pair{v[0].get<int>(), v[1].get<int>()};
  if (r.first > r.second) throw InvalidArgument(std::string(key) + " is empty");
  return r;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw InvalidArgument("unknown key '" + k + "' in " + where);
}

StrandStrategy strategy_from(const std::string& s) {
  if (s == "direct") return StrandStrategy::direct;
  if (s == "dual") return StrandStrategy::dual;
  throw InvalidArgument("strategy must be 'direct' or 'dual'");
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  return x;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    only_keys(j,
              {"schema_version", "seed", "primes", "budget_seconds", "max_nnz", "workers", "strategy", "ampleness",
               "output", "timings", "checks"},
              "config");
    if (j.value("schema_version", 1) != 1) throw InvalidArgument("unsupported schema_version");
    ExperimentConfig c;
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("primes")) {
      c.primes.clear();
      for (const auto& p : j.at("primes")) c.primes.push_back(p.get<std::uint32_t>());
      if (c.primes.empty() || c.primes.size() > 2) throw InvalidArgument("primes must list one or two primes");
    }
    c.budget_seconds = j.value("budget_seconds", c.budget_seconds);
    c.max_nnz = j.value("max_nnz", c.max_nnz);
    c.workers = std::max(1u, j.value("workers", 1u));
    c.strategy = strategy_from(j.value("strategy", std::string("dual")));
    c.timings = j.value("timings", false);
    if (j.contains("ampleness")) {
      const auto& a = j.at("ampleness");
      only_keys(a, {"m_max", "max_supports", "random_divisors", "random_pool"}, "ampleness");
      c.ampleness.m_max = a.value("m_max", c.ampleness.m_max);
      c.ampleness.max_supports = a.value("max_supports", c.ampleness.max_supports);
      c.ampleness.random_divisors = a.value("random_divisors", c.ampleness.random_divisors);
      c.ampleness.random_pool = a.value("random_pool", c.ampleness.random_pool);
    }
    if (j.contains("output")) {
      only_keys(j.at("output"), {"json", "csv"}, "output");
      c.output_json = j.at("output").value("json", std::string{});
      c.output_csv = j.at("output").value("csv", std::string{});
    }
    if (!j.contains("checks") || !j.at("checks").is_array()) throw InvalidArgument("config needs a 'checks' array");
    for (const auto& e : j.at("checks")) {
      only_keys(e,
                {"check", "curve", "curves", "B", "L", "B_degrees", "L_degrees", "subtract_points", "p", "q",
                 "instances"},
                "check entry");
      GridEntry g;
      g.check = e.at("check").get<std::string>();
      if (std::ranges::find(check_names(), g.check) == check_names().end())
        throw InvalidArgument("unknown check '" + g.check + "'");
      if (e.contains("curves")) {
        for (const auto& cv : e.at("curves")) g.curves.push_back(cv);
      } else if (e.contains("curve")) {
        g.curves.push_back(e.at("curve"));
      } else {
        throw InvalidArgument("check entry '" + g.check + "' needs 'curve' or 'curves'");
      }
      if (e.contains("B")) g.b = string_list(e.at("B"));
      if (e.contains("L")) g.l = string_list(e.at("L"));
      if (e.contains("B_degrees")) g.b_degrees = range_of(e.at("B_degrees"), "B_degrees");
      if (e.contains("L_degrees")) g.l_degrees = range_of(e.at("L_degrees"), "L_degrees");
      if (e.contains("p")) g.p = int_list(e.at("p"));
      if (e.contains("q")) g.q = int_list(e.at("q"));
      g.subtract_points = e.value("subtract_points", 0);
      g.instances = std::max(1, e.value("instances", 1));
      c.grid.push_back(std::move(g));
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

CheckContext ExperimentConfig::context() const {
  CheckContext ctx;
  ctx.prime = primes.front();
  if (primes.size() > 1) ctx.second_prime = primes[1];
  ctx.seed = seed;
  ctx.budget_seconds = budget_seconds;
  ctx.max_nnz = max_nnz;
  ctx.strategy = strategy;
  ctx.ampleness = ampleness;
  return ctx;
}

std::vector<CheckRequest> expand_grid(const ExperimentConfig& config) {
  std::vector<CheckRequest> out;
  for (std::size_t ei = 0; ei < config.grid.size(); ++ei) {
    const auto& e = config.grid[ei];
    for (const auto& cv : e.curves) {
      const auto curve = curve_from_spec(cv, config.primes.front());
      const std::vector<std::optional<int>> ps =
          e.p.empty() ? std::vector<std::optional<int>>{std::nullopt}
                      : std::vector<std::optional<int>>(e.p.begin(), e.p.end());
      const std::vector<std::optional<int>> qs =
          e.q.empty() ? std::vector<std::optional<int>>{std::nullopt}
                      : std::vector<std::optional<int>>(e.q.begin(), e.q.end());
      for (const auto& p : ps) {
        for (int inst = 0; inst < e.instances; ++inst) {
          const std::uint64_t seed = mix(mix(config.seed, ei), static_cast<std::uint64_t>(inst));
          auto recipes = [&](const std::vector<std::string>& explicit_list, const std::optional<std::pair<int, int>>& range,
                             std::uint64_t salt) {
            std::vector<std::optional<std::string>> r;
            for (const auto& s : explicit_list) r.emplace_back(s);
            if (range)
              for (int d = range->first; d <= range->second; ++d)
                r.emplace_back(degree_recipe(*curve, d, e.subtract_points, mix(mix(seed, salt), static_cast<std::uint64_t>(d))));
            if (r.empty()) r.emplace_back(std::nullopt);
            return r;
          };
          for (const auto& b : recipes(e.b, e.b_degrees, 1))
            for (const auto& l : recipes(e.l, e.l_degrees, 2))
              for (const auto& q : qs) out.push_back(CheckRequest{e.check, cv, b, l, p, q, seed});
        }
      }
    }
  }
  return out;
}

json sweep_to_json(const std::vector<CheckReport>& reports, bool timings) {
  json summary{{"total", reports.size()}};
  for (auto s : {CheckStatus::pass, CheckStatus::fail, CheckStatus::hypothesis_unmet, CheckStatus::budget_exceeded}) {
    summary[to_string(s)] =
        std::count_if(reports.begin(), reports.end(), [&](const CheckReport& r) { return r.status == s; });
  }
  auto rs = json::array();
  for (const auto& r : reports) rs.push_back(r.to_json(timings));
  return {{"schema_version", 1}, {"summary", summary}, {"reports", rs}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string input_string(const json& inputs, const char* key) {
  if (!inputs.contains(key)) return "";
  const auto& v = inputs.at(key);
  if (v.is_object() && v.contains("recipe")) return v.at("recipe").get<std::string>();
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

std::string sweep_to_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  os << "index,check,curve,B,L,p,q,status,cells\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::string cells;
    for (std::size_t k = 0; k < r.cells.size(); ++k) {
      if (k) cells += ';';
      cells += (k < r.cell_roles.size() ? r.cell_roles[k] : "") + "=" + std::to_string(r.cells[k].dim_kpq);
    }
    const std::string curve = r.inputs.contains("curve_id") ? r.inputs.at("curve_id").get<std::string>()
                                                            : input_string(r.inputs, "curve");
    os << i << ',' << r.check << ',' << csv_field(curve) << ',' << csv_field(input_string(r.inputs, "B")) << ','
       << csv_field(input_string(r.inputs, "L")) << ',' << (r.inputs.contains("p") ? r.inputs["p"].dump() : "") << ','
       << (r.inputs.contains("q") ? r.inputs["q"].dump() : "") << ',' << to_string(r.status) << ','
       << csv_field(cells) << '\n';
  }
  return os.str();
}

bool any_failed(const std::vector<CheckReport>& reports) {
  return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.status == CheckStatus::fail; });
}

std::vector<CheckReport> run_sweep(const ExperimentConfig& config) {
  const auto requests = expand_grid(config);
  const auto ctx = config.context();
  std::vector<CheckReport> reports(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) reports[i] = run_check(requests[i], ctx);
  };
  const unsigned n = std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(requests.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!config.output_json.empty()) {
    std::ofstream out(config.output_json);
    if (!out) throw InvalidArgument("cannot write " + config.output_json);
    out << sweep_to_json(reports, config.timings).dump(2) << '\n';
  }
  if (!config.output_csv.empty()) {
    std::ofstream out(config.output_csv);
    if (!out) throw InvalidArgument("cannot write " + config.output_csv);
    out << sweep_to_csv(reports);
  }
  return reports;
}

json verdict_to_json(const CurveModel& curve, const DivisorSpec& b, const AmplenessVerdict& v) {
  json j{{"B", divisor_recipe(curve, b)},
         {"p", v.p},
         {"outcome", to_string(v.outcome)},
         {"h0", v.h0},
         {"coverage",
          {{"exhaustive", v.coverage.exhaustive},
           {"sampled", v.coverage.sampled},
           {"support_pool", v.coverage.support_pool},
           {"pool_is_all_points", v.coverage.pool_is_all_points},
           {"multiplicity_ceiling", v.coverage.multiplicity_ceiling}}},
         {"scope", v.scope}};
  if (v.witness) {
    auto pts = json::array();
    for (const auto& sp : v.witness->points)
      pts.push_back({{"point", {sp.point.coords[0], sp.point.coords[1], sp.point.coords[2]}},
                     {"multiplicity", sp.multiplicity}});
    j["witness"] = {{"divisor", v.witness->to_string()}, {"points", pts}, {"degree", v.witness->degree()},
                    {"jet_rank", v.witness_rank}};
  }
  return j;
}

}  // namespace koszul
