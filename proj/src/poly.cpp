#include "koszul/poly.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace koszul {
namespace poly {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) {
  Poly t = a;
  trim(t);
  return static_cast<int>(t.size()) - 1;
}

Poly add(const Poly& a, const Poly& b, const PrimeField& f) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = f.addr(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

Poly sub(const Poly& a, const Poly& b, const PrimeField& f) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = f.subr(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

Poly mul(const Poly& a, const Poly& b, const PrimeField& f) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = f.addr(r[i + j], f.mulr(a[i], b[j]));
  }
  trim(r);
  return r;
}

Poly scale(const Poly& a, Fp c, const PrimeField& f) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.mulr(a[i], c.value);
  trim(r);
  return r;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, const PrimeField& f) {
  Poly rem = a;
  trim(rem);
  Poly d = b;
  trim(d);
  if (d.empty()) throw DivisionByZero();
  if (rem.size() < d.size()) return {{}, rem};
  Poly q(rem.size() - d.size() + 1, 0);
  const std::uint32_t lead_inv = f.invr(d.back());
  for (std::size_t k = q.size(); k-- > 0;) {
    const std::uint32_t c = f.mulr(rem[k + d.size() - 1], lead_inv);
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < d.size(); ++j) rem[k + j] = f.subr(rem[k + j], f.mulr(c, d[j]));
  }
  trim(q);
  trim(rem);
  return {q, rem};
}

Poly monic(const Poly& a, const PrimeField& f) {
  Poly t = a;
  trim(t);
  if (t.empty()) return t;
  return scale(t, f.inv(Fp{t.back()}), f);
}

Poly gcd(Poly a, Poly b, const PrimeField& f) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(a, b, f).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, f);
}

Poly derivative(const Poly& a, const PrimeField& f) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = f.mulr(a[i], f.from_int(static_cast<std::int64_t>(i)).value);
  trim(r);
  return r;
}

Fp eval(const Poly& a, Fp x, const PrimeField& f) {
  std::uint32_t acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = f.addr(f.mulr(acc, x.value), a[i]);
  return Fp{acc};
}

Poly powmod(Poly base, std::uint64_t e, const Poly& mod, const PrimeField& f) {
  Poly result{1};
  result = divmod(result, mod, f).second;
  base = divmod(base, mod, f).second;
  while (e) {
    if (e & 1) result = divmod(mul(result, base, f), mod, f).second;
    base = divmod(mul(base, base, f), mod, f).second;
    e >>= 1;
  }
  return result;
}

namespace {

// Splits a squarefree product of distinct linear factors (Cantor-Zassenhaus,
// deterministic shifts a = 0, 1, 2, ...).
void split_linear(const Poly& h, const PrimeField& f, std::vector<std::uint32_t>& out) {
  const int d = degree(h);
  if (d <= 0) return;
  if (d == 1) {
    Poly m = monic(h, f);
    out.push_back(f.negr(m[0]));
    return;
  }
  const std::uint64_t half = (f.prime() - 1) / 2;
  for (std::uint32_t a = 0; a < f.prime(); ++a) {
    Poly shifted{a, 1};
    Poly w = powmod(shifted, half, h, f);
    w = sub(w, Poly{1}, f);
    Poly g = gcd(w, h, f);
    const int dg = degree(g);
    if (dg > 0 && dg < d) {
      split_linear(g, f, out);
      split_linear(divmod(h, g, f).first, f, out);
      return;
    }
  }
  throw Error("root splitting did not terminate");
}

}  // namespace

std::vector<std::pair<std::uint32_t, int>> roots(const Poly& a, const PrimeField& f) {
  Poly g = a;
  trim(g);
  if (g.empty()) throw InvalidArgument("roots of the zero polynomial");
  std::vector<std::pair<std::uint32_t, int>> result;
  if (degree(g) == 0) return result;
  Poly xp = powmod(Poly{0, 1}, f.prime(), g, f);
  Poly h = gcd(sub(xp, Poly{0, 1}, f), g, f);
  std::vector<std::uint32_t> rs;
  split_linear(h, f, rs);
  std::sort(rs.begin(), rs.end());
  for (std::uint32_t r : rs) {
    int mult = 0;
    Poly rest = g;
    const Poly lin{f.negr(r), 1};
    for (;;) {
      auto [q, rem] = divmod(rest, lin, f);
      if (!rem.empty()) break;
      ++mult;
      rest = std::move(q);
    }
    result.emplace_back(r, mult);
  }
  return result;
}

std::string to_string(const Poly& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ']';
  return os.str();
}

}  // namespace poly

namespace series {

Series constant(std::uint32_t c, std::size_t len) {
  Series s(len, 0);
  if (len) s[0] = c;
  return s;
}

Series add(const Series& a, const Series& b, const PrimeField& f) {
  Series r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.addr(a[i], b[i]);
  return r;
}

Series sub(const Series& a, const Series& b, const PrimeField& f) {
  Series r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.subr(a[i], b[i]);
  return r;
}

Series mul(const Series& a, const Series& b, const PrimeField& f) {
  const std::size_t len = a.size();
  Series r(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < len; ++j) r[i + j] = f.addr(r[i + j], f.mulr(a[i], b[j]));
  }
  return r;
}

Series scale(const Series& a, Fp c, const PrimeField& f) {
  Series r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.mulr(a[i], c.value);
  return r;
}

Series pow(const Series& a, unsigned k, const PrimeField& f) {
  Series r = constant(1, a.size());
  for (unsigned i = 0; i < k; ++i) r = mul(r, a, f);
  return r;
}

std::size_t valuation(const Series& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) return i;
  return a.size();
}

}  // namespace series
}  // namespace koszul
