#include "koszul/field.hpp"

#include <string>

namespace koszul {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (p <= 2 || p >= (1u << 31) || !is_prime(p))
    throw InvalidArgument("modulus must be an odd prime below 2^31, got " + std::to_string(p));
}

Fp PrimeField::from_int(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return Fp{static_cast<std::uint32_t>(r)};
}

std::int64_t PrimeField::symmetric(Fp a) const {
  if (a.value > p_ / 2) return static_cast<std::int64_t>(a.value) - p_;
  return a.value;
}

Fp PrimeField::pow(Fp a, std::uint64_t e) const {
  Fp result = one();
  while (e) {
    if (e & 1) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

Fp PrimeField::inv(Fp a) const {
  if (a.value == 0) throw DivisionByZero();
  // extended Euclid on (a, p)
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = p_, new_r = a.value;
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += p_;
  return Fp{static_cast<std::uint32_t>(t)};
}

bool PrimeField::is_square(Fp a) const {
  if (a.value == 0) return true;
  return pow(a, (p_ - 1) / 2) == one();
}

Fp PrimeField::sqrt(Fp a) const {
  if (a.value == 0) return a;
  if (!is_square(a)) throw InvalidArgument("not a quadratic residue");
  // Tonelli-Shanks
  std::uint32_t q = p_ - 1;
  unsigned s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  Fp z{2};
  while (is_square(z)) z = add(z, one());
  Fp c = pow(z, q);
  Fp x = pow(a, (q + 1) / 2);
  Fp t = pow(a, q);
  unsigned m = s;
  while (t != one()) {
    unsigned i = 0;
    Fp tt = t;
    while (tt != one()) {
      tt = mul(tt, tt);
      ++i;
    }
    Fp b = c;
    for (unsigned j = 0; j + i + 1 < m; ++j) b = mul(b, b);
    x = mul(x, b);
    c = mul(b, b);
    t = mul(t, c);
    m = i;
  }
  Fp other = neg(x);
  return other.value < x.value ? other : x;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

Fp PrimeField::random(std::mt19937_64& rng) const {
  return Fp{static_cast<std::uint32_t>(uniform_below(rng, p_))};
}

Fp PrimeField::random_nonzero(std::mt19937_64& rng) const {
  return Fp{static_cast<std::uint32_t>(1 + uniform_below(rng, p_ - 1))};
}

std::vector<Fp> batch_inverse(const PrimeField& field, std::span<const Fp> xs) {
  std::vector<Fp> prefix(xs.size());
  Fp acc = field.one();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].value == 0) throw ZeroEntry(i);
    prefix[i] = acc;
    acc = field.mul(acc, xs[i]);
  }
  Fp inv = field.inv(acc);
  std::vector<Fp> out(xs.size());
  for (std::size_t i = xs.size(); i-- > 0;) {
    out[i] = field.mul(inv, prefix[i]);
    inv = field.mul(inv, xs[i]);
  }
  return out;
}

}  // namespace koszul
