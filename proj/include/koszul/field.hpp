#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "koszul/errors.hpp"

namespace koszul {

/// Element of F_p, always held as its canonical representative in [0, p).
struct Fp {
  std::uint32_t value = 0;
  friend bool operator==(Fp, Fp) = default;
};

/// Session-level prime choices. The secondary prime is used for cross-checks.
struct FieldConfig {
  std::uint32_t prime = 10007;
  std::uint32_t secondary_prime = 32003;
};

bool is_prime(std::uint64_t n);

/// Arithmetic in F_p for a prime chosen at runtime (2 < p < 2^31).
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  std::uint32_t prime() const { return p_; }

  Fp zero() const { return Fp{0}; }
  Fp one() const { return Fp{1}; }
  Fp from_int(std::int64_t v) const;
  /// Representative in (-p/2, p/2].
  std::int64_t symmetric(Fp a) const;

  Fp add(Fp a, Fp b) const {
    std::uint32_t s = a.value + b.value;
    return Fp{s >= p_ ? s - p_ : s};
  }
  Fp sub(Fp a, Fp b) const { return Fp{a.value >= b.value ? a.value - b.value : a.value + p_ - b.value}; }
  Fp neg(Fp a) const { return Fp{a.value == 0 ? 0 : p_ - a.value}; }
  Fp mul(Fp a, Fp b) const {
    return Fp{static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.value) * b.value % p_)};
  }
  Fp inv(Fp a) const;  // throws DivisionByZero
  Fp div(Fp a, Fp b) const { return mul(a, inv(b)); }
  Fp pow(Fp a, std::uint64_t e) const;

  // Raw-representative variants used by the hot loops.
  std::uint32_t addr(std::uint32_t a, std::uint32_t b) const { return add(Fp{a}, Fp{b}).value; }
  std::uint32_t subr(std::uint32_t a, std::uint32_t b) const { return sub(Fp{a}, Fp{b}).value; }
  std::uint32_t mulr(std::uint32_t a, std::uint32_t b) const { return mul(Fp{a}, Fp{b}).value; }
  std::uint32_t negr(std::uint32_t a) const { return neg(Fp{a}).value; }
  std::uint32_t invr(std::uint32_t a) const { return inv(Fp{a}).value; }

  bool is_square(Fp a) const;
  /// A square root of a quadratic residue (the smaller representative); throws otherwise.
  Fp sqrt(Fp a) const;

  /// Uniform element of [0, p) from a 64-bit engine, reproducible across platforms.
  Fp random(std::mt19937_64& rng) const;
  Fp random_nonzero(std::mt19937_64& rng) const;

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint32_t p_;
};

/// Inverts every entry with one field inversion (Montgomery's trick).
/// Throws ZeroEntry carrying the index of the first zero.
std::vector<Fp> batch_inverse(const PrimeField& field, std::span<const Fp> xs);

/// Uniform integer in [0, bound) by rejection; platform independent unlike
/// std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace koszul
