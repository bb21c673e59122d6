#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "koszul/field.hpp"

namespace koszul {

/// Univariate polynomial over F_p, coefficients low to high, no trailing zeros.
using Poly = std::vector<std::uint32_t>;

/// Truncated power series in a local parameter t; entry k is the coefficient of t^k.
using Series = std::vector<std::uint32_t>;

namespace poly {

void trim(Poly& a);
int degree(const Poly& a);  // -1 for the zero polynomial
Poly add(const Poly& a, const Poly& b, const PrimeField& f);
Poly sub(const Poly& a, const Poly& b, const PrimeField& f);
Poly mul(const Poly& a, const Poly& b, const PrimeField& f);
Poly scale(const Poly& a, Fp c, const PrimeField& f);
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, const PrimeField& f);
Poly monic(const Poly& a, const PrimeField& f);
Poly gcd(Poly a, Poly b, const PrimeField& f);
Poly derivative(const Poly& a, const PrimeField& f);
Fp eval(const Poly& a, Fp x, const PrimeField& f);
Poly powmod(Poly base, std::uint64_t e, const Poly& mod, const PrimeField& f);

/// Distinct roots in F_p, ascending, each with its multiplicity.
std::vector<std::pair<std::uint32_t, int>> roots(const Poly& a, const PrimeField& f);

std::string to_string(const Poly& a);

}  // namespace poly

namespace series {

Series constant(std::uint32_t c, std::size_t len);
Series add(const Series& a, const Series& b, const PrimeField& f);
Series sub(const Series& a, const Series& b, const PrimeField& f);
Series mul(const Series& a, const Series& b, const PrimeField& f);
Series scale(const Series& a, Fp c, const PrimeField& f);
Series pow(const Series& a, unsigned k, const PrimeField& f);
/// Index of the first nonzero coefficient, or the length if all vanish.
std::size_t valuation(const Series& a);

}  // namespace series

}  // namespace koszul
