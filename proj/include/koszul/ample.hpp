#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "koszul/sections.hpp"
#include "koszul/sparse.hpp"

namespace koszul {

/// Sum of distinct rational points with multiplicities.
struct EffectiveDivisor {
  std::vector<SubtractedPoint> points;

  int degree() const;
  std::string to_string() const;
  friend bool operator==(const EffectiveDivisor&, const EffectiveDivisor&) = default;
};

/// Rows: for each (P, m) in xi, the first m Hasse-derivative coefficients of
/// every basis section at P. Throws InvalidArgument on repeated points or a
/// multiplicity beyond the expansion truncation.
SparseMatrix jet_matrix(const SectionSpace& space, const EffectiveDivisor& xi);

enum class AmplenessOutcome { failure_witness, no_failure_found };

struct AmplenessCoverage {
  std::size_t exhaustive = 0;   // divisors checked in the exhaustive phase
  std::size_t sampled = 0;      // random divisors checked afterwards
  std::size_t support_pool = 0; // E: supports drawn from the first E enumerated points
  bool pool_is_all_points = false;
  int multiplicity_ceiling = 0;
};

struct AmplenessVerdict {
  int p = 0;
  AmplenessOutcome outcome = AmplenessOutcome::no_failure_found;
  std::optional<EffectiveDivisor> witness;
  std::size_t witness_rank = 0;  // rank of the witness jet matrix, < p + 1
  std::size_t h0 = 0;
  AmplenessCoverage coverage;
  std::string scope;  // what a no-failure verdict does and does not cover
};

struct AmplenessOptions {
  int m_max = 3;
  std::size_t max_supports = 1'000'000;  // E is the largest value with C(E, p+1) below this
  std::size_t random_divisors = 2000;
  std::size_t random_pool = 4000;  // points eligible for random supports
  std::uint64_t seed = 0;
};

/// Searches for an F_p-rational effective divisor of degree p + 1 failing to
/// impose independent conditions on H^0(B): exhaustively over supports from
/// the first E points with all multiplicity patterns, then randomly.
/// For B = K on hyperelliptic models m_max is raised to p + 1.
AmplenessVerdict is_p_very_ample(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b, int p,
                                 const AmplenessOptions& options = {});

/// Recomputes the jet rank of xi on a freshly sampled H^0(B) with the dense oracle.
std::size_t independent_jet_rank(std::shared_ptr<const CurveModel> curve, const DivisorSpec& b,
                                 const EffectiveDivisor& xi, std::uint64_t seed);

/// B minus the given points. Throws InvalidArgument when points repeat, are
/// off the curve or are already subtracted in B.
DivisorSpec inner_projection(const CurveModel& curve, const DivisorSpec& b, std::span<const PointOnCurve> points);

const char* to_string(AmplenessOutcome outcome);

}  // namespace koszul
