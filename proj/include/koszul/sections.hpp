#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "koszul/curve.hpp"
#include "koszul/dense.hpp"

namespace koszul {

/// A point taken away from the base class. Multiplicity is >= 1 for every
/// representable divisor; a negative value records an added point, which only
/// arises from Serre-dual arithmetic (K - d) and has no section space here.
struct SubtractedPoint {
  PointOnCurve point;
  int multiplicity = 1;
  friend bool operator==(const SubtractedPoint&, const SubtractedPoint&) = default;
};

/// base * inf (hyperelliptic) or base * H (plane) minus points.
struct DivisorSpec {
  int base = 0;
  std::vector<SubtractedPoint> subtracted;  // sorted by point, distinct, nonzero multiplicities

  static DivisorSpec multiple(int m) { return DivisorSpec{m, {}}; }
  static DivisorSpec canonical(const CurveModel& curve) { return multiple(curve.canonical_multiple()); }

  /// Sorts and merges repeated points; drops zero multiplicities.
  DivisorSpec normalized() const;
  int base_degree(const CurveModel& curve) const { return base * curve.unit_degree(); }
  int subtracted_degree() const;
  int degree(const CurveModel& curve) const { return base_degree(curve) - subtracted_degree(); }
  bool representable() const;

  /// Tensor product of line bundles.
  DivisorSpec operator+(const DivisorSpec& other) const;
  DivisorSpec operator-(const DivisorSpec& other) const;
  DivisorSpec times(int k) const;

  std::string to_string() const;
  friend bool operator==(const DivisorSpec& a, const DivisorSpec& b) = default;
};

/// Affine sample points; evaluation at them is injective on every space of
/// base degree <= guard.
struct SampleSet {
  std::vector<PointOnCurve> points;
  int guard = 0;
  std::uint64_t seed = 0;
  std::vector<PointOnCurve> excluded;

  std::size_t size() const { return points.size(); }
  bool contains(const PointOnCurve& pt) const;
};

/// guard + 1 affine points chosen deterministically from the enumerated
/// points, avoiding `excluded` (on hyperelliptic models, avoiding their whole
/// x-fibers). Throws Shortfall.
SampleSet choose_sample(const CurveModel& curve, int guard, std::uint64_t seed,
                        std::span<const PointOnCurve> excluded = {});

/// Smallest guard for which every divisor in `divisors` can be materialized.
int required_guard(const CurveModel& curve, std::span<const DivisorSpec> divisors);

/// Points subtracted by any of the divisors.
std::vector<PointOnCurve> support_of(std::span<const DivisorSpec> divisors);

/// Rows t^0 .. t^(mult-1) of the local expansions of each generator at `pt`
/// (mult x generators). Entries are Hasse-derivative coefficients with
/// respect to the fixed local parameter at the point.
Matrix generator_jets(const CurveModel& curve, std::span<const Monomial> generators, const PointOnCurve& pt,
                      int mult);

/// Sparse coordinate vector: (basis index, value) pairs in increasing index order.
using Coordinates = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// H^0 of a divisor as evaluation vectors at a sample set.
class SectionSpace {
 public:
  const CurveModel& curve() const { return *curve_; }
  const std::shared_ptr<const CurveModel>& curve_ptr() const { return curve_; }
  const SampleSet& sample() const { return *sample_; }
  const std::shared_ptr<const SampleSet>& sample_ptr() const { return sample_; }
  const DivisorSpec& divisor() const { return divisor_; }
  int degree() const { return divisor_.degree(*curve_); }
  std::size_t dim() const { return evaluation_.cols(); }

  /// N x h, columns are the basis sections evaluated at the sample points.
  const Matrix& evaluation() const { return evaluation_; }
  /// Independent generating functions of the base class.
  const std::vector<Monomial>& generators() const { return generators_; }
  /// generators x h; reduced column echelon form, so the basis is canonical.
  const Matrix& coefficients() const { return coefficients_; }

  /// Coordinates of an evaluation vector in this basis. Throws GuardViolation
  /// when the vector is not in the column space.
  Coordinates coordinates(std::span<const std::uint32_t> values) const;

  friend SectionSpace riemann_roch_space(std::shared_ptr<const CurveModel>, const DivisorSpec&,
                                         std::shared_ptr<const SampleSet>);

 private:
  std::shared_ptr<const CurveModel> curve_;
  std::shared_ptr<const SampleSet> sample_;
  DivisorSpec divisor_;
  std::vector<Monomial> generators_;
  Matrix coefficients_;
  Matrix evaluation_;
  std::vector<std::size_t> solve_rows_;  // h sample rows where the evaluation matrix is invertible
  Matrix solve_inverse_;                 // inverse of that h x h block
};

/// Throws NotRepresentable, GuardViolation (base degree above guard, or a
/// subtracted point in the sample set) and ModelInconsistency (dimension audit).
SectionSpace riemann_roch_space(std::shared_ptr<const CurveModel> curve, const DivisorSpec& d,
                                std::shared_ptr<const SampleSet> sample);

/// Products of all basis pairs expressed in `target`; entry i * b.dim() + j
/// holds a_i * b_j. Throws GuardViolation when a product is not contained.
std::vector<Coordinates> product_table(const SectionSpace& a, const SectionSpace& b, const SectionSpace& target);

/// Section space of the sum divisor, certified to contain every pairwise
/// product of the two bases.
SectionSpace multiply(const SectionSpace& a, const SectionSpace& b);

struct CohomologyDims {
  int h0 = 0;
  int h1 = 0;
  bool serre_checked = false;  // h1 was also computed as h0(K - d)
  friend bool operator==(const CohomologyDims&, const CohomologyDims&) = default;
};

/// h0 and h1 from the section space of d or of K - d; cross-checked through
/// Serre duality when both are representable. Throws NotComputable.
CohomologyDims h0_h1(std::shared_ptr<const CurveModel> curve, const DivisorSpec& d,
                     std::shared_ptr<const SampleSet> sample);
/// Same, with a private sample set.
CohomologyDims h0_h1(std::shared_ptr<const CurveModel> curve, const DivisorSpec& d, std::uint64_t seed = 0);

/// One line per sample point: x,y,z followed by the basis values.
std::string to_csv(const SectionSpace& space);

}  // namespace koszul
