#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "koszul/field.hpp"
#include "koszul/poly.hpp"

namespace koszul {

enum class CurveKind { hyperelliptic, plane };

/// coef * x^a y^b z^c
struct PlaneTerm {
  std::array<int, 3> exp{};
  std::uint32_t coef = 0;
  friend bool operator==(const PlaneTerm&, const PlaneTerm&) = default;
};

/// A rational point in normalized projective coordinates: the last nonzero
/// coordinate is 1. Hyperelliptic points are always affine (x, y, 1); the
/// single point at infinity of the odd model is never materialized.
struct PointOnCurve {
  std::array<std::uint32_t, 3> coords{0, 0, 1};
  /// Weierstrass point (y = 0) on hyperelliptic models; dF/dy = 0 on plane curves.
  bool ramified = false;

  std::uint32_t x() const { return coords[0]; }
  std::uint32_t y() const { return coords[1]; }
  bool at_infinity() const { return coords[2] == 0; }
  std::string to_string() const;

  friend bool operator==(const PointOnCurve& a, const PointOnCurve& b) { return a.coords == b.coords; }
  friend auto operator<=>(const PointOnCurve& a, const PointOnCurve& b) {
    // lexicographic in (z == 0, x, y): affine points first
    return std::tuple(a.coords[2] == 0, a.coords[0], a.coords[1]) <=>
           std::tuple(b.coords[2] == 0, b.coords[0], b.coords[1]);
  }
};

struct PointList {
  std::vector<PointOnCurve> points;
  bool shortfall = false;  // fewer points exist than were requested
};

struct SmoothnessAudit {
  std::size_t points_checked = 0;
  bool exhaustive = false;  // every rational point was checked
  bool proven = false;      // smooth by construction (squarefree hyperelliptic model)
};

/// Exponent vector of a generating function. Hyperelliptic: x^a y^b with
/// b in {0, 1}. Plane: x^a y^b z^c of total degree m.
struct Monomial {
  std::array<int, 3> exp{};
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct CurveOptions {
  std::size_t audit_points = 4000;  // plane smoothness audit size
  std::size_t max_expansion_order = 8;
};

/// Immutable explicit smooth curve over F_p.
class CurveModel {
 public:
  CurveKind kind() const { return kind_; }
  int genus() const { return genus_; }
  /// Certified gonality over C for the family (2 for hyperelliptic, D-1 for plane).
  int gonality() const { return gonality_; }
  const PrimeField& field() const { return field_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  const CurveOptions& options() const { return options_; }
  const SmoothnessAudit& audit() const { return audit_; }

  /// f(x) of y^2 = f(x); empty for plane curves.
  const Poly& hyperelliptic_f() const { return f_; }
  /// D for plane curves, 0 otherwise.
  int plane_degree() const { return degree_; }
  const std::vector<PlaneTerm>& plane_terms() const { return terms_; }

  /// Degree of one unit of the base class: 1 for the point at infinity, D for a line section.
  int unit_degree() const { return kind_ == CurveKind::hyperelliptic ? 1 : degree_; }
  /// K as a multiple of the base unit: (2g-2) * inf or (D-3) * H.
  int canonical_multiple() const { return kind_ == CurveKind::hyperelliptic ? 2 * genus_ - 2 : degree_ - 3; }

  std::string id() const;
  /// The same curve with coefficients reduced modulo another prime.
  CurveModel with_prime(std::uint32_t prime) const;

  bool contains(const PointOnCurve& pt) const;
  /// Generating functions of the base-class space for multiple m.
  std::vector<Monomial> generators(int m) const;
  /// Value of a generator at an affine point (z = 1 chart).
  Fp evaluate(const Monomial& mono, const PointOnCurve& pt) const;

  /// Affine equation in the chart where coordinate `chart` is set to 1, as
  /// terms coef * u^a v^b with (u, v) the two remaining coordinates in order.
  std::vector<std::array<std::uint32_t, 3>> chart_equation(int chart) const;

  friend CurveModel make_hyperelliptic(const PrimeField&, int, const Poly&, CurveOptions);
  friend CurveModel make_hyperelliptic(const PrimeField&, int, std::uint64_t, CurveOptions);
  friend CurveModel make_plane_curve(const PrimeField&, int, const std::vector<PlaneTerm>&, CurveOptions);
  friend CurveModel make_plane_curve(const PrimeField&, int, std::uint64_t, CurveOptions);

 private:
  CurveModel(CurveKind kind, const PrimeField& field) : kind_(kind), field_(field) {}

  CurveKind kind_;
  PrimeField field_;
  int genus_ = 0;
  int gonality_ = 0;
  int degree_ = 0;
  Poly f_;
  std::vector<PlaneTerm> terms_;
  std::optional<std::uint64_t> seed_;
  CurveOptions options_;
  SmoothnessAudit audit_;
};

/// y^2 = f(x) with deg f = 2g+1 squarefree. Throws NotSquarefree with the gcd.
CurveModel make_hyperelliptic(const PrimeField& field, int genus, const Poly& f, CurveOptions opts = {});
/// Random monic f of degree 2g+1, redrawn until squarefree.
CurveModel make_hyperelliptic(const PrimeField& field, int genus, std::uint64_t seed, CurveOptions opts = {});

/// Smooth plane curve F(x, y, z) = 0 of degree D >= 4. Throws SingularPoint
/// when an enumerated rational point has all partials vanishing.
CurveModel make_plane_curve(const PrimeField& field, int degree, const std::vector<PlaneTerm>& terms,
                            CurveOptions opts = {});
/// Random dense form of degree D, redrawn until the audit passes.
CurveModel make_plane_curve(const PrimeField& field, int degree, std::uint64_t seed, CurveOptions opts = {});

/// Rational points, lexicographic in x then y; plane points on z = 0 come last.
PointList enumerate_points(const CurveModel& curve, std::size_t max_count);

/// Power-series parametrization of the curve near a smooth rational point.
struct LocalExpansion {
  PointOnCurve point;
  int chart = 2;      // coordinate set to 1
  int parameter = 0;  // 0: t = u - u0, 1: t = v - v0
  std::size_t order = 0;
  Series u;  // first affine chart coordinate as a series in t
  Series v;  // second affine chart coordinate
};

/// Expansion to t^order. Hyperelliptic: t = x - x0 off the Weierstrass points,
/// t = y on them. Plane: t = u - u0 when dF/dv != 0, else t = v - v0.
LocalExpansion local_expansion(const CurveModel& curve, const PointOnCurve& pt, std::size_t order);

/// Series of a generator at the point, in the chart of the expansion.
Series expand_monomial(const CurveModel& curve, const Monomial& mono, const LocalExpansion& exp);

/// Chart equation evaluated on the expansion; zero through t^order when valid.
Series equation_residual(const CurveModel& curve, const LocalExpansion& exp);

struct FiberRecord {
  std::string description;
  int rational_degree = 0;  // sum of multiplicities of the rational points found
  int total_degree = 0;     // degree of the fiber as a divisor
  bool split = false;       // every point of the fiber is rational
};

struct GonalityCertificate {
  int k = 0;
  std::string pencil;
  std::optional<PointOnCurve> center;  // projection center for plane curves
  std::vector<FiberRecord> fibers;
};

/// Certifies a base-point-free pencil of degree gonality() by checking
/// at least `min_fibers` fibers. Throws ModelInconsistency on a mismatch.
GonalityCertificate pencil_certificate(const CurveModel& curve, std::size_t min_fibers = 20);

}  // namespace koszul
