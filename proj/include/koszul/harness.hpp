#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "koszul/ample.hpp"
#include "koszul/koszul.hpp"

namespace koszul {

using CurvePtr = std::shared_ptr<const CurveModel>;

// ---------------------------------------------------------------------------
// Curves and divisor recipes

/// Names accepted by curve_from_spec: g2hyp, g3quartic, g4hyp, g5hyp.
const std::vector<std::string>& curve_presets();

/// A preset name, or an object
///   {"kind": "hyperelliptic", "genus": g, "f": [c0, c1, ...] | "seed": s}
///   {"kind": "plane", "degree": D, "terms": [[a, b, c, coef], ...] | "seed": s}
///   {"preset": name}
/// with an optional "prime" overriding `default_prime`. Throws InvalidArgument.
CurvePtr curve_from_spec(const nlohmann::json& spec, std::uint32_t default_prime);
/// Preset name, inline JSON object, or path to a JSON file.
CurvePtr curve_from_argument(const std::string& arg, std::uint32_t default_prime);
/// Explicit spec that rebuilds the same model.
nlohmann::json curve_to_json(const CurveModel& curve);

/// Sums of terms [k*]atom with atoms inf (hyperelliptic unit), H (line
/// section), K / canonical, O / trivial, P<i> (the i-th enumerated rational
/// point) and (x:y:z). Points with a negative coefficient are subtracted.
/// Examples: "5*inf", "3*H - P0 - 2*P5", "canonical". Throws InvalidArgument.
DivisorSpec parse_divisor(const CurveModel& curve, const std::string& recipe);
/// Recipe with explicit point coordinates; parse_divisor inverts it.
std::string divisor_recipe(const CurveModel& curve, const DivisorSpec& d);
/// Recipe "m*unit - P_i - ..." of degree `degree` with at least `extra_points`
/// distinct points (indices below `pool`) drawn with `seed`.
std::string degree_recipe(const CurveModel& curve, int degree, int extra_points, std::uint64_t seed,
                          std::size_t pool = 64);

// ---------------------------------------------------------------------------
// Checks

enum class CheckStatus { pass, fail, hypothesis_unmet, budget_exceeded };
const char* to_string(CheckStatus s);

/// Check names: thm11, thm12, duality, green_regression, veronese_exception,
/// prop32_sweep, prop36_sweep, cor39, remark4.
const std::vector<std::string>& check_names();

struct HypothesisAudit {
  std::string name;
  std::string method;  // how the value was obtained
  nlohmann::json value;
  bool holds = false;
};

struct CheckReport {
  std::string check;
  CheckStatus status = CheckStatus::fail;
  std::vector<HypothesisAudit> hypotheses;
  std::vector<KoszulCell> cells;
  std::vector<std::string> cell_roles;  // which Koszul group each cell represents
  std::vector<std::string> notes;
  nlohmann::json inputs;      // curve, divisors, p, q as resolved
  nlohmann::json reproduce;   // single-check sweep config rerunning this report
  nlohmann::json provenance;  // primes, seeds, budgets, ampleness coverage
  std::string error;

  bool hypotheses_hold() const;
  nlohmann::json to_json(bool timings = false) const;
};

struct CheckRequest {
  std::string check;
  nlohmann::json curve = "g2hyp";
  std::optional<std::string> b;
  std::optional<std::string> l;
  std::optional<int> p;
  std::optional<int> q;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static CheckRequest from_json(const nlohmann::json& j);
};

struct CheckContext {
  std::uint32_t prime = 10007;
  std::optional<std::uint32_t> second_prime;  // recompute every cell and compare
  std::uint64_t seed = 0;
  double budget_seconds = 1800;  // per Koszul cell
  std::size_t max_nnz = 100'000'000;
  StrandStrategy strategy = StrandStrategy::dual;
  RankMethod method = RankMethod::elimination;
  bool full_strand = false;  // thm11: compute every p in [1, r-1]
  AmplenessOptions ampleness;

  KoszulOptions koszul_options() const;
};

CheckReport check_thm11(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx);
CheckReport check_thm12(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                        const CheckContext& ctx);
/// Every p in [0, r-1] and q in {0, 1, 2} unless p and q are given.
CheckReport check_duality(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, std::optional<int> p,
                          std::optional<int> q, const CheckContext& ctx);
CheckReport check_green_regression(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx);
CheckReport check_veronese_exception(const CurvePtr& curve, const DivisorSpec& l, const CheckContext& ctx);
CheckReport check_prop32(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                         const CheckContext& ctx);
CheckReport check_prop36(const CurvePtr& curve, const DivisorSpec& b, const DivisorSpec& l, int p,
                         const CheckContext& ctx);
CheckReport check_cor39(const CurvePtr& curve, const DivisorSpec& l, int p, const CheckContext& ctx);
CheckReport check_remark4(const CurvePtr& curve, const DivisorSpec& l, int p, const CheckContext& ctx);

/// Resolves the request, dispatches, maps budget exhaustion and errors to
/// statuses, and cross-checks at the second prime when one is configured.
CheckReport run_check(const CheckRequest& request, const CheckContext& ctx);

// ---------------------------------------------------------------------------
// Sweeps

struct GridEntry {
  std::string check;
  std::vector<nlohmann::json> curves;
  std::vector<std::string> b;  // explicit recipes
  std::vector<std::string> l;
  std::optional<std::pair<int, int>> b_degrees;
  std::optional<std::pair<int, int>> l_degrees;
  int subtract_points = 0;  // extra random points in degree-built divisors
  std::vector<int> p;
  std::vector<int> q;
  int instances = 1;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> primes{10007};
  double budget_seconds = 1800;
  std::size_t max_nnz = 100'000'000;
  unsigned workers = 1;
  StrandStrategy strategy = StrandStrategy::dual;
  AmplenessOptions ampleness;
  std::string output_json;
  std::string output_csv;
  bool timings = false;
  std::vector<GridEntry> grid;

  /// Throws InvalidArgument on schema violations.
  static ExperimentConfig from_json(const nlohmann::json& j);
  CheckContext context() const;
};

/// Grid points in deterministic order: entry, curve, p, B, L, q, instance.
std::vector<CheckRequest> expand_grid(const ExperimentConfig& config);
/// Runs every grid point (concurrently up to `workers`); never aborts on a
/// single failure. Writes the configured outputs.
std::vector<CheckReport> run_sweep(const ExperimentConfig& config);

nlohmann::json sweep_to_json(const std::vector<CheckReport>& reports, bool timings = false);
std::string sweep_to_csv(const std::vector<CheckReport>& reports);
bool any_failed(const std::vector<CheckReport>& reports);

nlohmann::json verdict_to_json(const CurveModel& curve, const DivisorSpec& b, const AmplenessVerdict& v);

/// Command-line entry point; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace koszul
