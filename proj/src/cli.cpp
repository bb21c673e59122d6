#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "koszul/errors.hpp"
#include "koszul/harness.hpp"

namespace koszul {

using nlohmann::json;

namespace {

struct Globals {
  std::uint32_t prime = 10007;
  std::uint32_t second_prime = 0;
  std::uint64_t seed = 0;
  double budget_seconds = 1800;
  std::string out;
  std::string format;
  std::string curve = "g2hyp";
  bool timings = false;
  std::string strategy = "dual";
  std::string method = "elimination";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json curve_spec(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  try {
    if (first != std::string::npos && arg[first] == '{') return json::parse(arg);
    if (std::ranges::find(curve_presets(), arg) != curve_presets().end()) return arg;
    std::ifstream in(arg);
    if (!in) throw UsageError("--curve '" + arg + "' is neither a preset, inline JSON, nor a readable file");
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("--curve: ") + e.what());
  }
}

CurvePtr resolve_curve(const Globals& g) {
  try {
    return curve_from_spec(curve_spec(g.curve), g.prime);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

DivisorSpec resolve_divisor(const CurveModel& c, const std::string& recipe, const char* flag) {
  try {
    return parse_divisor(c, recipe);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

RankMethod method_of(const std::string& s) {
  if (s == "elimination") return RankMethod::elimination;
  if (s == "wiedemann") return RankMethod::wiedemann;
  return RankMethod::dense_oracle;
}

CheckContext context_of(const Globals& g) {
  CheckContext ctx;
  ctx.prime = g.prime;
  if (g.second_prime) ctx.second_prime = g.second_prime;
  ctx.seed = g.seed;
  ctx.budget_seconds = g.budget_seconds;
  ctx.strategy = g.strategy == "direct" ? StrandStrategy::direct : StrandStrategy::dual;
  ctx.method = method_of(g.method);
  return ctx;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out);
  if (!out) throw UsageError("cannot write " + g.out);
  out << text;
}

std::string format_or(const Globals& g, const char* fallback) { return g.format.empty() ? fallback : g.format; }

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Koszul cohomology of explicit curves over prime fields"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--prime", g.prime, "Prime field characteristic")->capture_default_str();
  app.add_option("--second-prime", g.second_prime, "Recompute at this prime and compare dimensions");
  app.add_option("--seed", g.seed, "Seed for sample sets and randomized steps")->capture_default_str();
  app.add_option("--budget-seconds", g.budget_seconds, "Time budget per Koszul cell")->capture_default_str();
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--curve", g.curve, "Preset (g2hyp, g3quartic, g4hyp, g5hyp), inline JSON, or JSON file")
      ->capture_default_str();
  app.add_flag("--timings", g.timings, "Include elapsed times in reports");
  app.add_option("--strategy", g.strategy, "Linear strand strategy")
      ->check(CLI::IsMember({"direct", "dual"}))
      ->capture_default_str();
  app.add_option("--method", g.method, "Rank method")
      ->check(CLI::IsMember({"elimination", "wiedemann", "dense_oracle"}))
      ->capture_default_str();

  // betti
  auto* betti = app.add_subcommand("betti", "Betti table K_{p,q}(C,B;L)");
  std::string betti_l, betti_b = "trivial";
  long long pmax = -1;
  std::vector<int> qs{0, 1, 2};
  unsigned threads = 1;
  betti->add_option("--L", betti_l, "Divisor recipe for L")->required();
  betti->add_option("--B", betti_b, "Divisor recipe for B")->capture_default_str();
  betti->add_option("--pmax", pmax, "Largest p (default r)");
  betti->add_option("--q", qs, "Rows to compute")->delimiter(',')->capture_default_str();
  betti->add_option("--threads", threads, "Concurrent cells")->capture_default_str();

  // check
  auto* check = app.add_subcommand("check", "Run one named check");
  std::string check_name, check_l, check_b;
  std::optional<int> check_p, check_q;
  bool full_strand = false;
  check->add_option("name", check_name, "Check name")->required()->check(CLI::IsMember(check_names()));
  check->add_option("--L", check_l, "Divisor recipe for L");
  check->add_option("--B", check_b, "Divisor recipe for B");
  check->add_option("--p", check_p, "Syzygy index p");
  check->add_option("--q", check_q, "Weight q");
  check->add_flag("--full-strand", full_strand, "thm11: compute every p in [1, r-1]");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a JSON experiment configuration");
  std::string config_path;
  unsigned workers = 0;
  sweep->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", workers, "Concurrent grid points (overrides the config)");

  // pample
  auto* pample = app.add_subcommand("pample", "p-very-ampleness verdict");
  std::string pample_b;
  int pample_p = 0;
  AmplenessOptions ample;
  pample->add_option("--B", pample_b, "Divisor recipe for B")->required();
  pample->add_option("--p", pample_p, "Level p")->required()->check(CLI::NonNegativeNumber);
  pample->add_option("--m-max", ample.m_max, "Multiplicity ceiling")->capture_default_str();
  pample->add_option("--max-supports", ample.max_supports, "Exhaustive support budget")->capture_default_str();
  pample->add_option("--random-divisors", ample.random_divisors, "Random divisors after the exhaustive pass")
      ->capture_default_str();

  // rank-bench
  auto* bench = app.add_subcommand("rank-bench", "Rank the largest Koszul differential of a complex");
  std::string bench_l, bench_b = "trivial";
  int bench_q = 1;
  std::optional<long long> bench_p;
  bool bench_wiedemann = false;
  double dense_threshold = 0.08;
  bench->add_option("--L", bench_l, "Divisor recipe for L")->required();
  bench->add_option("--B", bench_b, "Divisor recipe for B")->capture_default_str();
  bench->add_option("--q", bench_q, "Weight q of the differentials")->capture_default_str();
  bench->add_option("--p", bench_p, "Use this p instead of the largest cell");
  bench->add_flag("--wiedemann", bench_wiedemann, "Also time the black-box method");
  bench->add_option("--dense-threshold", dense_threshold, "Density switching to the dense kernel")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 2;
  }

  try {
    if (betti->parsed()) {
      const auto curve = resolve_curve(g);
      const auto b = resolve_divisor(*curve, betti_b, "--B");
      const auto l = resolve_divisor(*curve, betti_l, "--L");
      if (qs.empty() || *std::min_element(qs.begin(), qs.end()) < 0) throw UsageError("--q needs nonnegative rows");
      auto opts = context_of(g).koszul_options();
      opts.threads = std::max(1u, threads);
      KoszulComplex complex(curve, b, l, *std::max_element(qs.begin(), qs.end()), opts);
      const auto table = betti_table(complex, pmax < 0 ? complex.r() : pmax, qs);
      emit(g, format_or(g, "csv") == "csv" ? table.to_csv() : table.to_json(*curve, g.timings).dump(2) + "\n");
      return 0;
    }
    if (check->parsed()) {
      const auto curve = resolve_curve(g);
      CheckRequest req;
      req.check = check_name;
      req.curve = curve_spec(g.curve);
      if (!check_l.empty()) {
        resolve_divisor(*curve, check_l, "--L");
        req.l = check_l;
      }
      if (!check_b.empty()) {
        resolve_divisor(*curve, check_b, "--B");
        req.b = check_b;
      }
      req.p = check_p;
      req.q = check_q;
      const bool needs_b = check_name == "thm12" || check_name == "prop32_sweep" || check_name == "prop36_sweep";
      const bool needs_p = needs_b || check_name == "cor39" || check_name == "remark4";
      const bool needs_l = check_name != "veronese_exception";
      if (needs_l && !req.l) throw UsageError(check_name + " needs --L");
      if (needs_b && !req.b) throw UsageError(check_name + " needs --B");
      if (needs_p && !req.p) throw UsageError(check_name + " needs --p");
      if (req.p && *req.p < 0) throw UsageError("--p must be nonnegative");
      req.seed = g.seed;
      auto ctx = context_of(g);
      ctx.full_strand = full_strand;
      const auto report = run_check(req, ctx);
      if (format_or(g, "json") == "csv")
        emit(g, sweep_to_csv({report}));
      else
        emit(g, report.to_json(g.timings).dump(2) + "\n");
      return report.status == CheckStatus::fail ? 1 : 0;
    }
    if (sweep->parsed()) {
      std::ifstream in(config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(config_path + ": " + e.what());
      }
      ExperimentConfig config;
      try {
        config = ExperimentConfig::from_json(j);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      if (app.count("--prime")) config.primes.front() = g.prime;
      if (app.count("--second-prime")) config.primes = {config.primes.front(), g.second_prime};
      if (app.count("--seed")) config.seed = g.seed;
      if (app.count("--budget-seconds")) config.budget_seconds = g.budget_seconds;
      if (app.count("--strategy")) config.strategy = g.strategy == "direct" ? StrandStrategy::direct : StrandStrategy::dual;
      if (workers) config.workers = workers;
      if (g.timings) config.timings = true;
      if (!g.out.empty()) config.output_json = g.out;
      const auto reports = run_sweep(config);
      if (g.out.empty()) {
        if (format_or(g, "json") == "csv")
          std::cout << sweep_to_csv(reports);
        else
          std::cout << sweep_to_json(reports, config.timings)["summary"].dump(2) << '\n';
      }
      return any_failed(reports) ? 1 : 0;
    }
    if (pample->parsed()) {
      const auto curve = resolve_curve(g);
      const auto b = resolve_divisor(*curve, pample_b, "--B");
      ample.seed = g.seed;
      const auto v = is_p_very_ample(curve, b, pample_p, ample);
      auto j = verdict_to_json(*curve, b, v);
      j["curve"] = curve_to_json(*curve);
      if (format_or(g, "json") == "csv") {
        std::ostringstream os;
        os << "B,p,outcome,witness,jet_rank,exhaustive,sampled\n"
           << divisor_recipe(*curve, b) << ',' << pample_p << ',' << to_string(v.outcome) << ','
           << (v.witness ? v.witness->to_string() : "") << ',' << v.witness_rank << ',' << v.coverage.exhaustive
           << ',' << v.coverage.sampled << '\n';
        emit(g, os.str());
      } else {
        emit(g, j.dump(2) + "\n");
      }
      return 0;
    }
    if (bench->parsed()) {
      const auto curve = resolve_curve(g);
      const auto b = resolve_divisor(*curve, bench_b, "--B");
      const auto l = resolve_divisor(*curve, bench_l, "--L");
      auto opts = context_of(g).koszul_options();
      KoszulComplex complex(curve, b, l, std::max(bench_q, 0), opts);
      json out{{"curve", curve_to_json(*curve)},
               {"B", divisor_recipe(*curve, b)},
               {"L", divisor_recipe(*curve, l)},
               {"q", bench_q},
               {"r", complex.r()}};
      auto candidates = json::array();
      long long best_p = -1;
      std::size_t best_nnz = 0;
      for (long long p = 1; p <= static_cast<long long>(complex.n()); ++p) {
        if (bench_p && p != *bench_p) continue;
        const auto m = complex.differential(p, bench_q);
        candidates.push_back({{"p", p}, {"rows", m.rows()}, {"cols", m.cols()}, {"nnz", m.nnz()}});
        if (best_p < 0 || m.nnz() > best_nnz) best_p = p, best_nnz = m.nnz();
      }
      if (best_p < 0) throw UsageError("no differential matches --p");
      out["candidates"] = candidates;
      const auto m = complex.differential(best_p, bench_q);
      RankBudget budget = opts.budget;
      budget.dense_threshold = dense_threshold;
      const auto r = rank_sparse(m, budget);
      out["largest"] = {{"p", best_p},
                        {"rows", m.rows()},
                        {"cols", m.cols()},
                        {"nnz", m.nnz()},
                        {"rank", r.rank},
                        {"fill",
                         {{"initial_nnz", r.fill.initial_nnz},
                          {"peak_nnz", r.fill.peak_nnz},
                          {"fill_ratio", r.fill.initial_nnz ? double(r.fill.peak_nnz) / double(r.fill.initial_nnz) : 0.0},
                          {"sparse_pivots", r.fill.sparse_pivots},
                          {"dense_rows", r.fill.dense_rows},
                          {"dense_cols", r.fill.dense_cols}}},
                        {"elapsed_seconds", r.elapsed_seconds}};
      if (bench_wiedemann) {
        const auto w = rank_wiedemann(m, g.seed);
        out["wiedemann"] = {{"rank", w.rank},
                            {"repetitions", w.repetitions},
                            {"method", to_string(w.method)},
                            {"elapsed_seconds", w.elapsed_seconds},
                            {"agrees", w.rank == r.rank}};
      }
      if (format_or(g, "json") == "csv") {
        std::ostringstream os;
        os << "p,q,rows,cols,nnz,rank,peak_nnz,elapsed_seconds\n"
           << best_p << ',' << bench_q << ',' << m.rows() << ',' << m.cols() << ',' << m.nnz() << ',' << r.rank << ','
           << r.fill.peak_nnz << ',' << r.elapsed_seconds << '\n';
        emit(g, os.str());
      } else {
        emit(g, out.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace koszul
