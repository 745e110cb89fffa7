#include "qdecouple/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdecouple/bounds.hpp"
#include "qdecouple/decoupling.hpp"
#include "qdecouple/distill.hpp"
#include "qdecouple/divergences.hpp"
#include "qdecouple/report_io.hpp"
#include "qdecouple/state_io.hpp"
#include "qdecouple/verify.hpp"

namespace qdecouple::cli {

namespace {

using nlohmann::json;
namespace dv = qdecouple::divergences;

struct Config {
  std::string state;
  std::string sigma;
  std::string split;
  std::vector<double> eps;
  std::optional<double> delta;
  std::optional<double> c;
  std::optional<long> n;
  std::optional<int> dim_c;
  std::size_t samples = 2000;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
  std::string suite;
  int instances = 50;
  double confidence_k = 2.0;
  std::vector<double> moderate;  // scale, power
  long n_min = 16;
  long n_max = 1 << 20;
  bool clamp = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvariantViolation:
    case ErrorKind::NonHermitianInput:
    case ErrorKind::BadRank:
      return kInvariant;
    default:
      return kUsage;
  }
}

/// State with the --split shape applied; the first factor plays the role of A.
DensityOperator load_state(const Config& cfg) {
  DensityOperator rho = read_state(cfg.state);
  if (cfg.split.empty()) return rho;
  SystemShape shape;
  try {
    shape = SystemShape::parse(cfg.split);
  } catch (const Error& e) {
    throw UsageError(std::string("bad --split: ") + e.what());
  }
  if (shape.total_dim() != rho.dim())
    throw Error(ErrorKind::DimensionMismatch, "--split " + cfg.split + " does not match a " +
                                                  std::to_string(rho.dim()) + "-dimensional state");
  return DensityOperator(rho.matrix(), shape);
}

std::vector<std::string> a_labels_of(const DensityOperator& rho) {
  if (rho.shape().size() < 2)
    throw UsageError("need at least two tensor factors; pass --split such as A=4,E=2");
  return {rho.shape().factors().front().label};
}

int dim_rest(const DensityOperator& rho) {
  return rho.dim() / rho.shape().factors().front().dim;
}

double single_eps(const Config& cfg) {
  if (cfg.eps.size() != 1) throw UsageError("--eps takes exactly one value for this command");
  return cfg.eps.front();
}

std::uint64_t required_seed(const Config& cfg) {
  if (!cfg.seed) throw UsageError("--seed is required for stochastic commands");
  return *cfg.seed;
}

void emit(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + cfg.out);
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double clamp_bits(double x, double log2_a) { return std::min(std::max(x, 0.0), log2_a); }

int cmd_entropy(const Config& cfg, std::ostream& out) {
  const DensityOperator rho = load_state(cfg);
  const auto a = a_labels_of(rho);
  const double eps = single_eps(cfg);
  const Matrix sigma = cfg.sigma.empty() ? dv::conditioning_operator(rho, a)
                                         : read_state(cfg.sigma).matrix();
  if (sigma.rows() != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "--sigma dimension differs");

  json j{{"command", "entropy"},
         {"shape", rho.shape().to_string()},
         {"epsilon", eps},
         {"reference", cfg.sigma.empty() ? "1_A (x) rho_B" : cfg.sigma},
         {"D", number_to_json(dv::rel_entropy(rho.matrix(), sigma))},
         {"V", number_to_json(dv::rel_entropy_variance(rho.matrix(), sigma))},
         {"H_A_given_B", number_to_json(dv::cond_entropy(rho, a))},
         {"V_A_given_B", number_to_json(dv::cond_variance(rho, a))},
         {"D_s", to_json(dv::ds_eps(rho.matrix(), sigma, eps))},
         {"D_h", to_json(dv::dh_eps(rho.matrix(), sigma, eps))},
         {"D_2", number_to_json(dv::collision_div(rho.matrix(), sigma))},
         {"nu", dv::spec_count(sigma).count()}};
  emit(cfg, out, dump(j));
  return kOk;
}

int cmd_decouple(const Config& cfg, std::ostream& out) {
  const DensityOperator rho = load_state(cfg);
  a_labels_of(rho);
  const double eps = single_eps(cfg);
  const std::uint64_t seed = required_seed(cfg);
  if (cfg.samples < 2) throw UsageError("--samples must be at least 2");
  const int dim_a = rho.shape().factors().front().dim;
  const auto ell = decoupling::empirical_ell(rho, dim_a, dim_rest(rho), eps, cfg.samples, seed,
                                             cfg.confidence_k, cfg.threads);
  if (cfg.format == "csv") {
    emit(cfg, out, delta_table_csv(ell.table));
  } else {
    json j = to_json(ell, eps, cfg.confidence_k);
    j["command"] = "decouple";
    j["shape"] = rho.shape().to_string();
    emit(cfg, out, dump(j));
  }
  return kOk;
}

json bound_json(const bounds::BoundReport& r, bool clamp, bool grid) {
  json j = to_json(r, grid);
  if (clamp) {
    j["display_clamped"] = {{"lower_bits", clamp_bits(r.lower_bits, r.params.log2_a)},
                            {"upper_bits", clamp_bits(r.upper_bits, r.params.log2_a)}};
  }
  return j;
}

int cmd_bounds(const Config& cfg, std::ostream& out, std::ostream& err) {
  const DensityOperator rho = load_state(cfg);
  const auto a = a_labels_of(rho);
  const double eps = single_eps(cfg);

  bounds::Theorem1Grid grid = bounds::Theorem1Grid::defaults(eps);
  if (cfg.delta) grid.delta_lower = grid.delta_upper = {*cfg.delta};
  if (cfg.c) grid.c = {*cfg.c};
  const auto report = bounds::optimize_theorem1(rho, a, eps, grid);
  json j = bound_json(report, cfg.clamp, false);
  j["command"] = "bounds";
  j["shape"] = rho.shape().to_string();

  if (cfg.dim_c) {
    if (!cfg.c) throw UsageError("--dimc needs --c for the certificate");
    const int dim_a = rho.shape().factors().front().dim;
    const auto split = decoupling::DecouplingSplit::from_remainder(dim_a, *cfg.dim_c, dim_rest(rho));
    j["certificate"] = {{"dimC", *cfg.dim_c}, {"c", *cfg.c},
                        {"value", bounds::pmain_certificate(rho, split, *cfg.c)}};
  }
  if (cfg.n) {
    j["second_order"] = {{"n", *cfg.n},
                         {"rate_bits", bounds::second_order_rate(rho, a, *cfg.n, eps)},
                         {"remainder", "O(log n) term omitted"}};
  }
  if (!cfg.moderate.empty()) {
    if (cfg.moderate.size() != 2) throw UsageError("--moderate takes scale,power");
    const bounds::ModerateSequence seq{cfg.moderate[0], cfg.moderate[1]};
    const auto check = bounds::check_moderate_sequence(seq, cfg.n_min, cfg.n_max);
    for (const auto& w : check.warnings) err << "warning: moderate sequence: " << w << "\n";
    json m{{"scale", seq.scale}, {"power", seq.power}, {"admissible", check.admissible},
           {"warnings", check.warnings}};
    if (cfg.n) {
      const double an = seq.scale * std::pow(static_cast<double>(*cfg.n), -seq.power);
      m["a_n"] = an;
      m["small_error_rate"] = bounds::moderate_rate(rho, a, an, bounds::ErrorSide::Small);
      m["large_error_rate"] = bounds::moderate_rate(rho, a, an, bounds::ErrorSide::Large);
    }
    j["moderate"] = m;
  }
  emit(cfg, out, dump(j));
  return kOk;
}

int cmd_sweep(const Config& cfg, std::ostream& out) {
  const DensityOperator rho = load_state(cfg);
  const auto a = a_labels_of(rho);
  if (cfg.eps.empty()) throw UsageError("--eps is required");
  std::string csv = sweep_csv_header();
  json reports = json::array();
  for (double eps : cfg.eps) {
    const auto report = bounds::optimize_theorem1(rho, a, eps);
    csv += sweep_csv_rows(eps, report.grid);
    reports.push_back(bound_json(report, cfg.clamp, true));
  }
  if (cfg.format == "csv")
    emit(cfg, out, csv);
  else
    emit(cfg, out, dump(json{{"command", "sweep"}, {"shape", rho.shape().to_string()}, {"reports", reports}}));
  return kOk;
}

int cmd_distill(const Config& cfg, std::ostream& out) {
  const DensityOperator rho = load_state(cfg);
  const auto a = a_labels_of(rho);
  const double eps = single_eps(cfg);
  json j{{"command", "distill"}, {"shape", rho.shape().to_string()}};
  if (cfg.delta) j["oneshot"] = to_json(distill::distill_lower_oneshot(rho, a, eps, *cfg.delta));
  if (cfg.n)
    j["second_order"] = {{"n", *cfg.n},
                         {"bits", distill::distill_second_order(rho, a, *cfg.n, eps)},
                         {"conditioning", distill::kConditioning}};
  if (!cfg.delta && !cfg.n) throw UsageError("distill needs --delta and/or --n");
  j["note"] = distill::kConditioningNote;
  emit(cfg, out, dump(j));
  return kOk;
}

int cmd_verify(const Config& cfg, std::ostream& out) {
  const std::uint64_t seed = cfg.seed.value_or(20261015);
  if (!cfg.suite.empty() && !verify::has_suite(cfg.suite))
    throw UsageError("unknown suite " + cfg.suite);
  std::vector<verify::SuiteResult> results;
  if (cfg.suite.empty())
    results = verify::run_all(cfg.instances, seed);
  else
    results.push_back(verify::run_suite(cfg.suite, cfg.instances, seed));
  bool all = true;
  json arr = json::array();
  std::ostringstream csv;
  csv << "suite,seed,instances,checks,passed,worst_violation\n";
  for (const auto& r : results) {
    all = all && r.ok();
    arr.push_back(to_json(r));
    csv << r.name << ',' << r.seed << ',' << r.instances << ',' << r.checks << ',' << r.passed
        << ',' << csv_number(r.worst_violation) << '\n';
  }
  if (cfg.format == "csv")
    emit(cfg, out, csv.str());
  else
    emit(cfg, out, dump(json{{"command", "verify"}, {"seed", seed}, {"all_passed", all}, {"suites", arr}}));
  return all ? kOk : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"One-shot decoupling bounds, Haar decoupling simulation and property checks"};
  app.require_subcommand(1);
  Config cfg;

  const auto add_state = [&](CLI::App* sub, bool with_split = true) {
    sub->add_option("--state", cfg.state, "state file (JSON)")->required()->check(CLI::ExistingFile);
    if (with_split) sub->add_option("--split", cfg.split, "tensor factors, e.g. A=4,E=2; the first is A");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "write output here instead of stdout");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  const auto add_eps = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.eps, "error parameter(s) in (0,1)")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* entropy = app.add_subcommand("entropy", "divergences and conditional entropies");
  add_state(entropy);
  add_eps(entropy);
  add_common(entropy);
  entropy->add_option("--sigma", cfg.sigma, "reference state (default 1_A (x) rho_B)")->check(CLI::ExistingFile);

  auto* decouple = app.add_subcommand("decouple", "Monte Carlo decoupling error per divisor of |A|");
  add_state(decouple);
  add_eps(decouple);
  add_common(decouple);
  decouple->add_option("--samples", cfg.samples, "Haar samples per divisor");
  decouple->add_option("--seed", cfg.seed, "seed (required)");
  decouple->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 256u));
  decouple->add_option("--confidence", cfg.confidence_k, "multiplier k on the standard error");

  auto* bounds_cmd = app.add_subcommand("bounds", "lower and upper bounds on log2 of the remainder dimension");
  add_state(bounds_cmd);
  add_eps(bounds_cmd);
  add_common(bounds_cmd);
  bounds_cmd->add_option("--delta", cfg.delta, "fix delta instead of the default grid");
  bounds_cmd->add_option("--c", cfg.c, "fix c instead of the default grid");
  bounds_cmd->add_option("--dimc", cfg.dim_c, "also evaluate the achievability certificate at this |C|");
  bounds_cmd->add_option("--n", cfg.n, "also evaluate the second-order rate for n copies");
  bounds_cmd->add_option("--moderate", cfg.moderate, "moderate sequence a_n = scale*n^-power as scale,power")
      ->delimiter(',');
  bounds_cmd->add_option("--n-min", cfg.n_min, "start of the range checked for the moderate sequence");
  bounds_cmd->add_option("--n-max", cfg.n_max, "end of the range checked for the moderate sequence");
  bounds_cmd->add_flag("--clamp", cfg.clamp, "add values clamped to [0, log2|A|] for display");

  auto* sweep = app.add_subcommand("sweep", "bound grids over several eps values");
  add_state(sweep);
  add_eps(sweep);
  add_common(sweep);
  sweep->add_flag("--clamp", cfg.clamp, "add clamped values for display");

  auto* distill_cmd = app.add_subcommand("distill", "distillable entanglement lower bounds");
  add_state(distill_cmd);
  add_eps(distill_cmd);
  add_common(distill_cmd);
  distill_cmd->add_option("--delta", cfg.delta, "delta for the one-shot bound");
  distill_cmd->add_option("--n", cfg.n, "number of copies for the second-order bound");

  auto* verify_cmd = app.add_subcommand("verify", "randomized property suites");
  add_common(verify_cmd);
  verify_cmd->add_option("--suite", cfg.suite, "run a single suite");
  verify_cmd->add_option("--instances", cfg.instances, "instances per suite")->check(CLI::Range(1, 100000));
  verify_cmd->add_option("--seed", cfg.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*entropy) return cmd_entropy(cfg, out);
    if (*decouple) return cmd_decouple(cfg, out);
    if (*bounds_cmd) return cmd_bounds(cfg, out, err);
    if (*sweep) return cmd_sweep(cfg, out);
    if (*distill_cmd) return cmd_distill(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace qdecouple::cli
