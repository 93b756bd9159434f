#include "polyclt/cli.hpp"

#include "polyclt/constraint_model.hpp"
#include "polyclt/diagnostics.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/error.hpp"
#include "polyclt/fourier.hpp"
#include "polyclt/io.hpp"
#include "polyclt/samplers.hpp"
#include "polyclt/standardization.hpp"

#include "CLI11.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#ifndef POLYCLT_VERSION
#define POLYCLT_VERSION "0.0.0"
#endif

namespace polyclt::cli {
namespace {

using io::json;

struct Options {
  std::string input;
  std::string rhs;
  std::string output;
  std::string barycenter;
  std::string lambda;
  std::string samples;
  std::string box;
  std::string csv;
  std::string method = "hitrun";
  std::string law = "box:1,2";
  std::uint64_t seed = 0;
  double tol = -1.0;  // subcommand default when negative
  int max_iter = 200;
  std::int64_t max_evals = 50'000'000;
  Eigen::Index count = 1000;
  Eigen::Index burn_in = -1;
  Eigen::Index thin = -1;
  int chains = 1;
  int jobs = 1;
  int groups = 3;
  int restarts = 32;
  double epsilon = 0.05;
  double threshold = 0.2;
  std::vector<double> t = {0.5, 1.0, 2.0};
  std::vector<double> gamma = {1e4};
  std::vector<double> v;
  std::vector<Eigen::Index> coords = {0, 1};
  Eigen::Index m = 2;
  Eigen::Index n = 100;
};

class Run {
 public:
  Run(std::string name, const Options& opt)
      : name_(std::move(name)), opt_(opt), start_(std::chrono::steady_clock::now()) {}

  ConstraintSystem instance() {
    if (opt_.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
    note_input(opt_.input);
    if (!opt_.rhs.empty()) note_input(opt_.rhs);
    return io::load_instance(opt_.input, opt_.rhs);
  }

  Barycenter barycenter(const ConstraintSystem& cs) {
    if (!opt_.barycenter.empty()) {
      note_input(opt_.barycenter);
      Barycenter bc = io::barycenter_from_json(io::load_json(opt_.barycenter));
      if (bc.w.size() != cs.cols() || bc.lambda0.size() != cs.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "barycenter does not match the instance");
      }
      return bc;
    }
    BarycenterOptions options;
    options.max_iter = opt_.max_iter;
    Barycenter bc = barycenter_of(cs, options);
    if (!bc.converged) {
      throw Error(ErrorCode::NotConverged, "barycenter residual " +
                                               std::to_string(bc.centering_residual));
    }
    return bc;
  }

  Vector lambda(Eigen::Index n) {
    if (opt_.lambda.empty()) throw Error(ErrorCode::InvalidArgument, "--lambda is required");
    note_input(opt_.lambda);
    Vector lam = io::read_vector(opt_.lambda);
    if (lam.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "lambda has " + std::to_string(lam.size()) +
                                                    " entries, expected " + std::to_string(n));
    }
    return lam;
  }

  Matrix samples() {
    note_input(opt_.samples);
    return io::read_matrix_csv(opt_.samples);
  }

  Box box() {
    if (opt_.box.empty()) throw Error(ErrorCode::InvalidArgument, "--box is required");
    note_input(opt_.box);
    return io::box_from_json(io::load_json(opt_.box));
  }

  void use_seed() { seeded_ = true; }

  json manifest() const {
    json inputs = json::array();
    for (const auto& [path, digest] : inputs_) inputs.push_back({{"path", path}, {"sha256", digest}});
    json m = {{"subcommand", name_},
              {"inputs", inputs},
              {"version", POLYCLT_VERSION},
              {"wall_clock_seconds",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    m["seed"] = seeded_ ? json(opt_.seed) : json(nullptr);
    return m;
  }

  /// JSON documents carry their manifest; other outputs get a sidecar file.
  void emit_json(json doc) const {
    doc["manifest"] = manifest();
    io::write_text(opt_.output, doc.dump(2) + "\n");
  }

  void emit_text(const std::string& text) const {
    io::write_text(opt_.output, text);
    if (!opt_.output.empty() && opt_.output != "-") {
      io::write_text(opt_.output + ".manifest.json", manifest().dump(2) + "\n");
    }
  }

  const std::string& name() const { return name_; }
  const Options& options() const { return opt_; }
  json partial;  // context attached to failure diagnostics

 private:
  void note_input(const std::string& path) { inputs_.emplace_back(path, io::sha256_file(path)); }

  std::string name_;
  const Options& opt_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  bool seeded_ = false;
};

SamplerConfig sampler_config(const Options& opt) {
  SamplerConfig cfg;
  cfg.kind = parse_sampler_kind(opt.method);
  cfg.count = opt.count;
  cfg.seed = opt.seed;
  cfg.burn_in = opt.burn_in;
  cfg.thin = opt.thin;
  cfg.chains = opt.chains;
  cfg.jobs = opt.jobs;
  return cfg;
}

QuadratureOptions quadrature(const Options& opt) {
  QuadratureOptions q;
  if (opt.tol > 0.0) q.tol = opt.tol;
  q.max_evals = opt.max_evals;
  return q;
}

json ks_json(const KsResult& r) {
  return {{"statistic", r.statistic}, {"p_value", r.p_value}, {"sample_size", r.sample_size}};
}

json moments_json(const MomentReport& r) {
  return {{"count", r.count},
          {"mean", r.mean},
          {"variance", r.variance},
          {"skewness", r.skewness},
          {"excess_kurtosis", r.excess_kurtosis},
          {"se_mean", r.se_mean},
          {"se_variance", r.se_variance},
          {"se_skewness", r.se_skewness},
          {"se_kurtosis", r.se_kurtosis}};
}

json validation_json(const ValidationReport& r) {
  json columns = json::array();
  for (const auto& c : r.columns) {
    columns.push_back({{"column", c.column}, {"removal_reduces_rank", c.removal_reduces_rank}});
  }
  return {{"rank_ok", r.rank_ok},
          {"rank", r.rank},
          {"feasible", r.feasible},
          {"compact", r.compact},
          {"interior_nonempty", r.interior_nonempty},
          {"interior_margin", r.interior_margin},
          {"interior_tolerance", r.interior_tolerance},
          {"column_removal_safe", r.column_removal_safe},
          {"columns", columns},
          {"notes", r.notes}};
}

json assumptions_json(const AssumptionReport& r) {
  json doc = {{"max_entry", r.max_entry},
              {"threshold", r.threshold},
              {"column_scores", r.column_scores},
              {"flagged", r.flagged}};
  if (r.max_lambda_hat) doc["max_lambda_hat"] = *r.max_lambda_hat;
  if (r.lambda_hat_norm) doc["lambda_hat_norm"] = *r.lambda_hat_norm;
  if (r.sigma) doc["sigma"] = *r.sigma;
  return doc;
}

json cf_json(const CfEvaluation& e) {
  return {{"value", {{"re", e.value.real()}, {"im", e.value.imag()}}},
          {"abs_error_estimate", e.abs_error_estimate},
          {"quad_points", e.quad_points},
          {"truncation_radius", e.truncation_radius},
          {"numerator", {{"re", e.numerator.real()}, {"im", e.numerator.imag()}}},
          {"denominator", {{"re", e.denominator.real()}, {"im", e.denominator.imag()}}}};
}

std::string column_csv(const std::vector<double>& values) {
  std::string out;
  for (double x : values) out += io::format_double(x) + "\n";
  return out;
}

int cmd_validate(Run& run) {
  const ConstraintSystem cs = run.instance();
  const ValidationReport report = validate(cs);
  run.emit_json({{"report", validation_json(report)}, {"ok", report.ok()}});
  return report.ok() ? kOk : kValidationFailure;
}

int cmd_positivize(Run& run) {
  const ConstraintSystem cs = run.instance();
  run.emit_json(io::instance_to_json(positivize(cs)));
  return kOk;
}

int cmd_barycenter(Run& run) {
  const ConstraintSystem cs = run.instance();
  BarycenterOptions options;
  if (run.options().tol > 0.0) options.tol = run.options().tol;
  options.max_iter = run.options().max_iter;
  const Barycenter bc = barycenter_of(cs, options);
  if (!bc.converged) {
    run.partial = io::barycenter_to_json(bc);
    throw Error(ErrorCode::NotConverged, "no convergence in " + std::to_string(bc.iterations) +
                                             " iterations");
  }
  run.emit_json(io::barycenter_to_json(bc));
  return kOk;
}

int cmd_standardize(Run& run) {
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  const StandardizedSystem ss = standardize(cs, bc);
  std::optional<WeightSpec> spec;
  if (!run.options().lambda.empty()) spec = weight_spec(ss, bc, run.lambda(cs.cols()));
  json doc = {{"a_tilde", io::matrix_to_json(ss.a_tilde)},
              {"a_hat", io::matrix_to_json(ss.a_hat)},
              {"b_hat", io::vector_to_json(ss.b_hat)},
              {"gram", io::matrix_to_json(ss.gram)},
              {"max_entry", ss.max_entry},
              {"assumptions",
               assumptions_json(assumption_report(ss, spec, run.options().threshold))}};
  if (spec) {
    doc["weights"] = {{"lambda_hat", io::vector_to_json(spec->lambda_hat)},
                      {"sigma", spec->sigma},
                      {"sigma_kernel", spec->sigma_kernel},
                      {"sigma_squared_raw", spec->sigma_squared_raw},
                      {"clamped", spec->clamped},
                      {"max_lambda_hat", spec->max_lambda_hat},
                      {"lambda_hat_norm", spec->lambda_hat_norm}};
  }
  run.emit_json(doc);
  return kOk;
}

int cmd_check(Run& run) {
  const Options& opt = run.options();
  const ConstraintSystem cs = run.instance();
  const ValidationReport report = validate(cs);
  run.partial["validation"] = validation_json(report);
  if (!report.ok()) {
    run.emit_json(run.partial);
    return kValidationFailure;
  }
  const Barycenter bc = run.barycenter(cs);
  const StandardizedSystem ss = standardize(cs, bc);
  run.partial["assumptions"] = assumptions_json(assumption_report(ss, std::nullopt, opt.threshold));
  run.use_seed();
  const PropertyAPartition p =
      property_a_partition(ss, opt.groups, opt.epsilon, {opt.restarts, opt.seed});
  json doc = run.partial;
  doc["partition"] = {{"K", p.groups},
                      {"subsets", p.subsets},
                      {"det_lower_bounds", p.det_lower_bounds},
                      {"determinants", p.determinants},
                      {"epsilon_achieved", p.epsilon_achieved},
                      {"attempts", p.attempts}};
  run.emit_json(doc);
  return kOk;
}

int cmd_sample(Run& run) {
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  run.use_seed();
  const SampleChain chain = draw(cs, bc.mean(), bc.w, sampler_config(run.options()));
  run.emit_text(io::matrix_to_csv(chain.points));
  return kOk;
}

int cmd_clt(Run& run) {
  const Options& opt = run.options();
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  const Vector lambda = run.lambda(cs.cols());
  CltReport report;
  if (!opt.samples.empty()) {
    report = clt_report(cs, bc, lambda, run.samples());
  } else {
    run.use_seed();
    report = clt_experiment(cs, bc, lambda, sampler_config(opt));
  }
  if (!opt.csv.empty()) io::write_text(opt.csv, column_csv(report.values));
  run.emit_json({{"ks", ks_json(report.ks)},
                 {"sigma", report.sigma},
                 {"mean_shift", report.mean_shift},
                 {"moments", moments_json(report.moments)}});
  return kOk;
}

int cmd_marginal(Run& run) {
  const Options& opt = run.options();
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  MarginalReport report;
  if (!opt.samples.empty()) {
    report = marginal_report(bc, opt.coords, run.samples());
  } else {
    run.use_seed();
    report = marginal_experiment(cs, bc, opt.coords, sampler_config(opt));
  }
  if (!opt.csv.empty()) io::write_text(opt.csv, io::matrix_to_csv(report.values));
  json ks = json::array();
  for (std::size_t i = 0; i < report.coords.size(); ++i) {
    json entry = ks_json(report.ks[i]);
    entry["coord"] = report.coords[i];
    ks.push_back(entry);
  }
  run.emit_json({{"coords", report.coords},
                 {"ks_exp1", ks},
                 {"correlation", io::matrix_to_json(report.correlation)}});
  return kOk;
}

int cmd_charfn(Run& run) {
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  const StandardizedSystem ss = standardize(cs, bc);
  const WeightSpec spec = weight_spec(ss, bc, run.lambda(cs.cols()));
  const QuadratureOptions quad = quadrature(run.options());
  std::string out = "t,re,im,err,gaussian_limit\n";
  for (double t : run.options().t) {
    const CfEvaluation e = bartlett_cf(ss, spec, t, quad);
    out += io::format_double(t) + "," + io::format_double(e.value.real()) + "," +
           io::format_double(e.value.imag()) + "," + io::format_double(e.abs_error_estimate) +
           "," + io::format_double(std::exp(-0.5 * t * t * spec.sigma * spec.sigma)) + "\n";
  }
  run.emit_text(out);
  return kOk;
}

int cmd_mixture(Run& run) {
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  const Box box = run.box();
  const CfEvaluation e = mixture_box_probability(cs, bc, box, quadrature(run.options()));
  json doc = cf_json(e);
  doc["probability"] = e.value.real();
  doc["box"] = io::box_to_json(box);
  run.emit_json(doc);
  return kOk;
}

int cmd_gammabox(Run& run) {
  const ConstraintSystem cs = run.instance();
  const Barycenter bc = run.barycenter(cs);
  const Box box = run.box();
  QuadratureOptions quad = quadrature(run.options());
  if (run.options().tol <= 0.0) quad.tol = 1e-7;
  json results = json::array();
  for (double gamma : run.options().gamma) {
    const GammaEvaluation e = gamma_box_probability(cs, bc, gamma, box, quad);
    results.push_back({{"gamma", gamma},
                       {"value", e.value},
                       {"abs_error_estimate", e.abs_error_estimate},
                       {"quad_points", e.quad_points}});
  }
  run.emit_json({{"results", results}, {"box", io::box_to_json(box)}});
  return kOk;
}

int cmd_gen(Run& run) {
  const Options& opt = run.options();
  InstanceRecipe recipe;
  recipe.m = opt.m;
  recipe.n = opt.n;
  recipe.law = ColumnLaw::parse(opt.law, opt.m);
  recipe.v = opt.v.empty() ? Vector(Vector::Ones(opt.m))
                           : Vector(Eigen::Map<const Vector>(opt.v.data(),
                                                             static_cast<Eigen::Index>(opt.v.size())));
  recipe.seed = opt.seed;
  run.use_seed();
  const GeneratedInstance gen = random_instance(recipe);
  json doc = io::instance_to_json(gen.cs);
  doc["exact_lambda0"] = io::vector_to_json(gen.exact_lambda0);
  doc["recipe"] = {{"m", recipe.m},
                   {"n", recipe.n},
                   {"law", recipe.law.describe()},
                   {"v", io::vector_to_json(recipe.v)},
                   {"seed", recipe.seed}};
  run.emit_json(doc);
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularBasis:
    case ErrorCode::DomainViolation:
    case ErrorCode::NotConverged:
    case ErrorCode::GramSingular:
    case ErrorCode::PartitionNotFound:
    case ErrorCode::QuadratureBudgetExceeded:
    case ErrorCode::DenominatorTooSmall:
    case ErrorCode::SigmaZero:
      return kNumericalFailure;
    default:
      return kValidationFailure;
  }
}

void configure_logging() {
  auto logger = spdlog::get("polyclt");
  if (!logger) logger = spdlog::stderr_color_mt("polyclt");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("POLYCLT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  configure_logging();
  Options opt;
  CLI::App app{"Entropy barycenters, standardization and limit-theorem checks for polytopes "
               "{x >= 0 : Ax = b}",
               "polyclt"};
  app.set_version_flag("--version", POLYCLT_VERSION);
  app.require_subcommand(1);

  auto input = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "instance (.json, or CSV matrix with --rhs)")->required();
    sub->add_option("--rhs", opt.rhs, "right-hand side file for CSV instances");
    sub->add_option("--output", opt.output, "output file (default stdout)");
  };
  auto with_barycenter = [&](CLI::App* sub) {
    sub->add_option("--barycenter", opt.barycenter, "barycenter JSON (computed when omitted)");
    sub->add_option("--max-iter", opt.max_iter, "Newton iteration cap when computing it");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--method", opt.method, "hitrun | dirichlet | exp");
    sub->add_option("--count", opt.count, "number of points");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--burn-in", opt.burn_in, "hit-and-run burn-in (default 10 (n - m))");
    sub->add_option("--thin", opt.thin, "hit-and-run steps per point (default n - m)");
    sub->add_option("--chains", opt.chains, "independent chains");
    sub->add_option("--jobs", opt.jobs, "worker threads (results do not depend on it)");
  };
  auto quad = [&](CLI::App* sub) {
    sub->add_option("--tol", opt.tol, "quadrature tolerance");
    sub->add_option("--max-evals", opt.max_evals, "integrand evaluation budget");
  };

  auto* validate_cmd = app.add_subcommand("validate", "rank, compactness and interior checks");
  input(validate_cmd);
  auto* positivize_cmd = app.add_subcommand("positivize", "equivalent system with A, b > 0");
  input(positivize_cmd);
  auto* barycenter_cmd = app.add_subcommand("barycenter", "entropy weights w and dual optimum");
  input(barycenter_cmd);
  barycenter_cmd->add_option("--tol", opt.tol, "gradient tolerance (default 1e-10)");
  barycenter_cmd->add_option("--max-iter", opt.max_iter, "Newton iteration cap");
  auto* standardize_cmd = app.add_subcommand("standardize", "A_tilde, A_hat, b_hat and sigma");
  input(standardize_cmd);
  with_barycenter(standardize_cmd);
  standardize_cmd->add_option("--lambda", opt.lambda, "weights lambda (one per variable)");
  standardize_cmd->add_option("--threshold", opt.threshold, "column score flag threshold");
  auto* check_cmd = app.add_subcommand("check", "assumption diagnostics and partition search");
  input(check_cmd);
  with_barycenter(check_cmd);
  check_cmd->add_option("--K", opt.groups, "number of column subsets");
  check_cmd->add_option("--epsilon", opt.epsilon, "relative distance to the diagonal ray");
  check_cmd->add_option("--restarts", opt.restarts, "randomized restarts");
  check_cmd->add_option("--seed", opt.seed, "restart seed");
  check_cmd->add_option("--threshold", opt.threshold, "column score flag threshold");
  auto* sample_cmd = app.add_subcommand("sample", "points of K (CSV, one per row)");
  input(sample_cmd);
  with_barycenter(sample_cmd);
  sampling(sample_cmd);
  auto* clt_cmd = app.add_subcommand("clt", "KS test of the standardized linear statistic");
  input(clt_cmd);
  with_barycenter(clt_cmd);
  sampling(clt_cmd);
  clt_cmd->add_option("--lambda", opt.lambda, "weights lambda")->required();
  clt_cmd->add_option("--samples", opt.samples, "reuse points written by 'sample'");
  clt_cmd->add_option("--csv", opt.csv, "write S / sigma per point");
  auto* marginal_cmd = app.add_subcommand("marginal", "KS of w_j X_j against Exp(1)");
  input(marginal_cmd);
  with_barycenter(marginal_cmd);
  sampling(marginal_cmd);
  marginal_cmd->add_option("--coords", opt.coords, "0-based coordinates")->delimiter(',');
  marginal_cmd->add_option("--samples", opt.samples, "reuse points written by 'sample'");
  marginal_cmd->add_option("--csv", opt.csv, "write w_j X_j per point");
  auto* charfn_cmd = app.add_subcommand("charfn", "characteristic function ratio at several t");
  input(charfn_cmd);
  with_barycenter(charfn_cmd);
  quad(charfn_cmd);
  charfn_cmd->add_option("--lambda", opt.lambda, "weights lambda")->required();
  charfn_cmd->add_option("--t", opt.t, "comma separated arguments")->delimiter(',');
  auto* mixture_cmd = app.add_subcommand("mixture", "box probability by the mixture formula");
  input(mixture_cmd);
  with_barycenter(mixture_cmd);
  quad(mixture_cmd);
  mixture_cmd->add_option("--box", opt.box, "box JSON {lo, hi}")->required();
  auto* gammabox_cmd = app.add_subcommand("gammabox", "box probability under the gamma density");
  input(gammabox_cmd);
  with_barycenter(gammabox_cmd);
  quad(gammabox_cmd);
  gammabox_cmd->add_option("--box", opt.box, "box JSON {lo, hi}")->required();
  gammabox_cmd->add_option("--gamma", opt.gamma, "comma separated penalties")->delimiter(',');
  auto* gen_cmd = app.add_subcommand("gen", "random instance with a known dual optimum");
  gen_cmd->add_option("--m", opt.m, "constraints")->required();
  gen_cmd->add_option("--n", opt.n, "variables")->required();
  gen_cmd->add_option("--law", opt.law, "box:lo,hi or points:a,b;c,d");
  gen_cmd->add_option("--v", opt.v, "direction v (default ones)")->delimiter(',');
  gen_cmd->add_option("--seed", opt.seed, "random seed");
  gen_cmd->add_option("--output", opt.output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << POLYCLT_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Run run(chosen->get_name(), opt);
  try {
    const std::string& name = run.name();
    if (name == "validate") return cmd_validate(run);
    if (name == "positivize") return cmd_positivize(run);
    if (name == "barycenter") return cmd_barycenter(run);
    if (name == "standardize") return cmd_standardize(run);
    if (name == "check") return cmd_check(run);
    if (name == "sample") return cmd_sample(run);
    if (name == "clt") return cmd_clt(run);
    if (name == "marginal") return cmd_marginal(run);
    if (name == "charfn") return cmd_charfn(run);
    if (name == "mixture") return cmd_mixture(run);
    if (name == "gammabox") return cmd_gammabox(run);
    if (name == "gen") return cmd_gen(run);
    std::cerr << app.help();
    return kUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    json doc = run.partial.is_null() ? json::object() : run.partial;
    doc["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    doc["manifest"] = run.manifest();
    const std::string& out = opt.output;
    const bool json_target = out.size() >= 5 && out.substr(out.size() - 5) == ".json";
    try {
      io::write_text(json_target ? out : "", doc.dump(2) + "\n");
    } catch (const Error&) {
      std::cout << doc.dump(2) << "\n";
    }
    return exit_code_for(e.code());
  }
}

}  // namespace polyclt::cli
