#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dolfe/checks.hpp"
#include "dolfe/dataio.hpp"

namespace dolfe {

// Flag combinations the parser cannot express (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One fit per bandwidth, side by side; a parameter is flagged when its
/// estimates move by more than two standard errors across the h values.
struct SweepTable {
  std::vector<double> h_values;
  std::vector<FitResult> fits;
  std::vector<std::string> flagged;
};

inline SweepTable sweep_bandwidth(const PanelDataset& data, const std::vector<double>& h_list,
                                  const FitConfig& base, KernelType kernel) {
  if (h_list.empty()) throw UsageError("sweep needs at least one bandwidth");
  bool any_continuous = false;
  for (const auto kind : data.covariate_kinds)
    any_continuous = any_continuous || kind == CovariateKind::continuous;
  if (!any_continuous)
    throw UsageError("all covariates are discrete: use --kernel exact instead of a sweep");

  SweepTable table;
  table.h_values = h_list;
  for (double h : h_list) {
    FitConfig cfg = base;
    cfg.bandwidth = kernel == KernelType::gaussian ? BandwidthConfig::gaussian(h)
                                                   : BandwidthConfig::uniform(h);
    table.fits.push_back(fit(data, cfg));
  }
  const FitResult& ref = table.fits.front();
  const Vector ref_se = ref.se();
  for (int p = 0; p < ref.theta.size(); ++p) {
    double lo = table.fits[0].theta[p], hi = lo;
    for (const auto& f : table.fits) {
      lo = std::min(lo, f.theta[p]);
      hi = std::max(hi, f.theta[p]);
    }
    if (hi - lo > 2.0 * ref_se[p]) table.flagged.push_back(ref.param_names[p]);
  }
  return table;
}

namespace cli {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, delim)) parts.push_back(item);
  return parts;
}

// "name(a,b)" -> name and numeric arguments.
inline bool parse_call(const std::string& s, std::string& name, std::vector<double>& args) {
  const auto open = s.find('(');
  if (open == std::string::npos) {
    name = s;
    args.clear();
    return true;
  }
  if (s.back() != ')') return false;
  name = s.substr(0, open);
  args.clear();
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  if (inner.empty()) return true;
  for (const auto& part : split(inner, ',')) {
    try {
      args.push_back(std::stod(part));
    } catch (...) {
      return false;
    }
  }
  return true;
}

inline AlphaScheme parse_alpha_scheme(const std::string& spec) {
  std::string name;
  std::vector<double> args;
  if (!parse_call(spec, name, args)) throw UsageError("bad --alpha-scheme: " + spec);
  if (name == "constant") return AlphaConstant{args.empty() ? 0.0 : args[0]};
  if (name == "gaussian")
    return AlphaGaussian{args.size() > 0 ? args[0] : 0.0, args.size() > 1 ? args[1] : 1.0};
  if (name == "correlated") return AlphaCovariateCorrelated{args.empty() ? 1.0 : args[0]};
  throw UsageError("unknown alpha scheme '" + name +
                   "' (use constant(c), gaussian(mean,sd), correlated(loading))");
}

// "name:bernoulli(0.5)" etc. for the simulator.
inline std::pair<std::string, CovariateScheme> parse_covariate_scheme(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("covariate spec needs name:scheme, got '" + spec + "'");
  const std::string cov_name = spec.substr(0, colon);
  std::string name;
  std::vector<double> args;
  if (!parse_call(spec.substr(colon + 1), name, args))
    throw UsageError("bad covariate scheme in '" + spec + "'");
  if (name == "bernoulli") return {cov_name, CovBernoulli{args.empty() ? 0.5 : args[0]}};
  if (name == "levels")
    return {cov_name, CovDiscreteUniform{args.empty() ? 2 : static_cast<int>(args[0])}};
  if (name == "gaussian")
    return {cov_name,
            CovGaussian{args.size() > 0 ? args[0] : 0.0, args.size() > 1 ? args[1] : 1.0}};
  throw UsageError("unknown covariate scheme '" + name +
                   "' (use bernoulli(p), levels(n), gaussian(mean,sd))");
}

// "name:discrete" / "name:continuous" for ingestion.
inline ColumnSchema parse_covariate_kind(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("covariate spec needs name:kind, got '" + spec + "'");
  ColumnSchema col;
  col.name = spec.substr(0, colon);
  const std::string kind = spec.substr(colon + 1);
  if (kind == "discrete")
    col.kind = CovariateKind::discrete;
  else if (kind == "continuous")
    col.kind = CovariateKind::continuous;
  else
    throw UsageError("covariate kind must be discrete or continuous, got '" + kind + "'");
  return col;
}

inline Params read_theta_file(const std::string& path, const ModelShape& shape) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open theta file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unparseable theta file " + path + ": " + e.what());
  }
  Params theta = Params::zero(shape);
  try {
    if (j.contains("beta")) {
      const auto beta = j["beta"].get<std::vector<double>>();
      if (static_cast<int>(beta.size()) != shape.num_covariates)
        throw DataError("theta file: beta must have K = " +
                        std::to_string(shape.num_covariates) + " entries");
      theta.beta = Eigen::Map<const Vector>(beta.data(), beta.size());
    }
    if (j.contains("rho")) theta.rho = j["rho"].get<double>();
    if (j.contains("gamma")) {
      const auto gamma = j["gamma"].get<std::vector<double>>();
      if (static_cast<int>(gamma.size()) != shape.num_categories - 2)
        throw DataError("theta file: gamma must list the J-2 free thresholds");
      theta.gamma_free = Eigen::Map<const Vector>(gamma.data(), gamma.size());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad theta file " + path + ": " + e.what());
  }
  return theta;
}

inline void print_fit(std::ostream& os, const FitResult& result) {
  os << (result.composite ? "composite conditional ML fit" : "pooled ordered logit fit")
     << ": loglik = " << result.loglik << ", iterations = " << result.iterations
     << ", converged = " << (result.converged ? "yes" : "no") << " (" << result.stop_reason
     << ")\n";
  const Vector se = result.se();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "  %-18s %12s %12s\n", "parameter", "estimate", "se");
  os << buf;
  for (int p = 0; p < result.theta.size(); ++p) {
    std::snprintf(buf, sizeof(buf), "  %-18s %12.6f %12.6f\n", result.param_names[p].c_str(),
                  result.theta[p], se[p]);
    os << buf;
  }
  if (!result.cell_counts.empty()) {
    os << "  cells:";
    for (const auto& [pair, w] : result.cell_counts)
      os << " (" << pair.j << "," << pair.l << ")=" << w;
    os << '\n';
  }
  for (const auto& w : result.warnings) os << "  warning: " << w << '\n';
}

struct CommonFlags {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  int threads = 0;
  int J = 4, k = 3;

  int effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  OutputFormat output_format() const {
    if (format == "json") return OutputFormat::json;
    if (format == "csv") return OutputFormat::csv;
    throw UsageError("format must be json or csv");
  }
};

struct IngestFlags {
  std::string id_col = "id", time_col = "time", outcome_col = "y";
  std::string group_col;
  std::string delimiter = ",";
  std::string na = "NA";
  std::vector<std::string> covariates;

  PanelSchema schema(const CommonFlags& common) const {
    PanelSchema s;
    s.num_categories = common.J;
    s.lag_cutoff = common.k;
    s.id_column = id_col;
    s.time_column = time_col;
    s.outcome_column = outcome_col;
    if (!group_col.empty()) s.group_column = group_col;
    if (delimiter.size() != 1 && delimiter != "\\t")
      throw UsageError("delimiter must be a single character or \\t");
    s.delimiter = delimiter == "\\t" ? '\t' : delimiter[0];
    s.na_token = na;
    for (const auto& spec : covariates) s.covariates.push_back(parse_covariate_kind(spec));
    return s;
  }
};

inline void add_common(CLI::App* cmd, CommonFlags& flags, bool with_model = true) {
  cmd->add_option("--seed", flags.seed, "RNG seed; fully determines the output");
  cmd->add_option("--output,-o", flags.output, "write machine-readable output here");
  cmd->add_option("--format", flags.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", flags.threads, "worker threads (default: machine parallelism)");
  if (with_model) {
    cmd->add_option("--J", flags.J, "number of outcome categories")->check(CLI::Range(2, 1000));
    cmd->add_option("--k", flags.k, "lag cutoff (also the normalized threshold)");
  }
}

}  // namespace detail

/// Entry point for the command-line surface; args excludes the program name.
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 estimation error.
inline int run(std::vector<std::string> args) {
  using namespace detail;
  CLI::App app{"dynamic ordered logit with fixed effects: simulation, composite "
               "conditional ML estimation, inference, and verification"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "draw a panel from the model");
  CommonFlags sim_common;
  add_common(sim, sim_common);
  int sim_n = 0;
  int burn_in = 20;
  std::string theta_file, alpha_spec = "constant(0)";
  std::vector<std::string> sim_covariates;
  sim->add_option("--n", sim_n, "number of individuals")->required();
  sim->add_option("--theta", theta_file, "JSON file with beta, rho, gamma (free thresholds)");
  sim->add_option("--alpha-scheme", alpha_spec,
                  "constant(c) | gaussian(mean,sd) | correlated(loading)");
  sim->add_option("--covariates", sim_covariates,
                  "per-covariate generator name:bernoulli(p)|levels(n)|gaussian(mean,sd)");
  sim->add_option("--burn-in", burn_in, "initial-condition burn-in transitions");

  // --- fit ---
  auto* fit_cmd = app.add_subcommand("fit", "composite conditional ML estimation");
  CommonFlags fit_common;
  add_common(fit_cmd, fit_common);
  std::string input, kernel_name = "exact", baseline = "none";
  double h = 0.0;
  double tol_grad = 1e-8, tol_step = 1e-10;
  int max_iter = 100;
  IngestFlags ingest;
  fit_cmd->add_option("--input,-i", input, "long-format delimited panel")->required();
  fit_cmd->add_option("--covariates", ingest.covariates, "columns as name:discrete|continuous");
  fit_cmd->add_option("--kernel", kernel_name, "stayer weighting: exact, gaussian, uniform")
      ->check(CLI::IsMember({"exact", "gaussian", "uniform"}));
  fit_cmd->add_option("--h", h, "bandwidth for kernel weighting");
  fit_cmd->add_option("--baseline", baseline, "also fit a pooled model: none, pooled, pooled-lag")
      ->check(CLI::IsMember({"none", "pooled", "pooled-lag"}));
  fit_cmd->add_option("--tol-grad", tol_grad, "score sup-norm tolerance");
  fit_cmd->add_option("--tol-step", tol_step, "step sup-norm tolerance");
  fit_cmd->add_option("--max-iter", max_iter, "Newton iteration cap");
  fit_cmd->add_option("--id-col", ingest.id_col, "id column name");
  fit_cmd->add_option("--time-col", ingest.time_col, "time column name");
  fit_cmd->add_option("--outcome-col", ingest.outcome_col, "outcome column name");
  fit_cmd->add_option("--group-col", ingest.group_col, "optional group column for the report");
  fit_cmd->add_option("--delimiter", ingest.delimiter, "field delimiter (default comma)");
  fit_cmd->add_option("--na", ingest.na, "missing-value token (empty always counts)");

  // --- bootstrap ---
  auto* boot = app.add_subcommand("bootstrap", "cluster bootstrap standard errors");
  CommonFlags boot_common;
  add_common(boot, boot_common);
  std::string boot_input, boot_kernel = "exact";
  double boot_h = 0.0;
  int reps = 500;
  IngestFlags boot_ingest;
  boot->add_option("--input,-i", boot_input, "long-format delimited panel")->required();
  boot->add_option("--covariates", boot_ingest.covariates, "columns as name:discrete|continuous");
  boot->add_option("--kernel", boot_kernel, "stayer weighting: exact, gaussian, uniform")
      ->check(CLI::IsMember({"exact", "gaussian", "uniform"}));
  boot->add_option("--h", boot_h, "bandwidth for kernel weighting");
  boot->add_option("--reps", reps, "bootstrap replications");
  boot->add_option("--id-col", boot_ingest.id_col, "id column name");
  boot->add_option("--time-col", boot_ingest.time_col, "time column name");
  boot->add_option("--outcome-col", boot_ingest.outcome_col, "outcome column name");
  boot->add_option("--delimiter", boot_ingest.delimiter, "field delimiter");
  boot->add_option("--na", boot_ingest.na, "missing-value token");

  // --- transitions ---
  auto* trans = app.add_subcommand("transitions", "pooled transition matrix of a panel");
  CommonFlags trans_common;
  add_common(trans, trans_common);
  std::string trans_input;
  IngestFlags trans_ingest;
  trans->add_option("--input,-i", trans_input, "long-format delimited panel")->required();
  trans->add_option("--covariates", trans_ingest.covariates,
                    "columns as name:discrete|continuous");
  trans->add_option("--id-col", trans_ingest.id_col, "id column name");
  trans->add_option("--time-col", trans_ingest.time_col, "time column name");
  trans->add_option("--outcome-col", trans_ingest.outcome_col, "outcome column name");
  trans->add_option("--delimiter", trans_ingest.delimiter, "field delimiter");
  trans->add_option("--na", trans_ingest.na, "missing-value token");

  // --- check ---
  auto* check = app.add_subcommand("check", "run the verification suite");
  CommonFlags check_common;
  check_common.seed = 7;
  add_common(check, check_common);

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "bandwidth sensitivity table");
  CommonFlags sweep_common;
  add_common(sweep, sweep_common);
  std::string sweep_input, sweep_kernel = "gaussian", h_list_spec = "0.1,1,10";
  IngestFlags sweep_ingest;
  sweep->add_option("--input,-i", sweep_input, "long-format delimited panel")->required();
  sweep->add_option("--covariates", sweep_ingest.covariates,
                    "columns as name:discrete|continuous");
  sweep->add_option("--h-list", h_list_spec, "comma-separated bandwidths");
  sweep->add_option("--kernel", sweep_kernel, "gaussian or uniform")
      ->check(CLI::IsMember({"gaussian", "uniform"}));
  sweep->add_option("--id-col", sweep_ingest.id_col, "id column name");
  sweep->add_option("--time-col", sweep_ingest.time_col, "time column name");
  sweep->add_option("--outcome-col", sweep_ingest.outcome_col, "outcome column name");
  sweep->add_option("--delimiter", sweep_ingest.delimiter, "field delimiter");
  sweep->add_option("--na", sweep_ingest.na, "missing-value token");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) {
      const ModelShape shape{sim_common.J, static_cast<int>(sim_covariates.size()),
                             sim_common.k};
      shape.validate();
      if (sim_common.output.empty()) throw UsageError("simulate requires --output");
      DgpConfig dgp;
      dgp.shape = shape;
      dgp.theta = theta_file.empty() ? Params::zero(shape)
                                     : read_theta_file(theta_file, shape);
      if (theta_file.empty() && shape.num_categories > 2) {
        // default thresholds +-1.5 steps around the normalized cutoff
        double low = 0.0, high = 0.0;
        for (int j = shape.lag_cutoff - 1; j >= 2; --j)
          dgp.theta.gamma_free[shape.gamma_slot(j) - shape.num_covariates - 1] = (low -= 1.5);
        for (int l = shape.lag_cutoff + 1; l <= shape.num_categories; ++l)
          dgp.theta.gamma_free[shape.gamma_slot(l) - shape.num_covariates - 1] = (high += 1.5);
      }
      if (!dgp.theta.model_valid(shape))
        throw DataError("theta file does not define a model-valid parameter");
      dgp.alpha = parse_alpha_scheme(alpha_spec);
      for (const auto& spec : sim_covariates) {
        auto [name, scheme] = parse_covariate_scheme(spec);
        dgp.covariate_names.push_back(name);
        dgp.covariates.push_back(scheme);
      }
      dgp.burn_in = burn_in;
      dgp.seed = sim_common.seed;
      std::cerr << "dolfe simulate: n=" << sim_n << " J=" << shape.num_categories
                << " k=" << shape.lag_cutoff << " K=" << shape.num_covariates
                << " burn_in=" << burn_in << " seed=" << sim_common.seed << '\n';
      const PanelDataset data = simulate(dgp, sim_n);
      write_panel(data, sim_common.output);
      std::cout << "wrote " << data.spells.size() << " spells to " << sim_common.output
                << '\n';
      return 0;
    }

    if (fit_cmd->parsed()) {
      const PanelSchema schema = ingest.schema(fit_common);
      std::cerr << "dolfe fit: input=" << input << " J=" << fit_common.J
                << " k=" << fit_common.k << " kernel=" << kernel_name << " h=" << h
                << " baseline=" << baseline << '\n';
      auto [data, report] = read_panel(input, schema);
      std::cout << "ingest: rows=" << report.rows_read
                << " individuals=" << report.individuals_seen
                << " kept=" << report.spells_kept
                << " dropped_incomplete=" << report.dropped_incomplete
                << " dropped_missing=" << report.dropped_missing << '\n';
      FitConfig cfg;
      cfg.tol_grad = tol_grad;
      cfg.tol_step = tol_step;
      cfg.max_iter = max_iter;
      cfg.threads = fit_common.effective_threads();
      if (kernel_name == "exact") {
        if (h != 0.0) throw UsageError("--h is only valid with --kernel gaussian|uniform");
        cfg.bandwidth = BandwidthConfig::exact_match();
      } else {
        if (h <= 0.0) throw UsageError("--kernel " + kernel_name + " requires --h > 0");
        cfg.bandwidth = kernel_name == "gaussian" ? BandwidthConfig::gaussian(h)
                                                  : BandwidthConfig::uniform(h);
      }
      const FitResult result = fit(data, cfg);
      print_fit(std::cout, result);
      if (baseline != "none") {
        const FitResult pooled = fit_pooled(data, baseline == "pooled-lag", cfg);
        print_fit(std::cout, pooled);
      }
      if (!fit_common.output.empty())
        write_results(result, fit_common.output, fit_common.output_format());
      return 0;
    }

    if (boot->parsed()) {
      const PanelSchema schema = boot_ingest.schema(boot_common);
      std::cerr << "dolfe bootstrap: input=" << boot_input << " reps=" << reps
                << " seed=" << boot_common.seed << '\n';
      auto [data, report] = read_panel(boot_input, schema);
      FitConfig cfg;
      cfg.threads = 1;
      if (boot_kernel == "exact") {
        if (boot_h != 0.0) throw UsageError("--h is only valid with --kernel gaussian|uniform");
      } else {
        if (boot_h <= 0.0) throw UsageError("--kernel " + boot_kernel + " requires --h > 0");
        cfg.bandwidth = boot_kernel == "gaussian" ? BandwidthConfig::gaussian(boot_h)
                                                  : BandwidthConfig::uniform(boot_h);
      }
      const FitResult point = fit(data, cfg);
      print_fit(std::cout, point);
      const BootstrapResult bs =
          bootstrap(data, cfg, reps, boot_common.seed, boot_common.effective_threads());
      std::cout << "bootstrap: requested=" << bs.requested
                << " converged=" << bs.converged_reps << " dropped=" << bs.dropped << '\n';
      char buf[160];
      std::snprintf(buf, sizeof(buf), "  %-18s %12s %12s %12s\n", "parameter", "se", "p2.5",
                    "p97.5");
      std::cout << buf;
      for (int p = 0; p < bs.se.size(); ++p) {
        std::snprintf(buf, sizeof(buf), "  %-18s %12.6f %12.6f %12.6f\n",
                      bs.param_names[p].c_str(), bs.se[p], bs.ci_low[p], bs.ci_high[p]);
        std::cout << buf;
      }
      if (!boot_common.output.empty())
        write_bootstrap(bs, boot_common.output, boot_common.output_format());
      return 0;
    }

    if (trans->parsed()) {
      const PanelSchema schema = trans_ingest.schema(trans_common);
      std::cerr << "dolfe transitions: input=" << trans_input << " J=" << trans_common.J
                << '\n';
      auto [data, report] = read_panel(trans_input, schema);
      const TransitionMatrix tm = transition_matrix(data);
      std::cout << "P(Y_{t+1} = col | Y_t = row), " << report.spells_kept << " spells\n";
      for (int r = 0; r < tm.probs.rows(); ++r) {
        std::cout << "  " << (r + 1) << " |";
        char buf[32];
        for (int c = 0; c < tm.probs.cols(); ++c) {
          std::snprintf(buf, sizeof(buf), " %8.4f", tm.probs(r, c));
          std::cout << buf;
        }
        std::cout << "   (n=" << tm.row_counts[r] << ")\n";
      }
      if (!trans_common.output.empty()) {
        std::ofstream out(trans_common.output);
        if (!out) throw DataError("cannot write to " + trans_common.output);
        for (int r = 0; r < tm.probs.rows(); ++r) {
          for (int c = 0; c < tm.probs.cols(); ++c)
            out << (c ? "," : "") << tm.probs(r, c);
          out << '\n';
        }
      }
      return 0;
    }

    if (check->parsed()) {
      const ModelShape shape{check_common.J, 0, check_common.k};
      shape.validate();
      std::cerr << "dolfe check: J=" << shape.num_categories << " k=" << shape.lag_cutoff
                << " seed=" << check_common.seed << '\n';
      const auto results = run_checks(shape, check_common.seed);
      bool all_pass = true;
      for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      }
      std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << '\n';
      return all_pass ? 0 : 3;
    }

    if (sweep->parsed()) {
      const PanelSchema schema = sweep_ingest.schema(sweep_common);
      std::vector<double> h_list;
      for (const auto& part : split(h_list_spec, ',')) {
        try {
          h_list.push_back(std::stod(part));
        } catch (...) {
          throw UsageError("bad --h-list entry '" + part + "'");
        }
      }
      std::cerr << "dolfe sweep: input=" << sweep_input << " h=" << h_list_spec << '\n';
      auto [data, report] = read_panel(sweep_input, schema);
      FitConfig cfg;
      cfg.threads = sweep_common.effective_threads();
      const SweepTable table = sweep_bandwidth(
          data, h_list, cfg,
          sweep_kernel == "gaussian" ? KernelType::gaussian : KernelType::uniform);
      char buf[64];
      std::cout << "  parameter        ";
      for (double hv : table.h_values) {
        std::snprintf(buf, sizeof(buf), " h=%-10g", hv);
        std::cout << buf;
      }
      std::cout << '\n';
      const auto& names = table.fits.front().param_names;
      for (std::size_t p = 0; p < names.size(); ++p) {
        std::snprintf(buf, sizeof(buf), "  %-18s", names[p].c_str());
        std::cout << buf;
        for (const auto& f : table.fits) {
          std::snprintf(buf, sizeof(buf), " %12.6f", f.theta[p]);
          std::cout << buf;
        }
        std::cout << '\n';
        std::cout << "                    ";
        for (const auto& f : table.fits) {
          std::snprintf(buf, sizeof(buf), " (%10.6f)", f.se()[p]);
          std::cout << buf;
        }
        std::cout << '\n';
      }
      if (table.flagged.empty()) {
        std::cout << "estimates stable across bandwidths (within 2 SEs)\n";
      } else {
        std::cout << "moved by more than 2 SEs across h:";
        for (const auto& name : table.flagged) std::cout << ' ' << name;
        std::cout << '\n';
      }
      if (!sweep_common.output.empty()) {
        std::ofstream out(sweep_common.output);
        if (!out) throw DataError("cannot write to " + sweep_common.output);
        out << "name";
        for (double hv : table.h_values) out << ",est_h" << hv << ",se_h" << hv;
        out << ",flagged\n";
        for (std::size_t p = 0; p < names.size(); ++p) {
          out << names[p];
          for (const auto& f : table.fits)
            out << ',' << f.theta[p] << ',' << f.se()[p];
          const bool flagged = std::find(table.flagged.begin(), table.flagged.end(),
                                         names[p]) != table.flagged.end();
          out << ',' << (flagged ? 1 : 0) << '\n';
        }
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidParameterError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace cli
}  // namespace dolfe
