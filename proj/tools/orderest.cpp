#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orderest/demo_data.hpp"
#include "orderest/error.hpp"
#include "orderest/io.hpp"
#include "orderest/matrix_estimator.hpp"
#include "orderest/ordinal.hpp"
#include "orderest/report.hpp"
#include "orderest/sim.hpp"

using namespace orderest;
using report::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

constexpr const char* kSeedEnv = "ORDEREST_SEED";

struct NonConvergence : Error {
  using Error::Error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "json";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError(std::string(kSeedEnv) + " must be an unsigned integer");
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty() || c.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw DomainError("cannot write " + c.output);
  out << text;
}

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  cmd->add_option("--seed", c.seed, "Master seed (default: $" + std::string(kSeedEnv) + " or generated)");
  cmd->add_option("-o,--output", c.output, "Write the report here instead of stdout");
  if (with_format) cmd->add_option("--format", c.format, "json or table")->check(CLI::IsMember({"json", "table"}));
}

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// estimate ----------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string input;
  std::string row_order = "simple";
  std::string col_order = "simple";
  std::string row_weights = "ones";
  std::string col_weights = "ones";
  double tol = 1e-10;
  int max_cycles = 1000;
};

WeightMatrix load_weights(const std::string& what, std::size_t rows, std::size_t cols) {
  if (what == "ones") return WeightMatrix::ones(rows, cols);
  Matrix w = io::read_matrix_file(what);
  if (w.rows() != rows || w.cols() != cols)
    throw DimensionError("weight matrix " + what + " does not match the data dimensions");
  return WeightMatrix(std::move(w));
}

int run_estimate(const EstimateArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  const Matrix x = io::read_matrix_file(a.input);
  const MatrixOrderSpec spec(x.rows(), x.cols(), OrderRestriction::parse(a.row_order, x.cols()),
                             OrderRestriction::parse(a.col_order, x.rows()));
  const WeightMatrix wr = load_weights(a.row_weights, x.rows(), x.cols());
  const WeightMatrix wc = load_weights(a.col_weights, x.rows(), x.cols());
  EstimateOptions opt;
  opt.tol = a.tol;
  opt.max_cycles = a.max_cycles;
  if (!(opt.tol > 0.0)) throw DomainError("--tol must be positive");
  if (opt.max_cycles < 1) throw DomainError("--max-cycles must be at least 1");
  const MatrixEstimate e = estimate(x, spec, wr, wc, opt);

  Json cfg;
  cfg["input"] = a.input;
  cfg["rows"] = x.rows();
  cfg["cols"] = x.cols();
  cfg["row_order"] = spec.row_restriction().to_config();
  cfg["col_order"] = spec.col_restriction().to_config();
  cfg["row_weights"] = a.row_weights;
  cfg["col_weights"] = a.col_weights;
  cfg["tol"] = opt.tol;
  cfg["max_cycles"] = opt.max_cycles;
  Json j = report::header("estimate", seed, std::move(cfg));
  j["one_cycle_applicable"] = one_cycle_applicable(spec, wr, wc);
  j["result"] = report::estimate(e, spec, opt.feasibility_tol);

  if (a.common.format == "json") {
    emit(a.common, report::dump(j));
  } else {
    std::ostringstream out;
    auto put = [&](const char* name, const Matrix& m) {
      out << name << '\n';
      for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) out << (k ? " " : "  ") << fmt(m(i, k), 6);
        out << '\n';
      }
    };
    out << "# orderest " << report::version() << " estimate seed=" << seed << '\n';
    put("theta_tilde_1", e.theta_tilde_1);
    put("theta_tilde_2", e.theta_tilde_2);
    put("final", e.final);
    out << "cycles " << e.iterations_1 << ' ' << e.iterations_2 << '\n';
    out << "converged " << (e.converged ? "yes" : "no") << '\n';
    out << "feasible " << (j["result"]["feasibility"]["feasible"].get<bool>() ? "yes" : "no") << '\n';
    emit(a.common, out.str());
  }
  if (!e.converged) {
    throw NonConvergence("no convergence within " + std::to_string(opt.max_cycles) +
                         " cycles; last sup-norm changes " + fmt(e.final_delta_1, 12) + " and " +
                         fmt(e.final_delta_2, 12));
  }
  return kExitOk;
}

// test ---------------------------------------------------------------------

struct TestArgs {
  Common common;
  std::string input;
  std::string hypothesis = "columns";
  std::string row_order = "simple";
  std::string col_order = "simple";
  std::size_t replicates = 10000;
  std::size_t categories = 0;
  bool weak = false;
  bool full_pipeline = false;
  unsigned threads = 1;
};

Hypothesis parse_hypothesis(const std::string& h) {
  if (h == "columns") return Hypothesis::Columns;
  if (h == "rows") return Hypothesis::Rows;
  return Hypothesis::Both;
}

int run_test(const TestArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  if (a.replicates < 1) throw DomainError("--replicates must be at least 1");

  std::vector<std::string> groups, variables;
  std::optional<MultiResponseDataset> data;
  if (io::is_record_csv(a.input)) {
    auto t = io::read_records_file(a.input, a.categories);
    groups = std::move(t.groups);
    variables = std::move(t.variables);
    data.emplace(std::move(t.data));
  } else {
    auto t = io::read_counts_file(a.input);
    if (a.categories && a.categories != t.counts.categories())
      throw DimensionError("--categories does not match the count header");
    groups = std::move(t.groups);
    variables = {"counts"};
    data.emplace(MultiResponseDataset::from_counts(t.counts));
  }

  const Hypothesis h = parse_hypothesis(a.hypothesis);
  std::vector<std::size_t> vars;
  std::vector<MatrixOrderSpec> specs;
  for (std::size_t v = 0; v < data->variables(); ++v) {
    const std::size_t cats = data->categories(v);
    vars.push_back(v);
    specs.emplace_back(data->groups(), cats, OrderRestriction::parse(a.row_order, cats),
                       OrderRestriction::parse(a.col_order, data->groups()));
  }
  BootstrapOptions opt;
  opt.replicates = a.replicates;
  opt.seed = seed;
  opt.strict_exceedance = !a.weak;
  opt.full_pipeline = a.full_pipeline;
  opt.threads = a.threads;
  auto results = bootstrap_pvalues(*data, vars, h, specs, opt);
  const std::size_t m = results.size();
  if (m > 1)
    for (auto& r : results) r.p_adjusted = bonferroni(r.p_value, m);

  Json cfg;
  cfg["input"] = a.input;
  cfg["groups"] = groups;
  cfg["hypothesis"] = a.hypothesis;
  cfg["row_order"] = a.row_order;
  cfg["col_order"] = a.col_order;
  cfg["replicates"] = a.replicates;
  cfg["exceedance"] = a.weak ? ">=" : ">";
  cfg["full_pipeline"] = a.full_pipeline;
  Json j = report::header("test", seed, std::move(cfg));
  j["bonferroni_m"] = m;
  Json tests = Json::array();
  for (std::size_t k = 0; k < m; ++k) {
    Json t;
    t["variable"] = variables[k];
    t.update(report::test_result(results[k], specs[k]));
    tests.push_back(std::move(t));
  }
  j["tests"] = std::move(tests);

  if (a.common.format == "json") {
    emit(a.common, report::dump(j));
  } else {
    std::ostringstream out;
    out << "# orderest " << report::version() << " test seed=" << seed << " replicates=" << a.replicates << '\n';
    char line[200];
    std::snprintf(line, sizeof line, "%-24s %10s %10s %10s\n", "variable", "statistic", "p", "p_bonf");
    out << line;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& r = results[k];
      std::snprintf(line, sizeof line, "%-24s %10s %10s %10s\n", variables[k].c_str(), fmt(r.statistic, 4).c_str(),
                    fmt(r.p_value, 4).c_str(), r.p_adjusted ? fmt(*r.p_adjusted, 4).c_str() : "-");
      out << line;
    }
    emit(a.common, out.str());
  }
  return kExitOk;
}

// simulate-estimation -------------------------------------------------------

struct EstimationArgs {
  Common common;
  std::size_t rows = 2;
  std::size_t cols = 5;
  std::size_t runs = 2000;
  double noise_scale = 1.0;
  bool grid = false;
};

int run_simulate_estimation(const EstimationArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  std::vector<std::pair<std::size_t, std::size_t>> dims{{a.rows, a.cols}};
  if (a.grid) dims = {{2, 5}, {2, 10}, {5, 5}, {5, 10}};
  std::vector<EstimationSimReport> reports;
  for (auto [i, j] : dims) {
    EstimationSimConfig c;
    c.rows = i;
    c.cols = j;
    c.runs = a.runs;
    c.seed = seed;
    c.noise_scale = a.noise_scale;
    reports.push_back(run_estimation_sim(c));
  }
  Json cfg;
  if (a.grid) {
    cfg["grid"] = true;
  } else {
    cfg["I"] = a.rows;
    cfg["J"] = a.cols;
  }
  cfg["runs"] = a.runs;
  cfg["noise_scale"] = a.noise_scale;
  if (a.common.format == "json") {
    Json j = report::header("simulate-estimation", seed, std::move(cfg));
    Json rows = Json::array();
    for (const auto& r : reports) rows.push_back(report::estimation_sim(r));
    j["results"] = std::move(rows);
    emit(a.common, report::dump(j));
  } else {
    std::ostringstream out;
    out << "# orderest " << report::version() << " simulate-estimation seed=" << seed << " runs=" << a.runs
        << " noise_scale=" << a.noise_scale << '\n';
    out << report::estimation_table(reports);
    emit(a.common, out.str());
  }
  for (const auto& r : reports)
    if (r.nonconverged_fits)
      throw NonConvergence(std::to_string(r.nonconverged_fits) + " fits did not converge");
  return kExitOk;
}

// simulate-power ------------------------------------------------------------

struct PowerArgs {
  Common common;
  std::vector<std::string> scenarios{"t3-null-01"};
  long long n = 20;
  std::size_t sims = 2000;
  std::size_t replicates = 500;
  double alpha = 0.05;
  bool no_ks = false;
  bool weak = false;
  unsigned threads = 1;
  std::string csv;
};

int run_simulate_power(const PowerArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  if (a.n < 1) throw DomainError("--n must be at least 1");
  std::vector<PowerScenario> chosen;
  for (const auto& id : a.scenarios) {
    if (id == "all") {
      for (const auto& s : table3_scenarios()) chosen.push_back(s);
    } else {
      chosen.push_back(find_scenario(id));
    }
  }
  std::vector<PowerSimReport> reports;
  for (const auto& sc : chosen) {
    PowerSimConfig c;
    c.scenario = sc;
    c.n = a.n;
    c.sims = a.sims;
    c.replicates = a.replicates;
    c.alpha = a.alpha;
    c.ks = !a.no_ks;
    c.seed = seed;
    c.strict_exceedance = !a.weak;
    c.threads = a.threads;
    reports.push_back(run_power_sim(c));
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv, std::ios::binary);
    if (!out) throw DomainError("cannot write " + a.csv);
    out << report::power_csv(reports);
  }
  Json cfg;
  cfg["scenarios"] = a.scenarios;
  cfg["n"] = a.n;
  cfg["sims"] = a.sims;
  cfg["replicates"] = a.replicates;
  cfg["alpha"] = a.alpha;
  cfg["ks"] = !a.no_ks;
  cfg["exceedance"] = a.weak ? ">=" : ">";
  if (a.common.format == "json") {
    Json j = report::header("simulate-power", seed, std::move(cfg));
    Json rows = Json::array();
    for (const auto& r : reports) rows.push_back(report::power_sim(r));
    j["results"] = std::move(rows);
    emit(a.common, report::dump(j));
  } else {
    std::ostringstream out;
    out << "# orderest " << report::version() << " simulate-power seed=" << seed << " n=" << a.n
        << " sims=" << a.sims << " replicates=" << a.replicates << '\n';
    char line[200];
    std::snprintf(line, sizeof line, "%-12s %8s %8s %8s %8s\n", "scenario", "T1", "se", "KS", "se");
    out << line;
    for (const auto& r : reports) {
      std::snprintf(line, sizeof line, "%-12s %8s %8s %8s %8s%s\n", r.config.scenario.id.c_str(),
                    fmt(r.t1_rate, 4).c_str(), fmt(r.t1_se, 4).c_str(), r.ks_rate ? fmt(*r.ks_rate, 4).c_str() : "-",
                    r.ks_se ? fmt(*r.ks_se, 4).c_str() : "-", r.config.scenario.normalized ? "  (normalized)" : "");
      out << line;
    }
    emit(a.common, out.str());
  }
  return kExitOk;
}

// analyze-demo --------------------------------------------------------------

struct DemoArgs {
  Common common;
  std::size_t replicates = 50000;
  double alpha = 0.05;
  bool weak = false;
  unsigned threads = 1;
  std::string export_records;
};

int run_analyze_demo(const DemoArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  if (a.replicates < 1) throw DomainError("--replicates must be at least 1");
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw DomainError("--alpha must lie in (0, 1)");
  const MultiResponseDataset data = demo::dataset();
  if (!a.export_records.empty()) {
    std::ofstream out(a.export_records, std::ios::binary);
    if (!out) throw DomainError("cannot write " + a.export_records);
    io::write_records_csv(out, {demo::genotypes(), demo::variables(), data});
  }
  std::vector<std::size_t> vars;
  std::vector<MatrixOrderSpec> specs;
  for (std::size_t v = 0; v < data.variables(); ++v) {
    vars.push_back(v);
    specs.push_back(ordinal_simple_spec(data.groups(), data.categories(v)));
  }
  BootstrapOptions opt;
  opt.replicates = a.replicates;
  opt.seed = seed;
  opt.strict_exceedance = !a.weak;
  opt.threads = a.threads;
  auto results = bootstrap_pvalues(data, vars, Hypothesis::Columns, specs, opt);
  const std::size_t m = results.size();
  for (auto& r : results) r.p_adjusted = bonferroni(r.p_value, m);

  Json cfg;
  cfg["replicates"] = a.replicates;
  cfg["alpha"] = a.alpha;
  cfg["exceedance"] = a.weak ? ">=" : ">";
  cfg["groups_per_genotype"] = data.group_size(0);
  if (a.common.format == "json") {
    Json j = report::header("analyze-demo", seed, std::move(cfg));
    j["genotype_order"] = demo::genotypes();
    j["hypothesis"] = "theta(COX-1-d, j) <= theta(WT, j) <= theta(COX-2-d, j), j < J";
    j["bonferroni_m"] = m;
    Json tests = Json::array();
    for (std::size_t k = 0; k < m; ++k) {
      Json t;
      t["variable"] = demo::variables()[k];
      t.update(report::test_result(results[k], specs[k]));
      t["significant"] = *results[k].p_adjusted <= a.alpha;
      tests.push_back(std::move(t));
    }
    j["tests"] = std::move(tests);
    emit(a.common, report::dump(j));
  } else {
    std::ostringstream out;
    out << "# orderest " << report::version() << " analyze-demo seed=" << seed << " replicates=" << a.replicates
        << " alpha=" << a.alpha << '\n';
    out << "genotype order: COX-1-d <= WT <= COX-2-d (cumulative, each category)\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-20s %10s %10s %10s  %s\n", "variable", "statistic", "p", "p_bonf",
                  "significant");
    out << line;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& r = results[k];
      std::snprintf(line, sizeof line, "%-20s %10s %10s %10s  %s\n", demo::variables()[k].c_str(),
                    fmt(r.statistic, 4).c_str(), fmt(r.p_value, 4).c_str(), fmt(*r.p_adjusted, 4).c_str(),
                    *r.p_adjusted <= a.alpha ? "yes" : "no");
      out << line;
    }
    emit(a.common, out.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-restricted estimation and testing for matrices of parameters"};
  app.set_version_flag("--version", report::version());
  app.set_config("--config", "", "Read options from a key = value file; flags on the command line win");
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Order-restricted estimate of a real matrix");
  c_est->add_option("input", est.input, "Matrix CSV (no header)")->required();
  c_est->add_option("--row-order", est.row_order, "Restriction along each row: none, simple, umbrella:k, tree:k, chains:...");
  c_est->add_option("--col-order", est.col_order, "Restriction along each column");
  c_est->add_option("--row-weights", est.row_weights, "ones or a weight matrix CSV");
  c_est->add_option("--col-weights", est.col_weights, "ones or a weight matrix CSV");
  c_est->add_option("--tol", est.tol, "Sup-norm convergence tolerance");
  c_est->add_option("--max-cycles", est.max_cycles, "Cycle limit per direction");
  add_common(c_est, est.common);

  TestArgs tst;
  auto* c_tst = app.add_subcommand("test", "Bootstrap test of equality against an ordered alternative");
  c_tst->add_option("input", tst.input, "Count CSV (group,c1,...) or record CSV (group,subject,var,category)")
      ->required();
  c_tst->add_option("--hypothesis", tst.hypothesis, "columns, rows or both")
      ->check(CLI::IsMember({"columns", "rows", "both"}));
  c_tst->add_option("--row-order", tst.row_order, "Restriction over categories within a group");
  c_tst->add_option("--col-order", tst.col_order, "Restriction over groups within a category");
  c_tst->add_option("--replicates", tst.replicates, "Bootstrap replicates");
  c_tst->add_option("--categories", tst.categories, "Number of categories for record input");
  c_tst->add_flag("--weak-exceedance", tst.weak, "Count ties as exceedances (T* >= T)");
  c_tst->add_flag("--full-pipeline", tst.full_pipeline, "Always run the alternating estimate");
  c_tst->add_option("--threads", tst.threads, "Worker threads");
  add_common(c_tst, tst.common);

  EstimationArgs es;
  auto* c_es = app.add_subcommand("simulate-estimation", "Bias and loss study for normal cell means");
  c_es->add_option("--I", es.rows, "Rows")->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  c_es->add_option("--J", es.cols, "Columns")->check(CLI::Range(std::size_t{4}, std::size_t{1000}));
  c_es->add_option("--runs", es.runs, "Simulation runs")->check(CLI::PositiveNumber);
  c_es->add_option("--noise-scale", es.noise_scale, "Scale on the per-cell standard deviation")
      ->check(CLI::NonNegativeNumber);
  c_es->add_flag("--grid", es.grid, "Run the four configurations (2,5) (2,10) (5,5) (5,10)");
  add_common(c_es, es.common);

  PowerArgs pw;
  auto* c_pw = app.add_subcommand("simulate-power", "Size and power study for ordinal data");
  c_pw->add_option("--scenario", pw.scenarios, "Scenario id(s), or all")->delimiter(',');
  c_pw->add_option("--n", pw.n, "Subjects per group");
  c_pw->add_option("--sims", pw.sims, "Simulated datasets")->check(CLI::PositiveNumber);
  c_pw->add_option("--replicates", pw.replicates, "Bootstrap replicates per dataset")->check(CLI::PositiveNumber);
  c_pw->add_option("--alpha", pw.alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
  c_pw->add_flag("--no-ks", pw.no_ks, "Skip the Kolmogorov-Smirnov comparison");
  c_pw->add_flag("--weak-exceedance", pw.weak, "Count ties as exceedances (T* >= T)");
  c_pw->add_option("--threads", pw.threads, "Worker threads");
  c_pw->add_option("--csv", pw.csv, "Also write rejection rates as CSV");
  add_common(c_pw, pw.common);

  DemoArgs dm;
  auto* c_dm = app.add_subcommand("analyze-demo", "Trend tests on the bundled skin injury data");
  c_dm->add_option("--replicates", dm.replicates, "Bootstrap replicates");
  c_dm->add_option("--alpha", dm.alpha, "Family-wise level for the corrected p-values");
  c_dm->add_flag("--weak-exceedance", dm.weak, "Count ties as exceedances (T* >= T)");
  c_dm->add_option("--threads", dm.threads, "Worker threads");
  c_dm->add_option("--export-records", dm.export_records, "Write the reconstructed subject records as CSV");
  add_common(c_dm, dm.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*c_est) return run_estimate(est);
    if (*c_tst) return run_test(tst);
    if (*c_es) return run_simulate_estimation(es);
    if (*c_pw) return run_simulate_power(pw);
    if (*c_dm) return run_analyze_demo(dm);
  } catch (const NonConvergence& e) {
    std::cerr << "orderest: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const orderest::ParseError& e) {
    std::cerr << "orderest: ";
    if (e.line()) std::cerr << "line " << e.line() << ", column " << e.column() << ": ";
    std::cerr << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "orderest: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
