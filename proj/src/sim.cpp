#include "orderest/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <exception>
#include <thread>

#include "orderest/error.hpp"
#include "orderest/rng.hpp"

namespace orderest {

Matrix estimation_sim_means(std::size_t rows, std::size_t cols) {
  Matrix theta(rows, cols);
  const double big_j = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double i = static_cast<double>(r + 1), j = static_cast<double>(c + 1);
      theta(r, c) = j < big_j - 2 ? i + j : i - j + big_j + 1;
    }
  }
  return theta;
}

MatrixOrderSpec estimation_sim_spec(std::size_t rows, std::size_t cols) {
  return MatrixOrderSpec(rows, cols, OrderRestriction::simple_tree(cols, 0), OrderRestriction::simple_order(rows));
}

WeightMatrix estimation_sim_row_weights(std::size_t rows, std::size_t cols) {
  Matrix w(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) w(i, j) = std::sqrt(static_cast<double>(i + 1));
  return WeightMatrix(std::move(w));
}

WeightMatrix estimation_sim_col_weights(std::size_t rows, std::size_t cols) {
  Matrix w(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) w(i, j) = std::sqrt(static_cast<double>(j + 1));
  return WeightMatrix(std::move(w));
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  double mean(double n) const { return sum / n; }
  double se(double n) const {
    if (n < 2) return 0.0;
    const double m = sum / n;
    return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)) / n);
  }
};

// Reduction 100 (1 - A/B) from per-run losses with a delta-method standard error.
void loss_reduction(const std::vector<double>& restricted, const std::vector<double>& unrestricted,
                    std::optional<double>& value, double& se) {
  CompensatedSum a, b;
  for (double x : restricted) a += x;
  for (double x : unrestricted) b += x;
  if (!(b.value() > 0.0)) {
    value.reset();
    se = 0.0;
    return;
  }
  const double ratio = a.value() / b.value();
  value = 100.0 * (1.0 - ratio);
  const double n = static_cast<double>(restricted.size());
  const double mean_b = b.value() / n;
  Moments resid;
  for (std::size_t k = 0; k < restricted.size(); ++k) resid.add(restricted[k] - ratio * unrestricted[k]);
  se = 100.0 * resid.se(n) / mean_b;
}

}  // namespace

EstimationSimReport run_estimation_sim(const EstimationSimConfig& config) {
  if (config.rows < 2) throw DomainError("estimation study needs I >= 2");
  if (config.cols < 4) throw DomainError("estimation study needs J >= 4");
  if (config.runs < 1) throw DomainError("estimation study needs at least one run");
  if (!(config.noise_scale >= 0.0)) throw DomainError("noise scale must be nonnegative");

  const std::size_t rows = config.rows, cols = config.cols;
  const Matrix theta = estimation_sim_means(rows, cols);
  const MatrixOrderSpec spec = estimation_sim_spec(rows, cols);
  const WeightMatrix w_r = estimation_sim_row_weights(rows, cols);
  const WeightMatrix w_c = estimation_sim_col_weights(rows, cols);

  EstimationSimReport report;
  report.config = config;
  report.weights_rank1 = one_cycle_applicable(spec, w_r, w_c);

  Moments bias_restricted, bias_unrestricted;
  std::vector<double> quad_r, quad_u, quart_r, quart_u;
  const double cells = static_cast<double>(rows * cols);
  for (std::size_t run = 0; run < config.runs; ++run) {
    rng::Engine engine = rng::make_engine(config.seed, rng::kEstimationSim, run);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix theta_hat(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const double sd = config.noise_scale / std::sqrt(static_cast<double>(i + 1));
      for (std::size_t j = 0; j < cols; ++j) theta_hat(i, j) = theta(i, j) + sd * normal(engine);
    }
    const MatrixEstimate est = estimate(theta_hat, spec, w_r, w_c);
    if (est.iterations_1 == 1 && est.iterations_2 == 1) ++report.one_cycle_fits;
    if (!est.converged) ++report.nonconverged_fits;

    CompensatedSum br, bu, q2r, q2u, q4r, q4u;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double dr = theta(i, j) - est.final(i, j);
        const double du = theta(i, j) - theta_hat(i, j);
        br += dr;
        bu += du;
        q2r += dr * dr;
        q2u += du * du;
        q4r += dr * dr * dr * dr;
        q4u += du * du * du * du;
      }
    }
    bias_restricted.add(br.value() / cells);
    bias_unrestricted.add(bu.value() / cells);
    quad_r.push_back(q2r.value());
    quad_u.push_back(q2u.value());
    quart_r.push_back(q4r.value());
    quart_u.push_back(q4u.value());
  }
  const double n = static_cast<double>(config.runs);
  report.restricted_bias = bias_restricted.mean(n);
  report.unrestricted_bias = bias_unrestricted.mean(n);
  report.restricted_bias_se = bias_restricted.se(n);
  report.unrestricted_bias_se = bias_unrestricted.se(n);
  loss_reduction(quad_r, quad_u, report.quadratic_reduction, report.quadratic_reduction_se);
  loss_reduction(quart_r, quart_u, report.quartic_reduction, report.quartic_reduction_se);
  return report;
}

namespace {

// id, then one probability row per group separated by '|'. Transcribed from
// the published configuration table; rows are rescaled to sum to one.
constexpr const char* kScenarioTable = R"(t3-null-01 0.33 0.33 0.33 | 0.33 0.33 0.33
t3-null-02 0.10 0.40 0.50 | 0.10 0.40 0.50
t3-null-03 0.40 0.40 0.20 | 0.40 0.40 0.20
t3-null-04 0.01 0.49 0.50 | 0.01 0.49 0.50
t3-null-05 0.49 0.01 0.50 | 0.49 0.01 0.50
t3-null-06 0.98 0.01 0.01 | 0.98 0.01 0.01
t3-null-07 0.01 0.98 0.01 | 0.01 0.98 0.01
t3-null-08 0.01 0.01 0.98 | 0.01 0.01 0.98
t3-null-09 0.25 0.25 0.25 0.25 | 0.25 0.25 0.25 0.25
t3-null-10 0.20 0.10 0.30 0.40 | 0.20 0.10 0.30 0.40
t3-null-11 0.97 0.01 0.01 0.01 | 0.97 0.01 0.01 0.01
t3-null-12 0.01 0.97 0.01 0.01 | 0.01 0.97 0.01 0.01
t3-null-13 0.01 0.01 0.97 0.01 | 0.01 0.01 0.97 0.01
t3-null-14 0.01 0.01 0.01 0.97 | 0.01 0.01 0.01 0.97
t3-null-15 0.25 0.25 0.25 0.25 | 0.25 0.25 0.25 0.25 | 0.25 0.25 0.25 0.25
t3-null-16 0.10 0.20 0.30 0.40 | 0.10 0.20 0.30 0.40 | 0.10 0.20 0.30 0.40
t3-null-17 0.40 0.30 0.20 0.10 | 0.40 0.30 0.20 0.10 | 0.40 0.30 0.20 0.10
t3-null-18 0.01 0.49 0.49 0.01 | 0.01 0.49 0.49 0.01 | 0.01 0.49 0.49 0.01
t3-null-19 0.49 0.01 0.49 0.01 | 0.49 0.01 0.49 0.01 | 0.49 0.01 0.49 0.01
t3-null-20 0.97 0.01 0.01 0.01 | 0.97 0.01 0.01 0.01 | 0.97 0.01 0.01 0.01
t3-null-21 0.01 0.97 0.01 0.01 | 0.01 0.97 0.01 0.01 | 0.01 0.97 0.01 0.01
t3-null-22 0.01 0.01 0.97 0.01 | 0.01 0.01 0.97 0.01 | 0.01 0.01 0.97 0.01
t3-null-23 0.20 0.20 0.20 0.20 0.20 | 0.20 0.20 0.20 0.20 0.20 | 0.20 0.20 0.20 0.20 0.20
t3-null-24 0.01 0.48 0.01 0.49 0.01 | 0.01 0.48 0.01 0.49 0.01 | 0.01 0.48 0.01 0.49 0.01
t3-alt-01 0.10 0.30 0.60 | 0.15 0.35 0.50
t3-alt-02 0.10 0.30 0.60 | 0.60 0.30 0.10
t3-alt-03 0.40 0.40 0.20 | 0.80 0.10 0.10
t3-alt-04 0.01 0.01 0.98 | 0.20 0.20 0.60
t3-alt-05 0.01 0.01 0.98 | 0.98 0.01 0.01
t3-alt-06 0.10 0.30 0.20 0.40 | 0.30 0.10 0.40 0.20
t3-alt-07 0.10 0.10 0.10 0.70 | 0.40 0.05 0.05 0.50
t3-alt-08 0.10 0.20 0.30 0.40 | 0.15 0.25 0.30 0.30
t3-alt-09 0.10 0.20 0.30 0.40 | 0.40 0.30 0.20 0.10
t3-alt-10 0.25 0.25 0.25 0.25 | 0.35 0.30 0.30 0.05
t3-alt-11 0.01 0.01 0.01 0.97 | 0.97 0.01 0.01 0.01
t3-alt-12 0.10 0.30 0.20 0.40 | 0.20 0.20 0.30 0.30 | 0.30 0.10 0.40 0.20
t3-alt-13 0.10 0.10 0.10 0.70 | 0.40 0.05 0.05 0.50 | 0.60 0.10 0.10 0.20
t3-alt-14 0.10 0.20 0.30 0.40 | 0.10 0.20 0.30 0.40 | 0.40 0.30 0.20 0.10
t3-alt-15 0.10 0.20 0.30 0.40 | 0.20 0.20 0.30 0.30 | 0.40 0.30 0.20 0.10
t3-alt-16 0.10 0.20 0.30 0.40 | 0.40 0.30 0.20 0.10 | 0.40 0.30 0.20 0.10
)";

std::vector<PowerScenario> parse_scenarios() {
  std::vector<PowerScenario> out;
  std::istringstream lines(kScenarioTable);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    PowerScenario s;
    in >> s.id;
    s.null = s.id.find("null") != std::string::npos;
    s.pi.emplace_back();
    std::string tok;
    while (in >> tok) {
      if (tok == "|") {
        s.pi.emplace_back();
      } else {
        s.pi.back().push_back(std::stod(tok));
      }
    }
    for (auto& row : s.pi) {
      double total = 0.0;
      for (double p : row) total += p;
      if (std::abs(total - 1.0) > 1e-12) {
        s.normalized = true;
        for (double& p : row) p /= total;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

const std::vector<PowerScenario>& table3_scenarios() {
  static const std::vector<PowerScenario> scenarios = parse_scenarios();
  return scenarios;
}

const PowerScenario& find_scenario(const std::string& id) {
  for (const auto& s : table3_scenarios())
    if (s.id == id) return s;
  std::string ids;
  for (const auto& s : table3_scenarios()) ids += (ids.empty() ? "" : ", ") + s.id;
  throw IndexError("unknown scenario '" + id + "'; valid ids: " + ids);
}

double ks_one_sided(const OrdinalCounts& d) {
  if (d.groups() != 2) throw UnsupportedError("the one-sided Kolmogorov-Smirnov statistic compares exactly two groups");
  const Matrix theta = cumulative_umle(d);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < d.categories(); ++j) best = std::max(best, theta(1, j) - theta(0, j));
  return best;
}

MultiResponseDataset draw_multinomial(const PowerScenario& scenario, long long n, rng::Engine& engine) {
  if (n < 1) throw DomainError("group size must be positive");
  std::vector<std::vector<MultiResponseDataset::Record>> groups(scenario.groups());
  for (std::size_t g = 0; g < scenario.groups(); ++g) {
    std::discrete_distribution<int> category(scenario.pi[g].begin(), scenario.pi[g].end());
    for (long long k = 0; k < n; ++k) groups[g].push_back({category(engine)});
  }
  return MultiResponseDataset({scenario.categories()}, std::move(groups));
}

MatrixOrderSpec ordinal_simple_spec(std::size_t groups, std::size_t categories) {
  return MatrixOrderSpec(groups, categories, OrderRestriction::simple_order(categories),
                         OrderRestriction::simple_order(groups));
}

PowerSimReport run_power_sim(const PowerSimConfig& config) {
  const auto& sc = config.scenario;
  if (sc.pi.empty() || sc.groups() < 2) throw DomainError("scenario needs at least two groups");
  for (const auto& row : sc.pi) {
    if (row.size() != sc.categories()) throw DimensionError("scenario rows differ in length");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw DomainError("scenario probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("scenario row " + sc.id + " does not sum to one");
  }
  if (config.sims < 1) throw DomainError("power study needs at least one simulation");
  if (config.replicates < 1) throw DomainError("power study needs at least one bootstrap replicate");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");

  const bool with_ks = config.ks && sc.groups() == 2;
  const MatrixOrderSpec spec = ordinal_simple_spec(sc.groups(), sc.categories());

  struct Outcome {
    bool t1 = false;
    bool ks = false;
  };
  std::vector<Outcome> outcomes(config.sims);

  auto simulate = [&](std::size_t s) {
    rng::Engine data_engine = rng::make_engine(config.seed, rng::kPowerSimData, s);
    const MultiResponseDataset data = draw_multinomial(sc, config.n, data_engine);
    const OrdinalCounts counts = data.counts(0);
    std::vector<double> observed{ordinal_statistic(counts, spec, Hypothesis::Columns).value};
    if (with_ks) observed.push_back(ks_one_sided(counts));

    BootstrapOptions boot;
    boot.replicates = config.replicates;
    boot.seed = rng::stream_seed(config.seed, rng::kPowerSimBootstrap, s);
    boot.strict_exceedance = config.strict_exceedance;
    auto statistics = [&](const std::vector<std::vector<std::size_t>>& picks, std::span<double> out) {
      const OrdinalCounts c = counts_from_picks(data, 0, picks);
      out[0] = ordinal_statistic(c, spec, Hypothesis::Columns).value;
      if (with_ks) out[1] = ks_one_sided(c);
    };
    const auto exceed = bootstrap_exceedances(data, observed, statistics, boot);
    const double b = static_cast<double>(config.replicates);
    outcomes[s].t1 = static_cast<double>(exceed[0]) / b <= config.alpha;
    if (with_ks) outcomes[s].ks = static_cast<double>(exceed[1]) / b <= config.alpha;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.sims)));
  if (workers == 1) {
    for (std::size_t s = 0; s < config.sims; ++s) simulate(s);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t s = w; s < config.sims; s += workers) simulate(s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  PowerSimReport report;
  report.config = config;
  for (const auto& o : outcomes) {
    report.t1_rejections += o.t1;
    report.ks_rejections += o.ks;
    report.t1_only += o.t1 && !o.ks;
    report.ks_only += o.ks && !o.t1;
  }
  const double n = static_cast<double>(config.sims);
  auto rate_se = [&](double rate) { return std::sqrt(rate * (1.0 - rate) / n); };
  report.t1_rate = static_cast<double>(report.t1_rejections) / n;
  report.t1_se = rate_se(report.t1_rate);
  if (with_ks) {
    report.ks_rate = static_cast<double>(report.ks_rejections) / n;
    report.ks_se = rate_se(*report.ks_rate);
  } else {
    report.t1_only = report.ks_only = 0;
  }
  return report;
}

}  // namespace orderest
