#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orderest/matrix_estimator.hpp"
#include "orderest/ordinal.hpp"

namespace orderest {

// ---------------------------------------------------------------------------
// Estimation study: normal cell means under simple-order columns and a
// simple-tree row order rooted at the first column.

struct EstimationSimConfig {
  std::size_t rows = 2;  // I >= 2
  std::size_t cols = 5;  // J >= 4
  std::size_t runs = 10000;
  std::uint64_t seed = 1;
  // Multiplies the per-cell standard deviation 1/sqrt(i); 0 gives noiseless data.
  double noise_scale = 1.0;
};

// theta(i, j) = i + j for j < J - 2 and i - j + J + 1 otherwise (1-based i, j).
Matrix estimation_sim_means(std::size_t rows, std::size_t cols);
// Rows: tree rooted at column 0. Columns: simple order.
MatrixOrderSpec estimation_sim_spec(std::size_t rows, std::size_t cols);
// Row weights sqrt(i) (constant along a row); column weights are the same
// pattern transposed, sqrt(j) constant down a column.
WeightMatrix estimation_sim_row_weights(std::size_t rows, std::size_t cols);
WeightMatrix estimation_sim_col_weights(std::size_t rows, std::size_t cols);

struct EstimationSimReport {
  EstimationSimConfig config;
  // Average over cells and runs of (theta - estimate), the sign convention of
  // the published bias table.
  double restricted_bias = 0.0;
  double unrestricted_bias = 0.0;
  double restricted_bias_se = 0.0;
  double unrestricted_bias_se = 0.0;
  // 100 (1 - sum loss(restricted) / sum loss(unrestricted)); empty when the
  // unrestricted loss is zero.
  std::optional<double> quadratic_reduction;
  std::optional<double> quartic_reduction;
  double quadratic_reduction_se = 0.0;
  double quartic_reduction_se = 0.0;
  bool weights_rank1 = false;
  std::size_t one_cycle_fits = 0;
  std::size_t nonconverged_fits = 0;
};

EstimationSimReport run_estimation_sim(const EstimationSimConfig& config);

// ---------------------------------------------------------------------------
// Size and power study for ordinal data.

struct PowerScenario {
  std::string id;  // "t3-null-01" ... / "t3-alt-01" ...
  bool null = true;
  std::vector<std::vector<double>> pi;  // one probability row per group
  // True when a transcribed row did not sum to one and was rescaled.
  bool normalized = false;

  std::size_t groups() const { return pi.size(); }
  std::size_t categories() const { return pi.front().size(); }
};

// The bundled multinomial configurations, rows normalized to sum to one.
const std::vector<PowerScenario>& table3_scenarios();
// Throws IndexError naming the valid ids.
const PowerScenario& find_scenario(const std::string& id);

struct PowerSimConfig {
  PowerScenario scenario;
  long long n = 20;  // subjects per group
  std::size_t sims = 2000;
  std::size_t replicates = 500;
  double alpha = 0.05;
  bool ks = true;  // only run when the scenario has two groups
  std::uint64_t seed = 1;
  bool strict_exceedance = true;
  unsigned threads = 1;
};

struct PowerSimReport {
  PowerSimConfig config;
  double t1_rate = 0.0;
  double t1_se = 0.0;
  std::size_t t1_rejections = 0;
  std::optional<double> ks_rate;
  std::optional<double> ks_se;
  std::size_t ks_rejections = 0;
  // Paired outcomes on the same datasets.
  std::size_t t1_only = 0;
  std::size_t ks_only = 0;
};

// max_j (theta_hat(1, j) - theta_hat(0, j)) over cumulative columns j < J - 1.
double ks_one_sided(const OrdinalCounts& d);

// Group-wise multinomial draw of n subjects per group as a one-variable dataset.
MultiResponseDataset draw_multinomial(const PowerScenario& scenario, long long n, rng::Engine& engine);

// Simple order on the (cumulative) rows and on the columns.
MatrixOrderSpec ordinal_simple_spec(std::size_t groups, std::size_t categories);

PowerSimReport run_power_sim(const PowerSimConfig& config);

}  // namespace orderest
