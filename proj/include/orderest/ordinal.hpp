#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orderest/matrix.hpp"
#include "orderest/matrix_estimator.hpp"
#include "orderest/order_graph.hpp"
#include "orderest/rng.hpp"

namespace orderest {

// I groups by J ordered categories of nonnegative counts.
class OrdinalCounts {
 public:
  explicit OrdinalCounts(std::vector<std::vector<long long>> counts);
  // Throws DomainError when a row does not sum to its declared size.
  OrdinalCounts(std::vector<std::vector<long long>> counts, const std::vector<long long>& group_sizes);

  std::size_t groups() const { return counts_.size(); }
  std::size_t categories() const { return counts_.front().size(); }
  long long count(std::size_t i, std::size_t j) const { return counts_[i][j]; }
  long long group_size(std::size_t i) const { return group_sizes_[i]; }
  const std::vector<long long>& group_sizes() const { return group_sizes_; }
  const std::vector<std::vector<long long>>& rows() const { return counts_; }
  bool balanced() const;

  friend bool operator==(const OrdinalCounts&, const OrdinalCounts&) = default;

 private:
  std::vector<std::vector<long long>> counts_;
  std::vector<long long> group_sizes_;
};

// Subjects grouped by treatment; each record holds one 0-based category label
// per response variable.
class MultiResponseDataset {
 public:
  using Record = std::vector<int>;

  MultiResponseDataset(std::vector<std::size_t> categories, std::vector<std::vector<Record>> groups);
  // One variable, records expanded from the counts in category order.
  static MultiResponseDataset from_counts(const OrdinalCounts& counts);

  std::size_t groups() const { return groups_.size(); }
  std::size_t variables() const { return categories_.size(); }
  std::size_t categories(std::size_t variable) const { return categories_.at(variable); }
  std::size_t group_size(std::size_t i) const { return groups_[i].size(); }
  const std::vector<Record>& records(std::size_t group) const { return groups_[group]; }
  std::size_t total_subjects() const;

  OrdinalCounts counts(std::size_t variable) const;

 private:
  std::vector<std::size_t> categories_;
  std::vector<std::vector<Record>> groups_;
};

// theta_hat(i, j) = sum_{k<=j} X(i, k) / n_i.
Matrix cumulative_umle(const OrdinalCounts& d);

// Pooled Bayes estimate (sum_i X(i, r) + I sqrt(n) / J) / (n I + I sqrt(n)).
// Requires equal group sizes n.
std::vector<double> pooled_smoothed_pi(const OrdinalCounts& d);

// Null variance of a cumulative proportion through category j (0-based,
// j < J - 1): theta(1 - theta) / n with theta = sum_{r<=j} pi[r].
double null_variance(std::span<const double> pi, std::size_t j, long long n);

enum class Axis { Columns, Rows };
enum class Hypothesis { Columns, Rows, Both };

struct Contribution {
  Axis axis;
  std::size_t index;     // column (for Columns) or row (for Rows)
  std::size_t subgraph;  // position in the restriction's subgraph list
  Index low;
  Index high;
  double diff;
  double se;
  double z;
};

struct StatisticValue {
  // Max of the contributions; -inf when there are none.
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Contribution> contributions;
};

// se(index, low, high): standard error of fitted(high) - fitted(low) along the
// given column or row.
using SeFunction = std::function<double(std::size_t index, Index low, Index high)>;

// (diff / se) with the degenerate cases: 0 / 0 -> 0, positive / 0 -> +inf.
double standardized_difference(double diff, double se);

// Max over columns [0, columns) and subgraphs of the column restriction of the
// standardized farthest-pair difference.
StatisticValue t1_statistic(const Matrix& fitted, const OrderRestriction& col_restriction,
                            const SeFunction& se, std::size_t columns);

// Row-wise analogue over rows [0, rows).
StatisticValue t2_statistic(const Matrix& fitted, const OrderRestriction& row_restriction,
                            const SeFunction& se, std::size_t rows);

inline double t_statistic(double t1, double t2) { return t1 < t2 ? t2 : t1; }

// Order-restricted fit of the cumulative UMLE. Balanced designs use unit
// weights; otherwise column weights are the group sizes. When the rows of the
// UMLE already satisfy the row restriction and the weights are rank 1 a single
// column operation is used; full_pipeline forces the whole alternating
// estimate and checks the two agree.
Matrix fit_cumulative(const OrdinalCounts& d, const MatrixOrderSpec& spec, bool full_pipeline = false);

// Observed statistic for the hypothesis, with per-subgraph contributions.
// Cumulative column J-1 is identically one and never enters T1.
StatisticValue ordinal_statistic(const OrdinalCounts& d, const MatrixOrderSpec& spec, Hypothesis h,
                                 bool full_pipeline = false);

struct BootstrapOptions {
  std::size_t replicates = 10000;
  std::uint64_t seed = 0;
  // p = #{T* > T} / B by default; false switches to #{T* >= T} / B.
  bool strict_exceedance = true;
  bool full_pipeline = false;
  unsigned threads = 1;
};

struct TestResult {
  double statistic = 0.0;
  double t1 = -std::numeric_limits<double>::infinity();
  double t2 = -std::numeric_limits<double>::infinity();
  double p_value = 1.0;
  std::optional<double> p_adjusted;
  std::size_t replicates = 0;
  std::size_t exceedances = 0;
  std::uint64_t seed = 0;
  std::vector<Contribution> per_subgraph;
};

// Exceedance test used by every bootstrap in the library. Values within
// 1e-12 relative of each other are ties; +inf ties +inf.
bool exceeds(double replicate, double observed, bool strict);

// Group indices drawn with replacement from the pooled subjects: entry i holds
// group_size(i) indices into the pooled record list (groups concatenated).
std::vector<std::vector<std::size_t>> resample_groups(const std::vector<std::size_t>& group_sizes,
                                                      std::size_t pool_size, rng::Engine& engine);

// Pooled-subject indices resolved back to per-variable counts.
OrdinalCounts counts_from_picks(const MultiResponseDataset& data, std::size_t variable,
                                const std::vector<std::vector<std::size_t>>& picks);

// Fills out[k] with statistic k of one resample. Called concurrently when
// threads > 1.
using ReplicateStatistics = std::function<void(const std::vector<std::vector<std::size_t>>& picks,
                                               std::span<double> out)>;

// Shared bootstrap loop: replicate b draws groups of the original sizes from
// the pooled subjects using stream (seed, stream, b). Returns, per statistic,
// how many replicates exceeded observed[k]. Independent of thread count.
std::vector<std::size_t> bootstrap_exceedances(const MultiResponseDataset& data,
                                               std::span<const double> observed,
                                               const ReplicateStatistics& statistics,
                                               const BootstrapOptions& options,
                                               std::string_view stream = rng::kBootstrap);

// Record-resampling bootstrap p-values for each listed variable, all sharing
// the same resampled record sets. specs[k] applies to variables[k].
std::vector<TestResult> bootstrap_pvalues(const MultiResponseDataset& data,
                                          const std::vector<std::size_t>& variables, Hypothesis h,
                                          const std::vector<MatrixOrderSpec>& specs,
                                          const BootstrapOptions& options);

TestResult bootstrap_pvalue(const MultiResponseDataset& data, std::size_t variable, Hypothesis h,
                            const MatrixOrderSpec& spec, const BootstrapOptions& options);

TestResult bootstrap_pvalue(const OrdinalCounts& data, Hypothesis h, const MatrixOrderSpec& spec,
                            const BootstrapOptions& options);

// min(1, m p).
double bonferroni(double p, std::size_t m);

}  // namespace orderest
