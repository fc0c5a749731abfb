#include "orderest/ordinal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "orderest/error.hpp"

namespace orderest {

OrdinalCounts::OrdinalCounts(std::vector<std::vector<long long>> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw DimensionError("ordinal data needs at least two groups");
  const std::size_t j = counts_.front().size();
  if (j < 2) throw DimensionError("ordinal data needs at least two categories");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i].size() != j) {
      throw DimensionError("group " + std::to_string(i) + " has " + std::to_string(counts_[i].size()) +
                           " categories, expected " + std::to_string(j));
    }
    long long total = 0;
    for (long long c : counts_[i]) {
      if (c < 0) throw DomainError("negative count in group " + std::to_string(i));
      total += c;
    }
    group_sizes_.push_back(total);
  }
}

OrdinalCounts::OrdinalCounts(std::vector<std::vector<long long>> counts,
                             const std::vector<long long>& group_sizes)
    : OrdinalCounts(std::move(counts)) {
  if (group_sizes.size() != group_sizes_.size()) {
    throw DimensionError("declared group sizes do not match the number of groups");
  }
  for (std::size_t i = 0; i < group_sizes.size(); ++i) {
    if (group_sizes[i] != group_sizes_[i]) {
      throw DomainError("group " + std::to_string(i) + " counts sum to " + std::to_string(group_sizes_[i]) +
                        " but the declared size is " + std::to_string(group_sizes[i]));
    }
  }
}

bool OrdinalCounts::balanced() const {
  return std::all_of(group_sizes_.begin(), group_sizes_.end(),
                     [&](long long n) { return n == group_sizes_.front(); });
}

MultiResponseDataset::MultiResponseDataset(std::vector<std::size_t> categories,
                                           std::vector<std::vector<Record>> groups)
    : categories_(std::move(categories)), groups_(std::move(groups)) {
  if (categories_.empty()) throw DimensionError("dataset needs at least one response variable");
  if (groups_.size() < 2) throw DimensionError("dataset needs at least two groups");
  for (std::size_t v = 0; v < categories_.size(); ++v) {
    if (categories_[v] < 2) throw DimensionError("variable " + std::to_string(v) + " needs >= 2 categories");
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].empty()) throw DomainError("group " + std::to_string(g) + " has no subjects");
    for (const auto& rec : groups_[g]) {
      if (rec.size() != categories_.size()) {
        throw DimensionError("record in group " + std::to_string(g) + " has " + std::to_string(rec.size()) +
                             " labels, expected " + std::to_string(categories_.size()));
      }
      for (std::size_t v = 0; v < rec.size(); ++v) {
        if (rec[v] < 0 || static_cast<std::size_t>(rec[v]) >= categories_[v]) {
          throw DomainError("label " + std::to_string(rec[v]) + " outside [0, " +
                            std::to_string(categories_[v]) + ") for variable " + std::to_string(v));
        }
      }
    }
  }
}

MultiResponseDataset MultiResponseDataset::from_counts(const OrdinalCounts& counts) {
  std::vector<std::vector<Record>> groups(counts.groups());
  for (std::size_t i = 0; i < counts.groups(); ++i) {
    for (std::size_t j = 0; j < counts.categories(); ++j) {
      for (long long k = 0; k < counts.count(i, j); ++k) groups[i].push_back({static_cast<int>(j)});
    }
  }
  return MultiResponseDataset({counts.categories()}, std::move(groups));
}

std::size_t MultiResponseDataset::total_subjects() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size();
  return n;
}

OrdinalCounts MultiResponseDataset::counts(std::size_t variable) const {
  const std::size_t j = categories(variable);
  std::vector<std::vector<long long>> out(groups_.size(), std::vector<long long>(j, 0));
  for (std::size_t g = 0; g < groups_.size(); ++g)
    for (const auto& rec : groups_[g]) ++out[g][static_cast<std::size_t>(rec[variable])];
  return OrdinalCounts(std::move(out));
}

Matrix cumulative_umle(const OrdinalCounts& d) {
  Matrix out(d.groups(), d.categories());
  for (std::size_t i = 0; i < d.groups(); ++i) {
    const long long n = d.group_size(i);
    if (n <= 0) throw DomainError("group " + std::to_string(i) + " has zero subjects");
    long long running = 0;
    for (std::size_t j = 0; j < d.categories(); ++j) {
      running += d.count(i, j);
      out(i, j) = static_cast<double>(running) / static_cast<double>(n);
    }
  }
  return out;
}

std::vector<double> pooled_smoothed_pi(const OrdinalCounts& d) {
  if (!d.balanced()) {
    throw UnsupportedError(
        "pooled smoothed probabilities assume equal group sizes; pool per test with a common n");
  }
  const double n = static_cast<double>(d.group_size(0));
  if (n <= 0) throw DomainError("group size must be positive");
  const double groups = static_cast<double>(d.groups());
  const double j = static_cast<double>(d.categories());
  const double root_n = std::sqrt(n);
  const double denom = n * groups + groups * root_n;
  std::vector<double> pi(d.categories());
  for (std::size_t r = 0; r < d.categories(); ++r) {
    long long column = 0;
    for (std::size_t i = 0; i < d.groups(); ++i) column += d.count(i, r);
    pi[r] = (static_cast<double>(column) + groups * root_n / j) / denom;
  }
  return pi;
}

double null_variance(std::span<const double> pi, std::size_t j, long long n) {
  if (pi.size() < 2 || j + 1 >= pi.size()) {
    throw IndexError("cumulative index " + std::to_string(j) + " outside [0, " +
                     std::to_string(pi.size() == 0 ? 0 : pi.size() - 1) + ")");
  }
  if (n <= 0) throw DomainError("sample size must be positive");
  CompensatedSum theta;
  for (std::size_t r = 0; r <= j; ++r) theta += pi[r];
  const double t = theta.value();
  return std::max(0.0, t * (1.0 - t)) / static_cast<double>(n);
}

double standardized_difference(double diff, double se) {
  if (se > 0.0) return diff / se;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

namespace {

void accumulate(StatisticValue& out, Contribution c) {
  out.value = std::max(out.value, c.z);
  out.contributions.push_back(c);
}

}  // namespace

StatisticValue t1_statistic(const Matrix& fitted, const OrderRestriction& col_restriction,
                            const SeFunction& se, std::size_t columns) {
  if (col_restriction.size() != fitted.rows()) {
    throw DimensionError("column restriction size does not match the fitted matrix");
  }
  if (columns > fitted.cols()) throw DimensionError("column range exceeds the fitted matrix");
  StatisticValue out;
  for (std::size_t k = 0; k < columns; ++k) {
    for (std::size_t g = 0; g < col_restriction.subgraphs().size(); ++g) {
      auto [low, high] = farthest_pair(col_restriction.subgraphs()[g]);
      const double diff = fitted(high, k) - fitted(low, k);
      const double s = se(k, low, high);
      accumulate(out, {Axis::Columns, k, g, low, high, diff, s, standardized_difference(diff, s)});
    }
  }
  return out;
}

StatisticValue t2_statistic(const Matrix& fitted, const OrderRestriction& row_restriction,
                            const SeFunction& se, std::size_t rows) {
  if (row_restriction.size() != fitted.cols()) {
    throw DimensionError("row restriction size does not match the fitted matrix");
  }
  if (rows > fitted.rows()) throw DimensionError("row range exceeds the fitted matrix");
  StatisticValue out;
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t g = 0; g < row_restriction.subgraphs().size(); ++g) {
      auto [low, high] = farthest_pair(row_restriction.subgraphs()[g]);
      const double diff = fitted(k, high) - fitted(k, low);
      const double s = se(k, low, high);
      accumulate(out, {Axis::Rows, k, g, low, high, diff, s, standardized_difference(diff, s)});
    }
  }
  return out;
}

Matrix fit_cumulative(const OrdinalCounts& d, const MatrixOrderSpec& spec, bool full_pipeline) {
  if (spec.rows() != d.groups() || spec.cols() != d.categories()) {
    throw DimensionError("order spec shape does not match the count table");
  }
  const Matrix theta_hat = cumulative_umle(d);
  const WeightMatrix w_r = WeightMatrix::ones(d.groups(), d.categories());
  Matrix wc(d.groups(), d.categories(), 1.0);
  if (!d.balanced()) {
    for (std::size_t i = 0; i < d.groups(); ++i)
      for (std::size_t j = 0; j < d.categories(); ++j) wc(i, j) = static_cast<double>(d.group_size(i));
  }
  const WeightMatrix w_c(std::move(wc));

  std::optional<Matrix> fast;
  bool rows_ordered = true;
  for (std::size_t i = 0; i < theta_hat.rows() && rows_ordered; ++i) {
    rows_ordered = !verify_feasible(theta_hat.row(i), spec.row_restriction(), 0.0);
  }
  if (rows_ordered && one_cycle_applicable(spec, w_r, w_c)) {
    Matrix once = column_operator(theta_hat, w_c, spec.col_restriction());
    if (in_parameter_space(once, spec, 1e-9)) fast = std::move(once);
  }
  if (fast && !full_pipeline) return *fast;

  MatrixEstimate est = estimate(theta_hat, spec, w_r, w_c);
  if (fast && sup_distance(*fast, est.final) > 1e-12) {
    throw std::logic_error("single column operation disagrees with the full alternating estimate");
  }
  return est.final;
}

StatisticValue ordinal_statistic(const OrdinalCounts& d, const MatrixOrderSpec& spec, Hypothesis h,
                                 bool full_pipeline) {
  const Matrix fitted = fit_cumulative(d, spec, full_pipeline);
  const std::vector<double> pi = pooled_smoothed_pi(d);
  const long long n = d.group_size(0);

  StatisticValue out;
  if (h == Hypothesis::Columns || h == Hypothesis::Both) {
    std::vector<double> se_by_column(d.categories() - 1);
    for (std::size_t j = 0; j + 1 < d.categories(); ++j) se_by_column[j] = std::sqrt(2.0 * null_variance(pi, j, n));
    auto se = [&](std::size_t column, Index, Index) { return se_by_column[column]; };
    out = t1_statistic(fitted, spec.col_restriction(), se, d.categories() - 1);
  }
  if (h == Hypothesis::Rows || h == Hypothesis::Both) {
    // Multinomial variance of the mass between the two cumulative positions
    // under the pooled estimate.
    auto se = [&](std::size_t, Index low, Index high) {
      CompensatedSum q;
      for (Index r = std::min(low, high) + 1; r <= std::max(low, high); ++r) q += pi[r];
      const double v = q.value();
      return std::sqrt(std::max(0.0, v * (1.0 - v)) / static_cast<double>(n));
    };
    StatisticValue rows = t2_statistic(fitted, spec.row_restriction(), se, d.groups());
    out.value = t_statistic(out.value, rows.value);
    out.contributions.insert(out.contributions.end(), rows.contributions.begin(), rows.contributions.end());
  }
  return out;
}

bool exceeds(double replicate, double observed, bool strict) {
  if (std::isinf(replicate) || std::isinf(observed)) {
    return strict ? replicate > observed : replicate >= observed;
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(observed));
  return strict ? replicate > observed + slack : replicate >= observed - slack;
}

std::vector<std::vector<std::size_t>> resample_groups(const std::vector<std::size_t>& group_sizes,
                                                      std::size_t pool_size, rng::Engine& engine) {
  if (pool_size == 0) throw DomainError("cannot resample from an empty pool");
  std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
  std::vector<std::vector<std::size_t>> out(group_sizes.size());
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    out[g].resize(group_sizes[g]);
    for (auto& idx : out[g]) idx = pick(engine);
  }
  return out;
}

OrdinalCounts counts_from_picks(const MultiResponseDataset& data, std::size_t variable,
                                const std::vector<std::vector<std::size_t>>& picks) {
  // Pooled index -> (group, position) by walking the group sizes.
  std::vector<std::size_t> offsets(data.groups() + 1, 0);
  for (std::size_t g = 0; g < data.groups(); ++g) offsets[g + 1] = offsets[g] + data.group_size(g);
  const std::size_t j = data.categories(variable);
  std::vector<std::vector<long long>> counts(picks.size(), std::vector<long long>(j, 0));
  for (std::size_t g = 0; g < picks.size(); ++g) {
    for (std::size_t idx : picks[g]) {
      const auto it = std::upper_bound(offsets.begin(), offsets.end(), idx);
      const std::size_t src = static_cast<std::size_t>(it - offsets.begin()) - 1;
      const auto& rec = data.records(src)[idx - offsets[src]];
      ++counts[g][static_cast<std::size_t>(rec[variable])];
    }
  }
  return OrdinalCounts(std::move(counts));
}

std::vector<std::size_t> bootstrap_exceedances(const MultiResponseDataset& data,
                                               std::span<const double> observed,
                                               const ReplicateStatistics& statistics,
                                               const BootstrapOptions& options, std::string_view stream) {
  if (options.replicates < 1) throw DomainError("bootstrap needs at least one replicate");
  const std::size_t pool = data.total_subjects();
  if (pool == 0) throw DomainError("cannot resample from an empty pool");
  std::vector<std::size_t> sizes(data.groups());
  for (std::size_t g = 0; g < data.groups(); ++g) sizes[g] = data.group_size(g);

  const std::size_t m = observed.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads,
                                                           static_cast<unsigned>(options.replicates)));
  std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(m, 0));
  std::vector<std::exception_ptr> errors(workers);

  auto run = [&](unsigned worker) {
    try {
      std::vector<double> values(m);
      for (std::size_t b = worker; b < options.replicates; b += workers) {
        rng::Engine engine = rng::make_engine(options.seed, stream, b);
        const auto picks = resample_groups(sizes, pool, engine);
        statistics(picks, values);
        for (std::size_t k = 0; k < m; ++k) {
          if (exceeds(values[k], observed[k], options.strict_exceedance)) ++partial[worker][k];
        }
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> total(m, 0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < m; ++k) total[k] += p[k];
  return total;
}

std::vector<TestResult> bootstrap_pvalues(const MultiResponseDataset& data,
                                          const std::vector<std::size_t>& variables, Hypothesis h,
                                          const std::vector<MatrixOrderSpec>& specs,
                                          const BootstrapOptions& options) {
  if (variables.size() != specs.size()) throw DimensionError("one order spec is needed per variable");
  std::vector<TestResult> results(variables.size());
  std::vector<double> observed(variables.size());
  for (std::size_t k = 0; k < variables.size(); ++k) {
    const OrdinalCounts counts = data.counts(variables[k]);
    StatisticValue t = ordinal_statistic(counts, specs[k], h, options.full_pipeline);
    auto& r = results[k];
    r.statistic = t.value;
    for (const auto& c : t.contributions) {
      if (c.axis == Axis::Columns) r.t1 = std::max(r.t1, c.z);
      else r.t2 = std::max(r.t2, c.z);
    }
    r.per_subgraph = std::move(t.contributions);
    r.replicates = options.replicates;
    r.seed = options.seed;
    observed[k] = r.statistic;
  }

  auto statistics = [&](const std::vector<std::vector<std::size_t>>& picks, std::span<double> out) {
    for (std::size_t k = 0; k < variables.size(); ++k) {
      out[k] = ordinal_statistic(counts_from_picks(data, variables[k], picks), specs[k], h,
                                 options.full_pipeline)
                   .value;
    }
  };
  const auto exceed = bootstrap_exceedances(data, observed, statistics, options);
  for (std::size_t k = 0; k < variables.size(); ++k) {
    results[k].exceedances = exceed[k];
    results[k].p_value = static_cast<double>(exceed[k]) / static_cast<double>(options.replicates);
  }
  return results;
}

TestResult bootstrap_pvalue(const MultiResponseDataset& data, std::size_t variable, Hypothesis h,
                            const MatrixOrderSpec& spec, const BootstrapOptions& options) {
  if (variable >= data.variables()) throw IndexError("variable " + std::to_string(variable) + " out of range");
  return bootstrap_pvalues(data, {variable}, h, {spec}, options).front();
}

TestResult bootstrap_pvalue(const OrdinalCounts& data, Hypothesis h, const MatrixOrderSpec& spec,
                            const BootstrapOptions& options) {
  return bootstrap_pvalue(MultiResponseDataset::from_counts(data), 0, h, spec, options);
}

double bonferroni(double p, std::size_t m) {
  if (m < 1) throw DomainError("Bonferroni correction needs m >= 1");
  return std::min(1.0, static_cast<double>(m) * p);
}

}  // namespace orderest
