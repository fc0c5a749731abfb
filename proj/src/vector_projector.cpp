#include "orderest/vector_projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "orderest/error.hpp"

namespace orderest {

CompensatedSum& CompensatedSum::operator+=(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
  return *this;
}

WeightedVector::WeightedVector(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.size() != weights_.size()) {
    throw DimensionError("values and weights differ in length (" + std::to_string(values_.size()) +
                         " vs " + std::to_string(weights_.size()) + ")");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("value " + std::to_string(i) + " is not finite");
    }
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw DomainError("weight " + std::to_string(i) + " must be positive and finite");
    }
  }
}

WeightedVector::WeightedVector(std::vector<double> values)
    : WeightedVector(values, std::vector<double>(values.size(), 1.0)) {}

std::vector<double> project_simple_order_minmax(const WeightedVector& v) {
  const std::size_t p = v.size();
  const auto x = v.values();
  const auto w = v.weights();
  // avg[t * p + s] = weighted mean of x[t..s], t <= s.
  std::vector<double> avg(p * p, 0.0);
  for (std::size_t s = 0; s < p; ++s) {
    CompensatedSum num, den;
    for (std::size_t t = s + 1; t-- > 0;) {
      num += w[t] * x[t];
      den += w[t];
      avg[t * p + s] = num.value() / den.value();
    }
  }
  std::vector<double> out(p, std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < p; ++s) {
    double running_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= s; ++i) {
      running_max = std::max(running_max, avg[i * p + s]);
      out[i] = std::min(out[i], running_max);
    }
  }
  return out;
}

void pava(std::span<const double> values, std::span<const double> weights, std::span<double> out) {
  struct Block {
    CompensatedSum num;
    CompensatedSum den;
    std::size_t count;
    double mean() const { return num.value() / den.value(); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Block b{};
    b.num += weights[i] * values[i];
    b.den += weights[i];
    b.count = 1;
    blocks.push_back(b);
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block last = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      prev.num += last.num.value();
      prev.den += last.den.value();
      prev.count += last.count;
    }
  }
  std::size_t pos = 0;
  for (const auto& b : blocks) {
    // Singletons keep the original value so feasible inputs come back unchanged.
    const double m = b.count == 1 ? values[pos] : b.mean();
    for (std::size_t k = 0; k < b.count; ++k) out[pos++] = m;
  }
}

std::vector<double> project_simple_order_pava(const WeightedVector& v) {
  std::vector<double> out(v.size());
  pava(v.values(), v.weights(), out);
  return out;
}

ProjectionResult hp_estimate(const WeightedVector& v, const OrderRestriction& r,
                             const HpOptions& options) {
  if (v.size() != r.size()) {
    throw DimensionError("vector length " + std::to_string(v.size()) +
                         " does not match restriction size " + std::to_string(r.size()));
  }
  const std::size_t p = v.size();
  std::vector<double> x(v.values().begin(), v.values().end());
  std::vector<double> w(v.weights().begin(), v.weights().end());
  std::vector<bool> pinned(p, false);
  ProjectionResult result{{}, std::vector<bool>(p, false)};

  CompensatedSum total;
  for (double wi : w) total += wi;
  const double pin_weight = options.pin_factor * total.value();

  std::vector<double> gx, gw, gout;
  auto project_along = [&](const std::vector<Index>& seq) {
    gx.resize(seq.size());
    gw.resize(seq.size());
    gout.resize(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
      gx[k] = x[seq[k]];
      gw[k] = pinned[seq[k]] ? pin_weight : w[seq[k]];
    }
    pava(gx, gw, gout);
  };

  for (const auto& comp : r.components()) {
    if (comp.nodal.empty()) {
      throw UnsupportedError("restriction component containing index " +
                             std::to_string(comp.members.front()) + " has no nodal parameter");
    }
    for (std::size_t n = 0; n < comp.nodal.size(); ++n) {
      const Index k = comp.nodal[n];
      const auto& seq = comp.nodal_sequences[n];
      project_along(seq);
      const auto pos = static_cast<std::size_t>(std::find(seq.begin(), seq.end(), k) - seq.begin());
      x[k] = gout[pos];
      pinned[k] = true;
      result.fixed_mask[k] = true;
    }
    for (std::size_t id : comp.chain_ids) {
      const auto& chain = r.subgraphs()[id].chain();
      if (std::all_of(chain.begin(), chain.end(), [&](Index i) { return pinned[i]; })) continue;
      project_along(chain);
      for (std::size_t k = 0; k < chain.size(); ++k) {
        if (!pinned[chain[k]]) {
          x[chain[k]] = gout[k];
          pinned[chain[k]] = true;
        }
      }
    }
  }

  if (auto bad = verify_feasible(x, r, options.feasibility_tol)) {
    throw UnsupportedError("nodal-first estimate violates chain " + std::to_string(bad->chain_id) +
                           " at indices " + std::to_string(bad->low) + ", " +
                           std::to_string(bad->high) +
                           "; sequential chain combination is not defined for this restriction");
  }
  result.values = std::move(x);
  return result;
}

std::optional<FeasibilityViolation> verify_feasible(std::span<const double> values,
                                                    const OrderRestriction& r, double tol) {
  if (values.size() != r.size()) {
    throw DimensionError("vector length does not match restriction size");
  }
  for (std::size_t id = 0; id < r.subgraphs().size(); ++id) {
    const auto& chain = r.subgraphs()[id].chain();
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      if (!(values[chain[k]] <= values[chain[k + 1]] + tol)) {
        return FeasibilityViolation{id, chain[k], chain[k + 1]};
      }
    }
  }
  return std::nullopt;
}

}  // namespace orderest
