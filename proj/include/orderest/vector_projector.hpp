#pragma once

#include <optional>
#include <span>
#include <vector>

#include "orderest/order_graph.hpp"

namespace orderest {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Values with strictly positive, finite per-element weights.
class WeightedVector {
 public:
  WeightedVector(std::vector<double> values, std::vector<double> weights);
  // Unit weights.
  explicit WeightedVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
};

// Weighted projection onto the simple order cone evaluated directly from the
// min-max formula: out_i = min_{s>=i} max_{t<=i} avg_w(x[t..s]). O(p^2).
std::vector<double> project_simple_order_minmax(const WeightedVector& v);

// Same operator via pool-adjacent-violators. Pools only on strict violations,
// so a nondecreasing input is returned bit-for-bit.
std::vector<double> project_simple_order_pava(const WeightedVector& v);

// Unchecked PAVA kernel used by the estimators; out may alias nothing.
void pava(std::span<const double> values, std::span<const double> weights, std::span<double> out);

struct HpOptions {
  // Pinned components get weight pin_factor * sum(weights), standing in for
  // the infinite weight of an already-estimated parameter.
  double pin_factor = 1e12;
  // Post-condition slack checked on every result.
  double feasibility_tol = 1e-9;
};

struct ProjectionResult {
  std::vector<double> values;
  // Components estimated (and pinned) during the nodal stage.
  std::vector<bool> fixed_mask;
};

// Nodal-first estimator for a vector under an arbitrary restriction built from
// maximally linked subgraphs. Each component must own a nodal parameter.
//
// 1. Nodal parameters are estimated in topological order. Parameter k is the
//    k-th component of the simple-order projection of the sequence
//    (elements below k, k, elements above k), then pinned.
// 2. Each remaining parameter is taken from the simple-order projection of
//    the chains it belongs to, chain by chain, pinning as it goes.
ProjectionResult hp_estimate(const WeightedVector& v, const OrderRestriction& r,
                             const HpOptions& options = {});

struct FeasibilityViolation {
  std::size_t chain_id;
  // Adjacent chain elements with values[low] > values[high] + tol.
  Index low;
  Index high;
};

std::optional<FeasibilityViolation> verify_feasible(std::span<const double> values,
                                                    const OrderRestriction& r, double tol);

}  // namespace orderest
