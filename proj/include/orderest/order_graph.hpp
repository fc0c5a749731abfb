#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace orderest {

using Index = std::size_t;
using Chain = std::vector<Index>;

// A maximally linked subgraph stored as a chain: value[chain[0]] <= value[chain[1]] <= ...
// Descending runs are stored reversed so that "<=" always reads left to right.
class LinkedSubgraph {
 public:
  explicit LinkedSubgraph(Chain chain);

  const Chain& chain() const { return chain_; }
  std::size_t size() const { return chain_.size(); }
  Index front() const { return chain_.front(); }
  Index back() const { return chain_.back(); }
  bool contains(Index i) const;

  friend bool operator==(const LinkedSubgraph&, const LinkedSubgraph&) = default;

 private:
  Chain chain_;
};

// (low, high): the two endpoints of the chain.
std::pair<Index, Index> farthest_pair(const LinkedSubgraph& g);

enum class OrderKind { Trivial, SimpleOrder, Umbrella, SimpleTree, Custom };

std::string_view to_string(OrderKind kind);

struct RestrictionViolation {
  enum class Kind { IndexOutOfRange, InvalidChain, Cycle, NotMaximal };
  Kind kind;
  // For Cycle: a pair (a, b) with a <= b and b <= a. For NotMaximal: (chain id,
  // index that extends it). For the others: (chain id, offending index).
  std::pair<Index, Index> pair;
  std::string message;
};

// Checks index bounds, chain well-formedness, acyclicity and maximality of the
// chain list. Returns the first violation found.
std::optional<RestrictionViolation> validate(std::size_t p, const std::vector<Chain>& chains);

// Per-component plan consumed by the nodal-first estimator.
struct ComponentPlan {
  std::vector<Index> members;  // in chain-concatenation topological order
  std::vector<Index> nodal;    // nodal parameters relative to this component, same order
  // For each nodal parameter: the elements that lie below it, the parameter
  // itself, then the elements above it.
  std::vector<std::vector<Index>> nodal_sequences;
  std::vector<std::size_t> chain_ids;  // subgraphs belonging to this component
};

// An order restriction on p indices, expressed as a set of maximally linked
// subgraphs. Immutable after construction.
class OrderRestriction {
 public:
  static OrderRestriction trivial(std::size_t p);
  static OrderRestriction simple_order(std::size_t p);
  static OrderRestriction umbrella(std::size_t p, Index peak);
  static OrderRestriction simple_tree(std::size_t p, Index root);
  // Throws InvalidRestriction if validate() reports a violation.
  static OrderRestriction custom(std::size_t p, std::vector<Chain> chains);

  std::size_t size() const { return p_; }
  OrderKind kind() const { return kind_; }
  // Peak for umbrellas, root for simple trees, 0 otherwise.
  Index parameter() const { return parameter_; }
  const std::vector<LinkedSubgraph>& subgraphs() const { return subgraphs_; }
  bool is_trivial() const { return subgraphs_.empty(); }

  // True when value[i] <= value[j] is implied (reflexive).
  bool precedes(Index i, Index j) const { return closure_[i * p_ + j]; }
  bool linked(Index i, Index j) const { return precedes(i, j) || precedes(j, i); }

  // Connected pieces of the chain graph; indices in no chain are left out.
  const std::vector<ComponentPlan>& components() const { return components_; }

  // Text form: "none", "simple", "umbrella:<peak>", "tree:<root>", or
  // "chains:0-1-2;4-3-2".
  std::string to_config() const;
  static OrderRestriction parse(std::string_view text, std::size_t p);

  friend bool operator==(const OrderRestriction& a, const OrderRestriction& b) {
    return a.p_ == b.p_ && a.subgraphs_ == b.subgraphs_;
  }

 private:
  OrderRestriction(std::size_t p, OrderKind kind, Index parameter, std::vector<Chain> chains);

  std::size_t p_ = 0;
  OrderKind kind_ = OrderKind::Trivial;
  Index parameter_ = 0;
  std::vector<LinkedSubgraph> subgraphs_;
  std::vector<bool> closure_;
  std::vector<ComponentPlan> components_;
};

// Every i that is linked to all other indices in [0, p).
std::vector<Index> nodal_indices(const OrderRestriction& r);

// All subgraphs whose chain contains i.
std::vector<LinkedSubgraph> subgraphs_for(const OrderRestriction& r, Index i);

}  // namespace orderest
