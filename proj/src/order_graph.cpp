#include "orderest/order_graph.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "orderest/error.hpp"

namespace orderest {

LinkedSubgraph::LinkedSubgraph(Chain chain) : chain_(std::move(chain)) {
  if (chain_.size() < 2) {
    throw InvalidRestriction("linked subgraph needs at least two elements");
  }
  Chain sorted = chain_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidRestriction("linked subgraph repeats an index");
  }
}

bool LinkedSubgraph::contains(Index i) const {
  return std::find(chain_.begin(), chain_.end(), i) != chain_.end();
}

std::pair<Index, Index> farthest_pair(const LinkedSubgraph& g) {
  if (g.size() < 2) {
    throw InvalidRestriction("farthest pair needs a chain of length >= 2");
  }
  return {g.front(), g.back()};
}

std::string_view to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::Trivial: return "none";
    case OrderKind::SimpleOrder: return "simple";
    case OrderKind::Umbrella: return "umbrella";
    case OrderKind::SimpleTree: return "tree";
    case OrderKind::Custom: return "chains";
  }
  return "unknown";
}

namespace {

std::vector<bool> transitive_closure(std::size_t p, const std::vector<Chain>& chains) {
  std::vector<bool> c(p * p, false);
  for (Index i = 0; i < p; ++i) c[i * p + i] = true;
  for (const auto& chain : chains) {
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) c[chain[k] * p + chain[k + 1]] = true;
  }
  for (Index k = 0; k < p; ++k) {
    for (Index i = 0; i < p; ++i) {
      if (!c[i * p + k]) continue;
      for (Index j = 0; j < p; ++j) {
        if (c[k * p + j]) c[i * p + j] = true;
      }
    }
  }
  return c;
}

std::string chain_text(const Chain& chain) {
  std::string out;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (k) out += '-';
    out += std::to_string(chain[k]);
  }
  return out;
}

}  // namespace

std::optional<RestrictionViolation> validate(std::size_t p, const std::vector<Chain>& chains) {
  using Kind = RestrictionViolation::Kind;
  for (std::size_t id = 0; id < chains.size(); ++id) {
    const auto& chain = chains[id];
    if (chain.size() < 2) {
      return RestrictionViolation{Kind::InvalidChain, {id, chain.empty() ? 0 : chain[0]},
                                  "chain " + std::to_string(id) + " has fewer than two elements"};
    }
    for (Index i : chain) {
      if (i >= p) {
        return RestrictionViolation{Kind::IndexOutOfRange, {id, i},
                                    "chain " + std::to_string(id) + " references index " +
                                        std::to_string(i) + " outside [0, " + std::to_string(p) + ")"};
      }
    }
    Chain sorted = chain;
    std::sort(sorted.begin(), sorted.end());
    if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
      return RestrictionViolation{Kind::InvalidChain, {id, *it},
                                  "chain " + std::to_string(id) + " repeats index " + std::to_string(*it)};
    }
  }

  const auto closure = transitive_closure(p, chains);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      if (closure[i * p + j] && closure[j * p + i]) {
        return RestrictionViolation{Kind::Cycle, {i, j},
                                    "indices " + std::to_string(i) + " and " + std::to_string(j) +
                                        " are ordered both ways"};
      }
    }
  }

  auto linked = [&](Index a, Index b) { return closure[a * p + b] || closure[b * p + a]; };
  for (std::size_t id = 0; id < chains.size(); ++id) {
    const auto& chain = chains[id];
    for (Index x = 0; x < p; ++x) {
      if (std::find(chain.begin(), chain.end(), x) != chain.end()) continue;
      if (std::all_of(chain.begin(), chain.end(), [&](Index c) { return linked(x, c); })) {
        return RestrictionViolation{Kind::NotMaximal, {id, x},
                                    "chain " + chain_text(chain) + " is not maximal: index " +
                                        std::to_string(x) + " is linked to all of it"};
      }
    }
    for (std::size_t other = 0; other < id; ++other) {
      Chain a = chain, b = chains[other];
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) {
        return RestrictionViolation{Kind::NotMaximal, {id, other},
                                    "chain " + chain_text(chain) + " duplicates chain " +
                                        std::to_string(other)};
      }
    }
  }
  return std::nullopt;
}

OrderRestriction::OrderRestriction(std::size_t p, OrderKind kind, Index parameter,
                                   std::vector<Chain> chains)
    : p_(p), kind_(kind), parameter_(parameter) {
  if (auto v = validate(p, chains)) throw InvalidRestriction(v->message);
  subgraphs_.reserve(chains.size());
  for (auto& c : chains) subgraphs_.emplace_back(std::move(c));
  closure_ = transitive_closure(p_, [&] {
    std::vector<Chain> cs;
    for (const auto& g : subgraphs_) cs.push_back(g.chain());
    return cs;
  }());

  // Union-find over chain membership.
  std::vector<Index> parent(p_);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> appearance(p_, p_ * p_ + 1);
  std::size_t rank = 0;
  for (const auto& g : subgraphs_) {
    for (Index i : g.chain()) {
      appearance[i] = std::min(appearance[i], rank++);
      parent[find(i)] = find(g.front());
    }
  }

  // Kahn's algorithm; ties broken by first appearance in the concatenated chains.
  std::vector<std::vector<Index>> succ(p_);
  std::vector<std::size_t> indegree(p_, 0);
  for (const auto& g : subgraphs_) {
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      Index a = g.chain()[k], b = g.chain()[k + 1];
      if (std::find(succ[a].begin(), succ[a].end(), b) == succ[a].end()) {
        succ[a].push_back(b);
        ++indegree[b];
      }
    }
  }
  std::vector<Index> topo;
  std::vector<bool> in_chain(p_, false);
  for (const auto& g : subgraphs_)
    for (Index i : g.chain()) in_chain[i] = true;
  std::vector<Index> ready;
  for (Index i = 0; i < p_; ++i)
    if (in_chain[i] && indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end(),
                               [&](Index a, Index b) { return appearance[a] < appearance[b]; });
    Index next = *it;
    ready.erase(it);
    topo.push_back(next);
    for (Index s : succ[next])
      if (--indegree[s] == 0) ready.push_back(s);
  }

  std::vector<std::size_t> component_of(p_, p_);
  for (Index i : topo) {
    Index root = find(i);
    if (component_of[root] == p_) {
      component_of[root] = components_.size();
      components_.emplace_back();
    }
    components_[component_of[root]].members.push_back(i);
  }
  for (std::size_t id = 0; id < subgraphs_.size(); ++id) {
    components_[component_of[find(subgraphs_[id].front())]].chain_ids.push_back(id);
  }
  for (auto& comp : components_) {
    for (Index k : comp.members) {
      bool nodal = std::all_of(comp.members.begin(), comp.members.end(),
                               [&](Index m) { return linked(k, m); });
      if (!nodal) continue;
      comp.nodal.push_back(k);
      std::vector<Index> seq;
      for (Index m : comp.members)
        if (m != k && precedes(m, k)) seq.push_back(m);
      seq.push_back(k);
      for (Index m : comp.members)
        if (m != k && precedes(k, m)) seq.push_back(m);
      comp.nodal_sequences.push_back(std::move(seq));
    }
  }
}

OrderRestriction OrderRestriction::trivial(std::size_t p) {
  if (p == 0) throw DimensionError("order restriction needs p >= 1");
  return OrderRestriction(p, OrderKind::Trivial, 0, {});
}

OrderRestriction OrderRestriction::simple_order(std::size_t p) {
  if (p == 0) throw DimensionError("simple order needs p >= 1");
  std::vector<Chain> chains;
  if (p >= 2) {
    Chain c(p);
    std::iota(c.begin(), c.end(), Index{0});
    chains.push_back(std::move(c));
  }
  return OrderRestriction(p, OrderKind::SimpleOrder, 0, std::move(chains));
}

OrderRestriction OrderRestriction::umbrella(std::size_t p, Index peak) {
  if (p == 0) throw DimensionError("umbrella order needs p >= 1");
  if (peak >= p) {
    throw IndexError("umbrella peak " + std::to_string(peak) + " outside [0, " + std::to_string(p) + ")");
  }
  std::vector<Chain> chains;
  if (peak >= 1) {
    Chain up(peak + 1);
    std::iota(up.begin(), up.end(), Index{0});
    chains.push_back(std::move(up));
  }
  if (peak + 1 < p) {
    Chain down;
    for (Index i = p; i-- > peak;) down.push_back(i);
    chains.push_back(std::move(down));
  }
  return OrderRestriction(p, OrderKind::Umbrella, peak, std::move(chains));
}

OrderRestriction OrderRestriction::simple_tree(std::size_t p, Index root) {
  if (p < 2) throw DimensionError("simple tree order needs p >= 2");
  if (root >= p) {
    throw IndexError("tree root " + std::to_string(root) + " outside [0, " + std::to_string(p) + ")");
  }
  std::vector<Chain> chains;
  for (Index i = 0; i < p; ++i)
    if (i != root) chains.push_back({root, i});
  return OrderRestriction(p, OrderKind::SimpleTree, root, std::move(chains));
}

OrderRestriction OrderRestriction::custom(std::size_t p, std::vector<Chain> chains) {
  if (p == 0) throw DimensionError("order restriction needs p >= 1");
  return OrderRestriction(p, OrderKind::Custom, 0, std::move(chains));
}

std::string OrderRestriction::to_config() const {
  switch (kind_) {
    case OrderKind::Trivial: return "none";
    case OrderKind::SimpleOrder: return "simple";
    case OrderKind::Umbrella: return "umbrella:" + std::to_string(parameter_);
    case OrderKind::SimpleTree: return "tree:" + std::to_string(parameter_);
    case OrderKind::Custom: break;
  }
  std::string out = "chains:";
  for (std::size_t k = 0; k < subgraphs_.size(); ++k) {
    if (k) out += ';';
    out += chain_text(subgraphs_[k].chain());
  }
  return out;
}

namespace {

Index parse_index(std::string_view text, std::string_view context) {
  Index value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid index '" + std::string(text) + "' in restriction '" +
                     std::string(context) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

OrderRestriction OrderRestriction::parse(std::string_view text, std::size_t p) {
  auto colon = text.find(':');
  std::string_view tag = text.substr(0, colon);
  std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (tag == "none" || tag == "trivial") return trivial(p);
  if (tag == "simple") return simple_order(p);
  if (tag == "umbrella") return umbrella(p, parse_index(arg, text));
  if (tag == "tree") return simple_tree(p, parse_index(arg, text));
  if (tag == "chains") {
    std::vector<Chain> chains;
    for (auto part : split(arg, ';')) {
      if (part.empty()) continue;
      Chain c;
      for (auto idx : split(part, '-')) c.push_back(parse_index(idx, text));
      chains.push_back(std::move(c));
    }
    return custom(p, std::move(chains));
  }
  throw ParseError("unknown restriction kind '" + std::string(tag) +
                   "' (expected none, simple, umbrella:<peak>, tree:<root> or chains:...)");
}

std::vector<Index> nodal_indices(const OrderRestriction& r) {
  std::vector<Index> out;
  for (Index i = 0; i < r.size(); ++i) {
    bool all = true;
    for (Index j = 0; j < r.size() && all; ++j) all = r.linked(i, j);
    if (all) out.push_back(i);
  }
  return out;
}

std::vector<LinkedSubgraph> subgraphs_for(const OrderRestriction& r, Index i) {
  if (i >= r.size()) throw IndexError("index " + std::to_string(i) + " out of range");
  std::vector<LinkedSubgraph> out;
  for (const auto& g : r.subgraphs())
    if (g.contains(i)) out.push_back(g);
  return out;
}

}  // namespace orderest
