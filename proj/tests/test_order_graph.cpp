#include <gtest/gtest.h>

#include <random>

#include "orderest/error.hpp"
#include "orderest/order_graph.hpp"

using namespace orderest;

namespace {

std::vector<Chain> chains_of(const OrderRestriction& r) {
  std::vector<Chain> out;
  for (const auto& g : r.subgraphs()) out.push_back(g.chain());
  return out;
}

}  // namespace

TEST(SimpleOrder, Chains) {
  EXPECT_EQ(chains_of(OrderRestriction::simple_order(4)), (std::vector<Chain>{{0, 1, 2, 3}}));
  EXPECT_EQ(chains_of(OrderRestriction::simple_order(2)), (std::vector<Chain>{{0, 1}}));
  EXPECT_TRUE(OrderRestriction::simple_order(1).is_trivial());
  EXPECT_THROW(OrderRestriction::simple_order(0), DimensionError);
}

TEST(Umbrella, Chains) {
  EXPECT_EQ(chains_of(OrderRestriction::umbrella(5, 2)), (std::vector<Chain>{{0, 1, 2}, {4, 3, 2}}));
  EXPECT_EQ(chains_of(OrderRestriction::umbrella(5, 4)), (std::vector<Chain>{{0, 1, 2, 3, 4}}));
  EXPECT_EQ(chains_of(OrderRestriction::umbrella(3, 0)), (std::vector<Chain>{{2, 1, 0}}));
  EXPECT_THROW(OrderRestriction::umbrella(5, 5), IndexError);
}

TEST(SimpleTree, Chains) {
  EXPECT_EQ(chains_of(OrderRestriction::simple_tree(4, 0)), (std::vector<Chain>{{0, 1}, {0, 2}, {0, 3}}));
  EXPECT_EQ(chains_of(OrderRestriction::simple_tree(2, 0)), (std::vector<Chain>{{0, 1}}));
  EXPECT_EQ(chains_of(OrderRestriction::simple_tree(4, 2)), (std::vector<Chain>{{2, 0}, {2, 1}, {2, 3}}));
  EXPECT_THROW(OrderRestriction::simple_tree(4, 4), IndexError);
}

TEST(NodalIndices, Examples) {
  EXPECT_EQ(nodal_indices(OrderRestriction::simple_order(5)), (std::vector<Index>{0, 1, 2, 3, 4}));
  EXPECT_EQ(nodal_indices(OrderRestriction::umbrella(5, 2)), (std::vector<Index>{2}));
  EXPECT_EQ(nodal_indices(OrderRestriction::simple_tree(4, 0)), (std::vector<Index>{0}));
}

TEST(SubgraphsFor, Examples) {
  const auto u = OrderRestriction::umbrella(5, 2);
  EXPECT_EQ(subgraphs_for(u, 2).size(), 2u);
  const auto one = subgraphs_for(u, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].chain(), (Chain{0, 1, 2}));
  EXPECT_EQ(subgraphs_for(OrderRestriction::simple_order(3), 1).size(), 1u);
  EXPECT_THROW(subgraphs_for(u, 7), IndexError);
}

TEST(FarthestPair, Examples) {
  EXPECT_EQ(farthest_pair(LinkedSubgraph({0, 1, 2, 3})), std::make_pair(Index{0}, Index{3}));
  EXPECT_EQ(farthest_pair(LinkedSubgraph({4, 3, 2})), std::make_pair(Index{4}, Index{2}));
  EXPECT_EQ(farthest_pair(LinkedSubgraph({0, 3})), std::make_pair(Index{0}, Index{3}));
  EXPECT_THROW(LinkedSubgraph({1}), InvalidRestriction);
  EXPECT_THROW(LinkedSubgraph({1, 2, 1}), InvalidRestriction);
}

TEST(Validate, Examples) {
  auto cyc = validate(2, {{0, 1}, {1, 0}});
  ASSERT_TRUE(cyc);
  EXPECT_EQ(cyc->kind, RestrictionViolation::Kind::Cycle);
  auto sub = validate(3, {{0, 1, 2}, {0, 1}});
  ASSERT_TRUE(sub);
  EXPECT_EQ(sub->kind, RestrictionViolation::Kind::NotMaximal);
  EXPECT_FALSE(validate(3, {{0, 1, 2}}));
  auto range = validate(3, {{0, 3}});
  ASSERT_TRUE(range);
  EXPECT_EQ(range->kind, RestrictionViolation::Kind::IndexOutOfRange);
  EXPECT_THROW(OrderRestriction::custom(3, {{0, 1}, {1, 2}, {2, 0}}), InvalidRestriction);
}

TEST(Validate, ExtendableChainIsNotMaximal) {
  // 0 <= 2 is implied by both chains but [0, 1] could still grow to [0, 1, 2].
  auto v = validate(3, {{0, 1}, {1, 2}});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, RestrictionViolation::Kind::NotMaximal);
}

TEST(Closure, Precedes) {
  const auto u = OrderRestriction::umbrella(5, 2);
  EXPECT_TRUE(u.precedes(0, 2));
  EXPECT_TRUE(u.precedes(4, 2));
  EXPECT_FALSE(u.precedes(2, 0));
  EXPECT_FALSE(u.linked(0, 4));
  EXPECT_TRUE(u.linked(1, 2));
}

TEST(Config, RoundTrip) {
  for (const auto& r : {OrderRestriction::trivial(4), OrderRestriction::simple_order(4),
                        OrderRestriction::umbrella(4, 1), OrderRestriction::simple_tree(4, 3),
                        OrderRestriction::custom(5, {{0, 1, 2}, {4, 3, 2}})}) {
    const auto back = OrderRestriction::parse(r.to_config(), r.size());
    EXPECT_EQ(back, r) << r.to_config();
  }
  EXPECT_EQ(OrderRestriction::parse("chains:0-1-2;4-3-2", 5), OrderRestriction::umbrella(5, 2));
  EXPECT_THROW(OrderRestriction::parse("zigzag", 4), ParseError);
  EXPECT_THROW(OrderRestriction::parse("tree:x", 4), ParseError);
  EXPECT_THROW(OrderRestriction::parse("umbrella:9", 4), IndexError);
  EXPECT_THROW(OrderRestriction::parse("chains:0-1;1-0", 2), InvalidRestriction);
}

TEST(Components, UnionFindOverChains) {
  const auto r = OrderRestriction::custom(6, {{0, 1, 2}, {3, 4}});
  ASSERT_EQ(r.components().size(), 2u);  // {0,1,2}, {3,4}; 5 is unconstrained
  EXPECT_EQ(r.components()[0].members, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(r.components()[1].members, (std::vector<Index>{3, 4}));
}

// Properties over the three built-in families.

TEST(Property, BuiltInsValidateAndCoverEveryIndex) {
  for (std::size_t p = 2; p <= 9; ++p) {
    std::vector<OrderRestriction> rs{OrderRestriction::simple_order(p)};
    for (Index k = 0; k < p; ++k) {
      rs.push_back(OrderRestriction::umbrella(p, k));
      rs.push_back(OrderRestriction::simple_tree(p, k));
    }
    for (const auto& r : rs) {
      EXPECT_FALSE(validate(p, chains_of(r))) << r.to_config() << " p=" << p;
      for (Index i = 0; i < p; ++i) EXPECT_FALSE(subgraphs_for(r, i).empty());
    }
  }
}

TEST(Property, NodalCardinality) {
  for (std::size_t p = 2; p <= 12; ++p) {
    EXPECT_EQ(nodal_indices(OrderRestriction::simple_order(p)).size(), p);
    for (Index peak = 1; peak + 1 < p; ++peak)
      EXPECT_EQ(nodal_indices(OrderRestriction::umbrella(p, peak)), (std::vector<Index>{peak}));
  }
}

TEST(Property, FarthestPairIgnoresInteriorElements) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    Chain c{0, 1};
    std::vector<Index> pool{2, 3, 4, 5, 6, 7, 8, 9};
    std::shuffle(pool.begin(), pool.end(), g);
    const std::size_t extra = g() % pool.size();
    Chain longer{0};
    for (std::size_t k = 0; k < extra; ++k) longer.push_back(pool[k]);
    longer.push_back(1);
    EXPECT_EQ(farthest_pair(LinkedSubgraph(c)), farthest_pair(LinkedSubgraph(longer)));
  }
}
