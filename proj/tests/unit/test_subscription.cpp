#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "instances.hpp"
#include "swarmkit/compose.hpp"
#include "swarmkit/subscription.hpp"

using namespace swarmkit;

namespace {

std::vector<StateId> split_tuple(const StateId& s) {
  std::vector<StateId> out(1);
  for (char ch : s) {
    if (ch == '|') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}

}  // namespace

TEST(Compositional, WarehouseFactoryGolden) {
  auto r = generate_subscription({fixtures::warehouse(), fixtures::factory()}, {});
  EXPECT_EQ(r.causal_sigma, fixtures::sub({{"T", {"partReq", "partOK", "pos"}},
                                           {"FL", {"partReq", "pos"}},
                                           {"D", {"partOK", "closingTime"}},
                                           {"A", {"partOK", "car"}}}));
  TypeSet four{"partReq", "partOK", "closingTime", "pos"};
  EXPECT_EQ(r.sigma, fixtures::sub({{"T", four},
                                    {"FL", four},
                                    {"D", {"partReq", "partOK", "closingTime"}},
                                    {"A", {"partReq", "partOK", "closingTime", "car"}}}));
  ConcurrencyRelation conc;
  conc.insert("closingTime", "car");
  conc.insert("pos", "car");
  EXPECT_EQ(r.conc(), conc);
  EXPECT_EQ(r.ifr, RoleSet{"T"});
  EXPECT_NEAR(e_frac(r.sigma, {fixtures::warehouse(), fixtures::factory()}), 0.75, 1e-12);
}

TEST(Compositional, SingleWellFormedInputUnchanged) {
  auto w = fixtures::warehouse();
  auto r = generate_subscription({w}, {fixtures::warehouse_sigma()});
  EXPECT_EQ(r.sigma, fixtures::warehouse_sigma());
  EXPECT_EQ(r.sigma, exact_subscription({w}, {fixtures::warehouse_sigma()}).sigma);
}

TEST(Compositional, NotComposableThrows) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  EXPECT_THROW(generate_subscription({c, fixtures::factory()}, {}), Error);
}

TEST(Compositional, IncludesInputsAndOverApproximatesConcurrency) {
  std::mt19937_64 rng(11);
  for (const auto& gs : instances::composable_pairs(40, 2'000)) {
    auto total = total_subscription(gs);
    std::vector<Subscription> in{random_subscription(rng, total, 0.2), random_subscription(rng, total, 0.2)};
    auto r = generate_subscription(gs, in);
    EXPECT_TRUE(r.sigma.includes(in[0]) && r.sigma.includes(in[1]));
    EXPECT_TRUE(r.conc().includes(concurrent_pairs(compose(gs))));
  }
}

TEST(Compositional, ComponentOrderDoesNotChangeFixpoint) {
  for (const auto& gs : instances::composable_pairs(100, 2'000)) {
    auto a = generate_subscription(gs, {});
    auto b = generate_subscription({gs[1], gs[0]}, {});
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.updating.types(), b.updating.types());
  }
}

// Chains of three and four components exercise types shared transitively.
TEST(Compositional, SoundOnLongerChains) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    GenParams p = instances::small_pair_params(seed);
    p.n_protocols = 3 + seed % 2;
    auto gs = generate_protocols(p);
    ComposeOptions o;
    o.cap = 10'000;
    SwarmProtocol c;
    try {
      c = compose(gs, o);
    } catch (const CapExceeded&) {
      continue;
    }
    auto r = generate_subscription(gs, {});
    EXPECT_TRUE(r.conc().includes(concurrent_pairs(c))) << seed;
    auto wf = check_well_formed(c, r.sigma, &gs);
    EXPECT_TRUE(wf.passed()) << seed << " " << (wf.passed() ? "" : wf.report.failures[0].message);
  }
}

TEST(Subscribers, Examples) {
  auto r = generate_subscription({fixtures::warehouse(), fixtures::factory()}, {});
  EXPECT_TRUE(subscribers(fixtures::factory(), "1", r.sigma).count("FL"));
  EXPECT_TRUE(subscribers(fixtures::factory(), "1", {}).empty());
  EXPECT_THROW(subscribers(fixtures::factory(), "nope", {}), Error);
}

// Types reachable in the composition are reachable in some component, so the
// union of component subscribers covers roles_set for any subscription.
TEST(Subscribers, UnionCoversRolesOnExpansions) {
  std::mt19937_64 rng(3);
  for (const auto& gs : instances::composable_pairs(40, 200)) {
    auto c = compose(gs);
    auto sigma = random_subscription(rng, total_subscription(gs), 0.4);
    AnchorIndex idx(c, concurrent_pairs(c));
    for (std::size_t e = 0; e < c.edge_count(); ++e) {
      auto parts = split_tuple(c.name(c.edge(static_cast<int>(e)).source));
      RoleSet all;
      for (std::size_t k = 0; k < gs.size(); ++k) {
        auto sk = subscribers(gs[k], parts[k], sigma);
        all.insert(sk.begin(), sk.end());
      }
      auto roles = idx.roles(static_cast<int>(e), sigma);
      EXPECT_TRUE(std::includes(all.begin(), all.end(), roles.begin(), roles.end()));
    }
  }
}

// Under the compositional subscription the owning component's subscribers already cover roles_set.
TEST(Subscribers, OwnerCoversRolesUnderCompositionalSubscription) {
  for (const auto& gs : instances::composable_pairs(40, 200)) {
    auto c = compose(gs);
    auto sigma = generate_subscription(gs, {}).sigma;
    AnchorIndex idx(c, concurrent_pairs(c));
    for (std::size_t e = 0; e < c.edge_count(); ++e) {
      const auto& ed = c.edge(static_cast<int>(e));
      auto parts = split_tuple(c.name(ed.source));
      auto roles = idx.roles(static_cast<int>(e), sigma);
      for (std::size_t k = 0; k < gs.size(); ++k) {
        if (!gs[k].has_type(ed.type)) continue;
        auto sk = subscribers(gs[k], parts[k], sigma);
        EXPECT_TRUE(std::includes(sk.begin(), sk.end(), roles.begin(), roles.end())) << ed.type;
      }
    }
  }
}

TEST(ComponentConcurrency, MatchesDefinition) {
  std::vector<SwarmProtocol> gs{fixtures::warehouse(), fixtures::factory()};
  ComponentConcurrency cc(gs);
  EXPECT_TRUE(cc.contains("car", "pos"));
  EXPECT_TRUE(cc.contains("closingTime", "car"));
  EXPECT_FALSE(cc.contains("partReq", "car"));
  EXPECT_FALSE(cc.contains("pos", "closingTime"));
  EXPECT_EQ(cc.materialize(), component_concurrency(gs));
}
