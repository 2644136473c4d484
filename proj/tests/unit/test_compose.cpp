#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "instances.hpp"
#include "swarmkit/compose.hpp"
#include "swarmkit/subscription.hpp"

using namespace swarmkit;

namespace {

using Trace = std::vector<EventType>;

void traces(const SwarmProtocol& g, int s, std::size_t depth, Trace& cur, std::set<Trace>& out) {
  out.insert(cur);
  if (depth == 0) return;
  for (int e : g.out(s)) {
    cur.push_back(g.edge(e).type);
    traces(g, g.edge(e).target, depth - 1, cur, out);
    cur.pop_back();
  }
}

std::set<Trace> traces(const SwarmProtocol& g, std::size_t depth) {
  std::set<Trace> out;
  Trace cur;
  traces(g, 0, depth, cur, out);
  return out;
}

// Whether the type sequence is a path of g from the initial state.
bool accepts(const SwarmProtocol& g, const Trace& t) {
  int s = 0;
  for (const auto& x : t) {
    auto e = g.edge_for(s, x);
    if (!e) return false;
    s = g.edge(*e).target;
  }
  return true;
}

}  // namespace

TEST(Interface, WarehouseFactory) {
  auto r = interface(fixtures::warehouse(), fixtures::factory());
  EXPECT_EQ(r.interfacing_roles, RoleSet{"T"});
  EXPECT_EQ(r.interfacing_event_types, (TypeSet{"partReq", "partOK"}));
  EXPECT_TRUE(r.interfacing());
}

TEST(Interface, SelfInterface) {
  auto r = interface(fixtures::warehouse(), fixtures::warehouse());
  EXPECT_EQ(r.interfacing_roles, (RoleSet{"T", "FL", "D"}));
  EXPECT_TRUE(r.interfacing());
}

TEST(Interface, SameTypeDifferentRoles) {
  auto g = SwarmProtocol::from_transitions("0", {{"0", "T", "x", "1"}});
  auto h = SwarmProtocol::from_transitions("0", {{"0", "A", "x", "1"}});
  auto r = interface(g, h);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (InterfaceViolation{"x", "T", "A"}));
  EXPECT_THROW(compose({g, h}), InterfaceError);
}

TEST(Compose, WarehouseFactory) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  EXPECT_EQ(c.state_count(), 8u);
  EXPECT_EQ(c.edge_count(), 8u);
  EXPECT_EQ(restricted_transition_count({fixtures::warehouse(), fixtures::factory()}), 0u);
}

TEST(Compose, BehaviourRestriction) {
  auto c = compose({fixtures::warehouse(), fixtures::factory_swapped()});
  EXPECT_TRUE(isomorphic(c, SwarmProtocol::from_transitions("0", {{"0", "D", "closingTime", "1"}})));
  // Only closingTime survives: three warehouse and three factory transitions are lost.
  EXPECT_EQ(restricted_transition_count({fixtures::warehouse(), fixtures::factory_swapped()}), 6u);
}

TEST(Compose, ExplicitRolesBlock) {
  ComposeOptions o;
  o.roles = RoleSet{"T"};
  auto c = compose({fixtures::warehouse(), SwarmProtocol::empty()}, o);
  EXPECT_TRUE(isomorphic(c, SwarmProtocol::from_transitions("0", {{"0", "D", "closingTime", "1"}})));
}

TEST(Compose, CapExceeded) {
  ComposeOptions o;
  o.cap = 3;
  EXPECT_THROW(compose({fixtures::warehouse(), fixtures::factory()}, o), CapExceeded);
}

TEST(Composable, Examples) {
  EXPECT_TRUE(check_composable({fixtures::warehouse(), fixtures::factory()}).composable);
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  EXPECT_FALSE(check_composable({c, fixtures::factory()}).composable);
  auto g = SwarmProtocol::from_transitions("0", {{"0", "T", "x", "1"}});
  auto h = SwarmProtocol::from_transitions("0", {{"0", "A", "x", "1"}});
  EXPECT_FALSE(check_composable({g, h}).composable);
}

TEST(Composable, FastCheckAgreesWithFullCheck) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<SwarmProtocol> gs;
    auto inst = instances::dcc_instance(seed);
    gs.push_back(inst.g);
    gs.push_back(random_protocol(rng, 4, 3));
    EXPECT_EQ(check_composable(gs).composable, check_composable_fast(gs).composable) << seed;
  }
  for (const auto& gs : instances::composable_pairs(20)) {
    EXPECT_TRUE(check_composable(gs).composable);
    EXPECT_TRUE(check_composable_fast(gs).composable);
  }
}

TEST(ComposeProperties, IdempotentAndCommutative) {
  for (const auto& gs : instances::composable_pairs(25, 2'000)) {
    EXPECT_TRUE(isomorphic(compose({gs[0], gs[0]}), gs[0]));
    EXPECT_TRUE(isomorphic(compose({gs[0], gs[1]}), compose({gs[1], gs[0]})));
  }
}

TEST(ComposeProperties, FlatProductMatchesBinaryFold) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    GenParams p = instances::small_pair_params(seed);
    p.n_protocols = 3;
    auto gs = generate_protocols(p);
    ComposeOptions cap;
    cap.cap = 5'000;
    try {
      auto flat = compose(gs, cap);
      auto fold = compose({compose({gs[0], gs[1]}, cap), gs[2]}, cap);
      EXPECT_TRUE(isomorphic(flat, fold)) << seed;
    } catch (const CapExceeded&) {
    }
  }
}

TEST(ComposeProperties, TraceSoundness) {
  for (const auto& gs : instances::composable_pairs(15, 2'000)) {
    auto c = compose(gs);
    for (const auto& t : traces(c, 8)) {
      for (const auto& g : gs) {
        Trace proj;
        for (const auto& x : t) {
          if (g.has_type(x)) proj.push_back(x);
        }
        EXPECT_TRUE(accepts(g, proj));
      }
    }
  }
}

static std::vector<StateId> split_tuple(const StateId& s) {
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

// Each composed step moves exactly the components owning its type, each along its own t-edge.
TEST(ComposeProperties, ComponentsMoveExactlyWhenTheyOwnTheType) {
  for (const auto& gs : instances::composable_pairs(20, 2'000)) {
    auto c = compose(gs);
    for (const auto& e : c.edges()) {
      auto src = split_tuple(c.name(e.source));
      auto tgt = split_tuple(c.name(e.target));
      ASSERT_EQ(src.size(), gs.size());
      for (std::size_t k = 0; k < gs.size(); ++k) {
        if (!gs[k].has_type(e.type)) {
          EXPECT_EQ(src[k], tgt[k]);
          continue;
        }
        auto ek = gs[k].edge_for(*gs[k].index_of(src[k]), e.type);
        ASSERT_TRUE(ek.has_value());
        EXPECT_EQ(gs[k].name(gs[k].edge(*ek).target), tgt[k]);
      }
    }
  }
}

TEST(TupleName, Unambiguous) {
  EXPECT_EQ(tuple_name({"0", "1"}), "0|1");
  EXPECT_NE(tuple_name({"a|b", "c"}), tuple_name({"a", "b|c"}));
}
