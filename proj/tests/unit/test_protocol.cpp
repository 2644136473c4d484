#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "fixtures.hpp"
#include "instances.hpp"
#include "swarmkit/compose.hpp"
#include "swarmkit/protocol.hpp"

using namespace swarmkit;

namespace {

// Roles by layered search over (state, last anchor) up to depth states * types,
// without the condensation used by AnchorIndex.
RoleSet bounded_roles(const SwarmProtocol& g, int edge, const Subscription& sigma, const ConcurrencyRelation& conc) {
  const auto& first = g.edge(edge);
  std::size_t bound = g.state_count() * std::max<std::size_t>(g.event_types().size(), 1);
  std::set<std::pair<int, EventType>> layer{{first.target, first.type}};
  std::set<std::pair<int, EventType>> all = layer;
  for (std::size_t d = 0; d < bound && !layer.empty(); ++d) {
    std::set<std::pair<int, EventType>> next;
    for (const auto& [q, a] : layer) {
      for (int e : g.out(q)) {
        const auto& ed = g.edge(e);
        next.emplace(ed.target, a);
        if (!conc.contains(a, ed.type)) next.emplace(ed.target, ed.type);
      }
    }
    layer.clear();
    for (const auto& n : next) {
      if (all.insert(n).second) layer.insert(n);
    }
  }
  TypeSet anchors;
  for (const auto& [q, a] : all) anchors.insert(a);
  RoleSet out;
  for (const auto& [r, ts] : sigma.entries()) {
    for (const auto& t : ts) {
      if (anchors.count(t)) {
        out.insert(r);
        break;
      }
    }
  }
  return out;
}

SwarmProtocol two_concurrent_predecessors() {
  return SwarmProtocol::from_transitions("0", {{"0", "A", "t1", "1"},
                                               {"0", "B", "t2", "2"},
                                               {"1", "B", "t2", "3"},
                                               {"2", "A", "t1", "3"},
                                               {"3", "C", "t", "4"}});
}

}  // namespace

TEST(Validate, WarehouseAccepted) {
  auto w = fixtures::warehouse();
  EXPECT_EQ(w.state_count(), 4u);
  EXPECT_EQ(w.edge_count(), 4u);
  EXPECT_EQ(w.initial_name(), "0");
  EXPECT_EQ(w.roles(), (RoleSet{"T", "FL", "D"}));
}

TEST(Validate, EmptyProtocolAccepted) {
  auto g = SwarmProtocol::validate(RawProtocol{"0", std::nullopt, {}});
  EXPECT_EQ(g.state_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(Validate, DuplicateOutgoingTypeRejected) {
  EXPECT_THROW(SwarmProtocol::from_transitions("0", {{"0", "T", "partReq", "1"}, {"0", "T", "partReq", "2"}}),
               ValidationError);
}

TEST(Validate, UnreachableStateRejected) {
  RawProtocol raw{"0", std::vector<StateId>{"0", "1", "9"}, {{"0", "T", "a", "1"}}};
  EXPECT_THROW(SwarmProtocol::validate(raw), ValidationError);
}

TEST(Validate, DanglingEndpointRejected) {
  RawProtocol raw{"0", std::vector<StateId>{"0", "1"}, {{"0", "T", "a", "1"}, {"1", "T", "b", "7"}}};
  EXPECT_THROW(SwarmProtocol::validate(raw), ValidationError);
}

TEST(Validate, MissingInitialRejected) {
  RawProtocol raw{"x", std::vector<StateId>{"0", "1"}, {{"0", "T", "a", "1"}}};
  EXPECT_THROW(SwarmProtocol::validate(raw), ValidationError);
}

TEST(Concurrency, WarehouseFactoryDiamond) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  ConcurrencyRelation expect;
  expect.insert("closingTime", "car");
  EXPECT_EQ(concurrent_pairs(c), expect);
}

TEST(Concurrency, SequentialProtocolsHaveNone) {
  EXPECT_TRUE(concurrent_pairs(fixtures::warehouse()).empty());
  EXPECT_TRUE(concurrent_pairs(fixtures::factory()).empty());
}

TEST(Concurrency, DiamondWitnessOnRandomCompositions) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = instances::dcc_instance(seed * 3 + 2);
    const auto& g = inst.g;
    auto conc = concurrent_pairs(g);
    for (const auto& [a, b] : conc.pairs()) {
      EXPECT_NE(a, b);
      bool witnessed = false;
      for (std::size_t s = 0; s < g.state_count(); ++s) {
        auto ea = g.edge_for(static_cast<int>(s), a);
        auto eb = g.edge_for(static_cast<int>(s), b);
        if (!ea || !eb) continue;
        auto ab = g.edge_for(g.edge(*ea).target, b);
        auto ba = g.edge_for(g.edge(*eb).target, a);
        witnessed |= ab && ba && g.edge(*ab).target == g.edge(*ba).target;
      }
      EXPECT_TRUE(witnessed) << a << "," << b;
    }
  }
}

TEST(Branching, WarehouseAtInitialState) {
  auto w = fixtures::warehouse();
  std::set<BranchingPair> expect{{"closingTime", "partReq", "0"}, {"partReq", "closingTime", "0"}};
  EXPECT_EQ(branching_pairs(w, concurrent_pairs(w)), expect);
}

TEST(Branching, ConcurrentPairIsNotBranching) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  auto conc = concurrent_pairs(c);
  for (const auto& b : branching_pairs(c, conc)) {
    EXPECT_FALSE(conc.contains(b.t, b.t2));
    EXPECT_FALSE((b.t == "closingTime" && b.t2 == "car") || (b.t == "car" && b.t2 == "closingTime"));
  }
}

TEST(Branching, LinearChainHasNone) {
  auto f = fixtures::factory();
  EXPECT_TRUE(branching_pairs(f, {}).empty());
}

TEST(Joining, WarehouseFactoryHasNone) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  EXPECT_TRUE(joining_triples(c, concurrent_pairs(c)).empty());
}

TEST(Joining, TwoConcurrentPredecessors) {
  auto g = two_concurrent_predecessors();
  auto triples = joining_triples(g, concurrent_pairs(g));
  std::set<JoiningTriple> expect{{"t", "t1", "t2", "3"}};
  EXPECT_EQ(triples, expect);
}

TEST(Joining, SequentialHasNone) { EXPECT_TRUE(joining_triples(fixtures::warehouse(), {}).empty()); }

TEST(Looping, Examples) {
  EXPECT_EQ(looping_types(fixtures::warehouse()), (TypeSet{"partReq", "pos", "partOK"}));
  EXPECT_TRUE(looping_types(compose({fixtures::warehouse(), fixtures::factory()})).empty());
  EXPECT_TRUE(looping_types(fixtures::factory()).empty());
}

TEST(Roles, AssemblyDependsOnPartReq) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  Subscription s = fixtures::sub({{"A", {"car"}}});
  EXPECT_TRUE(roles_set(c, c.initial_name(), "partReq", s, concurrent_pairs(c)).count("A"));
}

TEST(Roles, EmptySubscriptionGivesNoRoles) {
  auto c = compose({fixtures::warehouse(), fixtures::factory()});
  auto conc = concurrent_pairs(c);
  for (const auto& e : c.edges()) EXPECT_TRUE(roles_set(c, c.name(e.source), e.type, {}, conc).empty());
}

TEST(Roles, UnknownTransitionThrows) {
  auto w = fixtures::warehouse();
  EXPECT_THROW(roles_set(w, "1", "partReq", {}, {}), Error);
}

TEST(Roles, MatchesBoundedSearchOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto inst = instances::dcc_instance(seed);
    auto conc = concurrent_pairs(inst.g);
    AnchorIndex idx(inst.g, conc);
    for (std::size_t e = 0; e < inst.g.edge_count(); ++e) {
      EXPECT_EQ(idx.roles(static_cast<int>(e), inst.sigma), bounded_roles(inst.g, static_cast<int>(e), inst.sigma, conc))
          << "seed " << seed << " edge " << e;
    }
  }
}

TEST(Roles, MonotoneInSubscription) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = instances::dcc_instance(seed);
    auto conc = concurrent_pairs(inst.g);
    AnchorIndex idx(inst.g, conc);
    Subscription smaller = random_subscription(rng, inst.sigma, 0.5);
    for (std::size_t e = 0; e < inst.g.edge_count(); ++e) {
      auto lo = idx.roles(static_cast<int>(e), smaller);
      auto hi = idx.roles(static_cast<int>(e), inst.sigma);
      EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
    }
  }
}

TEST(Roles, LargerConcurrencyRelationGivesFewerRoles) {
  for (const auto& gs : instances::composable_pairs(30, 2'000)) {
    auto c = compose(gs);
    auto exact = concurrent_pairs(c);
    auto over = component_concurrency(gs);
    AnchorIndex ie(c, exact);
    AnchorIndex io(c, over);
    auto total = total_subscription(gs);
    for (std::size_t e = 0; e < c.edge_count(); ++e) {
      auto re = ie.roles(static_cast<int>(e), total);
      auto ro = io.roles(static_cast<int>(e), total);
      EXPECT_TRUE(std::includes(re.begin(), re.end(), ro.begin(), ro.end()));
    }
  }
}

TEST(Isomorphism, RenamingInvariant) {
  auto a = fixtures::warehouse();
  auto b = SwarmProtocol::from_transitions("x", {{"x", "T", "partReq", "y"},
                                                 {"y", "FL", "pos", "z"},
                                                 {"z", "T", "partOK", "x"},
                                                 {"x", "D", "closingTime", "w"}});
  EXPECT_TRUE(isomorphic(a, b));
  EXPECT_FALSE(isomorphic(a, fixtures::factory()));
}
