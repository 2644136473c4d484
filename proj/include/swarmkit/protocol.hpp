#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "swarmkit/types.hpp"

namespace swarmkit {

struct Transition {
  StateId source;
  Role role;
  EventType type;
  StateId target;

  auto operator<=>(const Transition&) const = default;
};

// Unvalidated protocol description as read from JSON.
struct RawProtocol {
  StateId initial;
  std::optional<std::vector<StateId>> states;  // inferred when absent
  std::vector<Transition> transitions;
};

// Validated finite LTS labelled with (role, event type).
//
// States are indexed 0..n-1 in breadth-first order from the initial state
// (index 0), visiting successors by event type. Outgoing edges of a state are
// sorted by event type and unique per type.
class SwarmProtocol {
 public:
  struct Edge {
    int source;
    int target;
    Role role;
    EventType type;
  };

  static SwarmProtocol validate(const RawProtocol& raw);
  static SwarmProtocol from_transitions(const StateId& initial, const std::vector<Transition>& ts);
  // The terminated protocol 0.
  static SwarmProtocol empty(const StateId& initial = "0");

  std::size_t state_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<StateId>& state_names() const { return names_; }
  const StateId& name(int s) const { return names_[s]; }
  const StateId& initial_name() const { return names_[0]; }
  std::optional<int> index_of(const StateId& s) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<int>& out(int s) const { return out_[s]; }
  const std::vector<int>& in(int s) const { return in_[s]; }
  // Outgoing edge index labelled t at s.
  std::optional<int> edge_for(int s, const EventType& t) const;

  const TypeSet& event_types() const { return types_; }
  const RoleSet& roles() const { return roles_; }
  // Roles emitting t (more than one violates confusion-freeness item 1).
  RoleSet emitters_of(const EventType& t) const;
  bool has_role(const Role& r) const { return roles_.count(r) > 0; }
  bool has_type(const EventType& t) const { return types_.count(t) > 0; }

  std::vector<Transition> transitions() const;

 private:
  std::vector<StateId> names_;
  std::map<StateId, int> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  TypeSet types_;
  RoleSet roles_;
};

struct BranchingPair {
  EventType t;
  EventType t2;
  StateId state;
  auto operator<=>(const BranchingPair&) const = default;
};

// t is joining for t1 and t2 (t1 < t2) at state.
struct JoiningTriple {
  EventType t;
  EventType t1;
  EventType t2;
  StateId state;
  auto operator<=>(const JoiningTriple&) const = default;
};

ConcurrencyRelation concurrent_pairs(const SwarmProtocol& g);
std::set<BranchingPair> branching_pairs(const SwarmProtocol& g, const ConcurrencyRelation& conc);
std::set<JoiningTriple> joining_triples(const SwarmProtocol& g, const ConcurrencyRelation& conc);
TypeSet looping_types(const SwarmProtocol& g);
// Edge indices lying on a directed cycle.
std::vector<bool> cyclic_edges(const SwarmProtocol& g);

// Causal-dependency roles of the transition s --t-->. Throws if s does not fire t.
RoleSet roles_set(const SwarmProtocol& g, const StateId& s, const EventType& t,
                  const Subscription& sigma, const ConcurrencyRelation& conc);

// Precomputed anchored reachability: for every edge, the event types that can
// terminate an anchored chain starting with that edge. Independent of the
// subscription, so one index answers roles_set for any sigma.
class AnchorIndex {
 public:
  AnchorIndex(const SwarmProtocol& g, const ConcurrencyRelation& conc);

  const std::vector<EventType>& types() const { return types_; }
  // Sorted type indices reachable as chain ends from edge e.
  const std::vector<int>& anchors(int e) const { return anchors_[e]; }
  RoleSet roles(int e, const Subscription& sigma) const;
  // True iff every role in roles(e, sigma) subscribes to the type of e.
  bool covered(int e, const Subscription& sigma) const;

 private:
  const SwarmProtocol* g_;
  std::vector<EventType> types_;
  std::vector<std::vector<int>> anchors_;
};

// Canonical form used for isomorphism: BFS numbering, edges by (type, role).
std::vector<std::tuple<int, EventType, Role, int>> canonical_form(const SwarmProtocol& g);
bool isomorphic(const SwarmProtocol& a, const SwarmProtocol& b);

}  // namespace swarmkit
