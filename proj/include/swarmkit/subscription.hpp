#pragma once

#include <memory>
#include <vector>

#include "swarmkit/compose.hpp"
#include "swarmkit/protocol.hpp"
#include "swarmkit/wellformed.hpp"

namespace swarmkit {

// Concurrency over-approximation of a composition, answered from the
// components without materialising the quadratic pair set: {a, b} is
// concurrent iff a occurs in some Gi and b in some Gj (i != j) such that the
// emitter of a does not occur in Gj and the emitter of b does not occur in Gi,
// and no component contains both a and b.
class ComponentConcurrency {
 public:
  ComponentConcurrency() = default;
  explicit ComponentConcurrency(const std::vector<SwarmProtocol>& gs);

  bool contains(const EventType& a, const EventType& b) const;
  ConcurrencyRelation materialize() const;

 private:
  struct TypeInfo {
    std::vector<int> components;
    Role emitter;
  };
  std::map<EventType, TypeInfo> types_;
  std::vector<RoleSet> roles_;
};

struct CompositionalResult {
  Subscription sigma;
  // Subscription after the first causal-consistency sweep.
  Subscription causal_sigma;
  UpdatingTypeSet updating;
  ComponentConcurrency conc_oracle;
  RoleSet ifr;
  // Component sweeps until the in-loop rules were stable, summed over loop covers.
  std::size_t iterations = 0;
  // Loop covers added by the looping pass.
  std::size_t loop_picks = 0;

  ConcurrencyRelation conc() const { return conc_oracle.materialize(); }
};

// Compositional subscription generation; never expands the composition.
// Throws Error when the input is not composable.
CompositionalResult generate_subscription(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas);

// Roles subscribing to some event type reachable from state s of g.
RoleSet subscribers(const SwarmProtocol& g, const StateId& s, const Subscription& sigma);

// Composability in time linear in the total protocol size: every component is
// sequential and confusion-free and each event type has one emitter overall.
ComposabilityReport check_composable_fast(const std::vector<SwarmProtocol>& gs);

}  // namespace swarmkit
