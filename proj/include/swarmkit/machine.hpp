#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmkit/protocol.hpp"
#include "swarmkit/subscription.hpp"
#include "swarmkit/wellformed.hpp"

namespace swarmkit {

// Deterministic acceptor with per-state emitter sets. State 0 is initial and
// every state is reachable from it; states are numbered breadth-first with
// acceptance edges visited in event-type order.
class Machine {
 public:
  struct Builder {
    Role role;
    std::vector<StateId> names;
    std::vector<std::map<EventType, int>> accepts;
    std::vector<TypeSet> emitters;
    int initial = 0;
    int add_state(const StateId& name, TypeSet emit = {});
  };

  Machine() = default;
  // Keeps the part reachable from b.initial and renumbers it canonically.
  static Machine build(const Builder& b);

  const Role& role() const { return role_; }
  std::size_t state_count() const { return names_.size(); }
  std::size_t transition_count() const;
  const StateId& name(int s) const { return names_[s]; }
  std::optional<int> index_of(const StateId& s) const;
  const std::map<EventType, int>& accepts(int s) const { return accepts_[s]; }
  std::optional<int> target(int s, const EventType& t) const;
  const TypeSet& emitters(int s) const { return emitters_[s]; }
  // Event types accepted at some state.
  TypeSet alphabet() const;

  const TypeSet& updating() const { return updating_; }
  const ConcurrencyRelation& conc() const { return conc_; }
  void set_role(const Role& r) { role_ = r; }
  void set_realisation(TypeSet updating, ConcurrencyRelation conc) {
    updating_ = std::move(updating);
    conc_ = std::move(conc);
  }

 private:
  Role role_;
  std::vector<StateId> names_;
  std::vector<std::map<EventType, int>> accepts_;
  std::vector<TypeSet> emitters_;
  TypeSet updating_;
  ConcurrencyRelation conc_;
};

// Thrown when a projection is not uniquely defined (input not well-formed).
class ProjectionError : public Error {
 public:
  using Error::Error;
};

// Subset construction treating unsubscribed transitions as silent. The
// result is not minimized: states are the reachable closures of protocol
// states, named by the member when single and "{a,b,...}" otherwise.
Machine project(const SwarmProtocol& g, const Role& r, const Subscription& sigma);

// Coarsest partition by emitter sets and acceptance behaviour.
Machine minimize(const Machine& m);
// Structural isomorphism of the reachable parts (role and realisation data ignored).
bool isomorphic(const Machine& a, const Machine& b);
// Bisimilarity: isomorphism of the minimized machines.
bool equivalent(const Machine& a, const Machine& b);

Machine compose_machines(const Machine& m, const Machine& other);

struct AdaptResult {
  Machine machine;  // minimized
  Machine with_home;  // m composed with the projection of its home protocol, unminimized
};

AdaptResult adapt_machine_steps(const Machine& m, const std::vector<SwarmProtocol>& gs, const Role& r,
                                std::size_t k, const Subscription& sigma, const TypeSet& updating,
                                const ConcurrencyRelation& conc);
Machine adapt_machine(const Machine& m, const std::vector<SwarmProtocol>& gs, const Role& r, std::size_t k,
                      const Subscription& sigma, const TypeSet& updating, const ConcurrencyRelation& conc);

struct SwarmMember {
  Machine machine;
  Role role;
  std::size_t origin = 0;
};

struct SwarmSpec {
  std::vector<SwarmMember> members;
  Subscription sigma;
  TypeSet updating;
  ConcurrencyRelation conc;
  // Composed protocol when known (used for fidelity checks).
  std::optional<SwarmProtocol> protocol;
};

// Machines of a realisation of g under sigma: one projection per listed role
// with the updating set and exact concurrency of g installed.
SwarmSpec realise(const SwarmProtocol& g, const Subscription& sigma, const std::vector<Role>& members);

// Adapts every member of every input swarm to the composition of gs.
SwarmSpec compose_swarm(const std::vector<std::vector<std::pair<Machine, Role>>>& swarms,
                        const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas);

}  // namespace swarmkit
