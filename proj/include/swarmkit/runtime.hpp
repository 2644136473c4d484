#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "swarmkit/machine.hpp"
#include "swarmkit/protocol.hpp"

namespace swarmkit {

using EventId = std::uint64_t;

// pue is the id of the last updating event the emitter had processed for
// this type; nullopt is the NULL pointer, equal only to itself.
struct Event {
  EventId id = 0;
  EventType type;
  std::optional<EventId> pue;
  bool operator==(const Event&) const = default;
};

using Log = std::vector<Event>;
// Absent entries are NULL.
using LastUp = std::map<EventType, EventId>;

class EmissionRefused : public Error {
 public:
  using Error::Error;
};

// {t} plus the types on acceptance chains from the t-successor of s that avoid
// types concurrent with t; a chain ends at (and includes) its first updating type.
TypeSet branch_set(const Machine& m, int s, const EventType& t);
TypeSet protocol_branch_set(const SwarmProtocol& g, int s, const EventType& t, const TypeSet& updating,
                            const ConcurrencyRelation& conc);

struct Processed {
  int state = 0;
  LastUp last_up;
  std::vector<EventId> accepted;
};

// Left fold of the log; events that are not enabled or carry a stale pointer
// are skipped. Legacy mode ignores pointers entirely.
Processed process_log(const Machine& m, const Log& l, bool legacy = false);
Event emit(const Machine& m, const Log& l, const EventType& t, EventId id, bool legacy = false);

Log effective_log_protocol(const Log& l, const SwarmProtocol& g, const TypeSet& updating,
                           const ConcurrencyRelation& conc, bool legacy = false);
Log effective_log_machine(const Log& l, const Machine& m, bool legacy = false);
Log filter_types(const Log& l, const TypeSet& ts);

struct LocalStep {
  std::size_t member = 0;
  EventType type;
  // Index in the global log before which the event is inserted.
  std::size_t position = 0;
};

struct PropStep {
  std::size_t member = 0;
  std::vector<EventId> delivered;
};

using Choice = std::variant<LocalStep, PropStep>;

// Swarm of machines with local logs over a materialised global order.
// Invariant: every local log is an order-preserving sublog of the global log.
class Swarm {
 public:
  Swarm(SwarmSpec spec, bool legacy);

  const SwarmSpec& spec() const { return spec_; }
  bool legacy() const { return legacy_; }
  std::size_t size() const { return spec_.members.size(); }
  const Log& global() const { return global_; }
  const Log& local(std::size_t i) const { return local_[i]; }
  EventId next_id() const { return next_id_; }
  int member_state(std::size_t i) const;
  TypeSet enabled(std::size_t i) const;
  // Valid insert positions for a local emission of member i: [first, global size].
  std::size_t first_insert_position(std::size_t i) const;
  std::vector<EventId> missing(std::size_t i) const;

  // Applies the choice; returns the emitted event for local steps.
  std::optional<Event> step(const Choice& c);

 private:
  void check_sublogs() const;

  SwarmSpec spec_;
  bool legacy_;
  std::vector<Log> local_;
  Log global_;
  EventId next_id_ = 1;
};

struct MemberDiff {
  std::size_t member = 0;
  Role role;
  std::vector<EventId> expected;
  std::vector<EventId> actual;
};

struct FidelityVerdict {
  std::vector<MemberDiff> failures;
  bool passed() const { return failures.empty(); }
};

// Compares each member's effective log of the global log with the protocol's
// effective log restricted to the member role's subscription.
FidelityVerdict check_fidelity(const Swarm& s, const SwarmProtocol& g);
FidelityVerdict check_fidelity(const Log& global, const SwarmSpec& spec, const SwarmProtocol& g, bool legacy);

struct TraceStep {
  std::size_t step = 0;
  Choice choice;
  std::optional<Event> event;
};

struct SimOptions {
  std::uint64_t seed = 0;
  std::size_t steps = 50;
  bool legacy = false;
  // Deliver every missing event to every member after the run.
  bool final_propagation = true;
  // Check fidelity after every step (requires a protocol).
  bool check_every_step = true;
};

struct SimResult {
  std::vector<TraceStep> trace;
  Log global;
  std::vector<int> final_states;
  // First fidelity failure and the step after which it was observed.
  std::optional<std::pair<std::size_t, FidelityVerdict>> first_failure;
  FidelityVerdict final_verdict;
};

// Seeded random scheduler: local emission with probability 1/2 when some
// member can emit, insert positions uniform over the valid range, and
// propagation of a prefix of the missing events with probability 0.7,
// otherwise of a random nonempty subset.
SimResult simulate(const SwarmSpec& spec, const std::optional<SwarmProtocol>& g, const SimOptions& opts);

// Replays an explicit schedule.
SimResult replay(const SwarmSpec& spec, const std::optional<SwarmProtocol>& g, const std::vector<Choice>& schedule,
                 bool legacy);

struct ExhaustiveResult {
  std::size_t states = 0;
  std::size_t failures = 0;
  bool truncated = false;
  std::optional<std::vector<Choice>> counterexample;
};

// Enumerates every scheduler choice up to `depth` steps, checking fidelity
// in every reached swarm state; distinct states are explored once.
ExhaustiveResult explore_all(const SwarmSpec& spec, const SwarmProtocol& g, std::size_t depth, bool legacy = false,
                             std::size_t state_cap = 500'000);

}  // namespace swarmkit
