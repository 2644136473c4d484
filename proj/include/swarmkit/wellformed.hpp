#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "swarmkit/protocol.hpp"

namespace swarmkit {

struct WfFailure {
  // One of confusion-freeness-1|2|3, causal-consistency-1|2,
  // determinacy-branching|joining|looping.
  std::string check;
  nlohmann::json witness;
  std::string message;
};

struct WfReport {
  std::vector<WfFailure> failures;
  bool passed() const { return failures.empty(); }
  void merge(const WfReport& other);
  bool has(const std::string& check) const;
};

// Updating event types with their provenance tags (branching, joining, looping).
class UpdatingTypeSet {
 public:
  void add(const EventType& t, const std::string& provenance);
  void merge(const UpdatingTypeSet& other);
  bool contains(const EventType& t) const { return provenance_.count(t) > 0; }
  TypeSet types() const;
  const std::map<EventType, std::set<std::string>>& provenance() const { return provenance_; }
  std::size_t size() const { return provenance_.size(); }

 private:
  std::map<EventType, std::set<std::string>> provenance_;
};

WfReport check_confusion_free(const SwarmProtocol& g, const std::vector<SwarmProtocol>* components = nullptr);
WfReport check_causal_consistency(const SwarmProtocol& g, const Subscription& sigma,
                                  const ConcurrencyRelation& conc);

struct DeterminacyResult {
  WfReport report;
  UpdatingTypeSet updating;
};

DeterminacyResult check_determinacy(const SwarmProtocol& g, const Subscription& sigma,
                                    const ConcurrencyRelation& conc);

// Inference-rule formulation of determinacy plus causal consistency. Derivations
// unfold simple paths from the initial state; returns nullopt when more than
// `budget` derivation nodes would be needed.
std::optional<bool> rule_based_dcc(const SwarmProtocol& g, const Subscription& sigma,
                                   const ConcurrencyRelation& conc, std::size_t budget = 2'000'000);

struct WfResult {
  WfReport report;
  UpdatingTypeSet updating;
  ConcurrencyRelation conc;
  // Verdict of the rule system when it ran (only when its concurrency
  // relation coincides with the exact one and the budget sufficed).
  std::optional<bool> rules_verdict;
  bool passed() const { return report.passed(); }
};

// Thrown when the direct and rule-based checkers disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

WfResult check_well_formed(const SwarmProtocol& g, const Subscription& sigma,
                           const std::vector<SwarmProtocol>* components = nullptr);

// Over-approximated concurrency from a decomposition: pairs of types that each
// occur in one protocol but not the other and share no protocol.
ConcurrencyRelation component_concurrency(const std::vector<SwarmProtocol>& gs);

struct ExactResult {
  Subscription sigma;
  UpdatingTypeSet updating;
  SwarmProtocol composition;
  ConcurrencyRelation conc;
};

// Expansion cap: SWARMKIT_EXPANSION_CAP when set, otherwise 10^6.
std::size_t expansion_cap();

// Smallest-found subscription for compose(gs) by closure over the expanded
// composition. Throws CapExceeded when the expansion exceeds `cap`.
ExactResult exact_subscription(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas,
                               std::size_t cap = expansion_cap());

}  // namespace swarmkit
