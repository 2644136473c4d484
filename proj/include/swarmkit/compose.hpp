#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "swarmkit/protocol.hpp"

namespace swarmkit {

struct InterfaceViolation {
  EventType type;
  Role role;
  Role other_role;
  auto operator<=>(const InterfaceViolation&) const = default;
};

struct InterfaceReport {
  RoleSet interfacing_roles;
  TypeSet interfacing_event_types;
  std::vector<InterfaceViolation> violations;
  bool interfacing() const { return violations.empty(); }
};

class InterfaceError : public Error {
 public:
  InterfaceError(const std::string& what, std::vector<InterfaceViolation> v)
      : Error(what), violations_(std::move(v)) {}
  const std::vector<InterfaceViolation>& violations() const { return violations_; }

 private:
  std::vector<InterfaceViolation> violations_;
};

InterfaceReport interface(const SwarmProtocol& g, const SwarmProtocol& h);

// Joins component state names into a tuple identifier "a|b|c"; components
// containing '|' or '(' are parenthesised so encodings stay unambiguous.
StateId tuple_name(const std::vector<StateId>& parts);

struct ComposeOptions {
  // Overrides the interfacing roles; every component must then fire their types jointly.
  std::optional<RoleSet> roles;
  // Maximum number of reachable product states; 0 means unbounded.
  std::size_t cap = 0;
};

// Flat synchronised product over reachable state tuples.
SwarmProtocol compose(const std::vector<SwarmProtocol>& gs, const ComposeOptions& opts = {});

// Component transitions that no composed transition realises (behaviour
// restrictions introduced by synchronisation).
std::size_t restricted_transition_count(const std::vector<SwarmProtocol>& gs, const ComposeOptions& opts = {});

// Upper bound on the product size, saturating.
std::size_t estimate_product_size(const std::vector<SwarmProtocol>& gs);

struct ComposabilityReport {
  bool composable = true;
  std::vector<std::string> failures;
};

ComposabilityReport check_composable(const std::vector<SwarmProtocol>& gs);

}  // namespace swarmkit
