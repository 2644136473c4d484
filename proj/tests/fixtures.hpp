#pragma once

#include "swarmkit/protocol.hpp"

namespace swarmkit::fixtures {

inline SwarmProtocol warehouse() {
  return SwarmProtocol::from_transitions("0", {{"0", "T", "partReq", "1"},
                                               {"1", "FL", "pos", "2"},
                                               {"2", "T", "partOK", "0"},
                                               {"0", "D", "closingTime", "3"}});
}

inline SwarmProtocol factory() {
  return SwarmProtocol::from_transitions(
      "0", {{"0", "T", "partReq", "1"}, {"1", "T", "partOK", "2"}, {"2", "A", "car", "3"}});
}

// Factory with the transport steps swapped.
inline SwarmProtocol factory_swapped() {
  return SwarmProtocol::from_transitions(
      "0", {{"0", "T", "partOK", "1"}, {"1", "T", "partReq", "2"}, {"2", "A", "car", "3"}});
}

inline Subscription sub(std::map<Role, TypeSet> m) { return Subscription(m); }

// Subscription under which the warehouse is realised by branch tracking.
inline Subscription warehouse_sigma() {
  return sub({{"T", {"partReq", "pos", "partOK", "closingTime"}},
              {"FL", {"partReq", "pos", "closingTime"}},
              {"D", {"partReq", "partOK", "closingTime"}}});
}

// Subscription for the composed warehouse and factory used for projection.
inline Subscription composed_sigma() {
  return sub({{"T", {"partReq", "pos", "partOK", "closingTime"}},
              {"D", {"partReq", "partOK", "closingTime"}},
              {"FL", {"partReq", "pos", "closingTime"}},
              {"A", {"partReq", "partOK", "closingTime", "car"}}});
}

}  // namespace swarmkit::fixtures
