#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "swarmkit/protocol.hpp"

namespace swarmkit {

struct GenParams {
  std::size_t n_protocols = 2;
  std::size_t max_roles_per_protocol = 9;
  std::size_t max_types_per_role = 9;
  std::uint64_t seed = 0;
  double branch_prob = 0.3;
  double loop_prob = 0.2;
  // Upper bound on the interfacing event types each shared role emits.
  std::size_t max_interface_types = 3;
  // Upper bound on random patterns between consecutive interfacing types.
  std::size_t max_segment_patterns = 2;

  void validate() const;
};

// Chain of sequential, confusion-free protocols: Gi and Gi+1 share one
// interfacing role whose types appear in the same order in both; between
// interfacing types each protocol has random straight, branching and local
// looping fragments. Every transition carries a fresh event type.
std::vector<SwarmProtocol> generate_protocols(const GenParams& p);

// Random sequential protocol (at most one self-loop per state) with at most max_states states and max_roles
// roles, fresh event type per transition, possibly cyclic.
SwarmProtocol random_protocol(std::mt19937_64& rng, std::size_t max_states, std::size_t max_roles,
                              const std::string& prefix = "");

// Random sub-relation of `full`: each entry kept with probability keep.
Subscription random_subscription(std::mt19937_64& rng, const Subscription& full, double keep);
// Every role of the protocols subscribed to every event type.
Subscription total_subscription(const std::vector<SwarmProtocol>& gs);

// Mean over the roles of gs of |sigma(R)| / |event types of gs|.
double e_frac(const Subscription& sigma, const std::vector<SwarmProtocol>& gs);

struct BenchRecord {
  std::size_t instance = 0;
  std::size_t n_protocols = 0;
  std::size_t total_size = 0;  // sum of component transitions
  std::optional<std::size_t> transitions;  // of the composition
  double alg1_us = 0;
  double alg1_efrac = 0;
  std::size_t alg1_size = 0;
  std::optional<double> exact_us;
  std::optional<double> exact_efrac;
  std::optional<std::size_t> exact_size;
  std::string exact_skipped;  // reason when the exact fields are absent
};

// Times both generators (median of `repetitions` runs). The exact one is
// skipped when the composition exceeds `cap` states.
BenchRecord bench_compare(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas,
                          std::size_t repetitions, std::size_t cap);

struct SuiteParams {
  std::vector<std::size_t> sizes{2, 3, 4, 5, 6, 7, 8};
  std::size_t instances_per_size = 5;
  std::uint64_t seed = 42;
  std::size_t repetitions = 3;
  std::size_t cap = 20'000;
  bool parallel = false;
  GenParams base;
};

std::vector<BenchRecord> run_suite(const SuiteParams& p);

std::string csv_header();
std::string to_csv(const BenchRecord& r);

}  // namespace swarmkit
