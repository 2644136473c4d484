#include "swarmkit/generator.hpp"

#include <utility>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>
#include <utility>

#include "swarmkit/subscription.hpp"
#include "swarmkit/wellformed.hpp"

namespace swarmkit {

void GenParams::validate() const {
  if (n_protocols < 1 || max_roles_per_protocol < 1 || max_types_per_role < 1) {
    throw Error("generator: counts must be at least 1");
  }
  if (branch_prob < 0 || branch_prob > 1 || loop_prob < 0 || loop_prob > 1 || branch_prob + loop_prob > 1) {
    throw Error("generator: probabilities must lie in [0, 1] and sum to at most 1");
  }
  if (max_interface_types < 1) throw Error("generator: max_interface_types must be at least 1");
}

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

class ProtocolBuilder {
 public:
  ProtocolBuilder(std::mt19937_64& rng, std::size_t index, std::vector<Role> roles, std::size_t cap)
      : rng_(rng), index_(index), roles_(std::move(roles)), left_(roles_.size(), cap) {}

  std::string cur = "0";

  std::string fresh_state() { return std::to_string(++states_); }

  // Emits a fresh local type from cur to target; false when no role has capacity.
  bool local(const std::string& from, const std::string& to) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < roles_.size(); ++k) {
      if (left_[k] > 0) open.push_back(k);
    }
    if (open.empty()) return false;
    std::size_t k = open[uniform(rng_, 0, open.size() - 1)];
    --left_[k];
    ts_.push_back(Transition{from, roles_[k], "g" + std::to_string(index_) + "_e" + std::to_string(++types_), to});
    return true;
  }

  std::size_t capacity() const {
    std::size_t n = 0;
    for (auto l : left_) n += l;
    return n;
  }

  void path(const std::string& from, const std::string& to, std::size_t len) {
    std::string at = from;
    for (std::size_t i = 0; i + 1 < len; ++i) {
      std::string next = fresh_state();
      local(at, next);
      at = next;
    }
    local(at, to);
  }

  void straight() {
    if (capacity() < 1) return;
    std::string next = fresh_state();
    local(cur, next);
    cur = next;
  }

  void branch() {
    std::size_t a = uniform(rng_, 1, 2);
    std::size_t b = uniform(rng_, 1, 2);
    bool merge = uniform(rng_, 0, 1) == 0;
    if (merge && a == 1 && b == 1) b = 2;
    if (capacity() < a + b) return;
    std::string join = fresh_state();
    path(cur, join, a);
    path(cur, merge ? join : fresh_state(), b);
    cur = join;
  }

  void loop() {
    std::size_t len = uniform(rng_, 1, 2);
    if (capacity() < len) return;
    path(cur, cur, len);
  }

  void spine(const Role& r, const EventType& t) {
    std::string next = fresh_state();
    ts_.push_back(Transition{cur, r, t, next});
    cur = next;
  }

  std::vector<Transition> take() { return std::move(ts_); }

 private:
  std::mt19937_64& rng_;
  std::size_t index_;
  std::vector<Role> roles_;
  std::vector<std::size_t> left_;
  std::vector<Transition> ts_;
  std::size_t states_ = 0;
  std::size_t types_ = 0;
};

std::vector<SwarmProtocol> generate_once(const GenParams& p, std::mt19937_64& rng) {
  const std::size_t n = p.n_protocols;
  std::vector<std::vector<EventType>> iface(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = uniform(rng, 1, std::min(p.max_interface_types, p.max_types_per_role));
    for (std::size_t j = 0; j < k; ++j) iface[i].push_back("if" + std::to_string(i) + "_" + std::to_string(j));
  }
  auto ir = [](std::size_t i) { return "IR" + std::to_string(i); };

  std::vector<SwarmProtocol> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t shared = (i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0);
    std::size_t budget = p.max_roles_per_protocol > shared ? p.max_roles_per_protocol - shared : 1;
    std::size_t local_roles = uniform(rng, 1, budget);
    std::vector<Role> roles;
    for (std::size_t j = 0; j < local_roles; ++j) roles.push_back("G" + std::to_string(i) + "R" + std::to_string(j));
    ProtocolBuilder b(rng, i, roles, p.max_types_per_role);

    // Interleave the interfacing sequences shared with both neighbours.
    std::vector<std::pair<Role, EventType>> spine;
    const std::vector<EventType> none;
    const auto& left = i > 0 ? iface[i - 1] : none;
    const auto& right = i + 1 < n ? iface[i] : none;
    std::size_t x = 0, y = 0;
    while (x < left.size() || y < right.size()) {
      bool take_left = y == right.size() || (x < left.size() && uniform(rng, 0, 1) == 0);
      if (take_left) {
        spine.emplace_back(ir(i - 1), left[x++]);
      } else {
        spine.emplace_back(ir(i), right[y++]);
      }
    }

    std::uniform_real_distribution<double> roll(0.0, 1.0);
    auto segment = [&] {
      std::size_t patterns = uniform(rng, 0, p.max_segment_patterns);
      for (std::size_t k = 0; k < patterns; ++k) {
        double r = roll(rng);
        if (r < p.loop_prob) {
          b.loop();
        } else if (r < p.loop_prob + p.branch_prob) {
          b.branch();
        } else {
          b.straight();
        }
      }
    };
    for (const auto& [r, t] : spine) {
      segment();
      b.spine(r, t);
    }
    segment();
    auto ts = b.take();
    out.push_back(ts.empty() ? SwarmProtocol::empty() : SwarmProtocol::from_transitions("0", ts));
  }
  return out;
}

}  // namespace

std::vector<SwarmProtocol> generate_protocols(const GenParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto gs = generate_once(p, rng);
    if (check_composable_fast(gs).composable) return gs;
  }
  throw Error("generator: could not produce a composable instance");
}

SwarmProtocol random_protocol(std::mt19937_64& rng, std::size_t max_states, std::size_t max_roles,
                              const std::string& prefix) {
  std::size_t n = uniform(rng, 1, std::max<std::size_t>(max_states, 1));
  std::size_t k = uniform(rng, 1, std::max<std::size_t>(max_roles, 1));
  std::vector<Transition> ts;
  std::size_t types = 0;
  auto edge = [&](std::size_t a, std::size_t b) {
    ts.push_back(Transition{std::to_string(a), prefix + "R" + std::to_string(uniform(rng, 0, k - 1)),
                            prefix + "t" + std::to_string(types++), std::to_string(b)});
  };
  for (std::size_t s = 1; s < n; ++s) edge(uniform(rng, 0, s - 1), s);
  std::size_t extra = uniform(rng, 0, n);
  // Two self-loops at one state would commute; at most one per state keeps the protocol sequential.
  std::vector<char> looped(n, 0);
  for (std::size_t j = 0; j < extra; ++j) {
    std::size_t a = uniform(rng, 0, n - 1);
    std::size_t b = uniform(rng, 0, n - 1);
    if (a == b && std::exchange(looped[a], 1)) continue;
    edge(a, b);
  }
  if (ts.empty()) return SwarmProtocol::empty();
  return SwarmProtocol::from_transitions("0", ts);
}

Subscription random_subscription(std::mt19937_64& rng, const Subscription& full, double keep) {
  std::bernoulli_distribution coin(keep);
  Subscription out;
  for (const auto& [r, ts] : full.entries()) {
    for (const auto& t : ts) {
      if (coin(rng)) out.add(r, t);
    }
  }
  return out;
}

Subscription total_subscription(const std::vector<SwarmProtocol>& gs) {
  TypeSet types;
  RoleSet roles;
  for (const auto& g : gs) {
    types.insert(g.event_types().begin(), g.event_types().end());
    roles.insert(g.roles().begin(), g.roles().end());
  }
  Subscription s;
  for (const auto& r : roles) s.add_all(r, types);
  return s;
}

double e_frac(const Subscription& sigma, const std::vector<SwarmProtocol>& gs) {
  TypeSet types;
  RoleSet roles;
  for (const auto& g : gs) {
    types.insert(g.event_types().begin(), g.event_types().end());
    roles.insert(g.roles().begin(), g.roles().end());
  }
  if (types.empty()) throw Error("e_frac: the protocols have no event types");
  if (roles.empty()) return 0.0;
  double sum = 0;
  for (const auto& r : roles) {
    const auto& ts = sigma.of(r);
    sum += static_cast<double>(std::count_if(ts.begin(), ts.end(), [&](const EventType& t) { return types.count(t) > 0; })) /
           static_cast<double>(types.size());
  }
  return sum / static_cast<double>(roles.size());
}

namespace {

template <typename F>
double time_us(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

}  // namespace

BenchRecord bench_compare(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas,
                          std::size_t repetitions, std::size_t cap) {
  repetitions = std::max<std::size_t>(repetitions, 1);
  BenchRecord rec;
  rec.n_protocols = gs.size();
  for (const auto& g : gs) rec.total_size += g.edge_count();

  std::vector<double> times;
  Subscription alg1;
  for (std::size_t k = 0; k < repetitions; ++k) {
    times.push_back(time_us([&] { alg1 = generate_subscription(gs, sigmas).sigma; }));
  }
  rec.alg1_us = median(times);
  rec.alg1_efrac = e_frac(alg1, gs);
  rec.alg1_size = alg1.total();

  times.clear();
  try {
    std::optional<ExactResult> exact;
    for (std::size_t k = 0; k < repetitions; ++k) {
      times.push_back(time_us([&] { exact = exact_subscription(gs, sigmas, cap); }));
    }
    rec.exact_us = median(times);
    rec.exact_efrac = e_frac(exact->sigma, gs);
    rec.exact_size = exact->sigma.total();
    rec.transitions = exact->composition.edge_count();
  } catch (const CapExceeded& e) {
    rec.exact_skipped = "composition exceeds " + std::to_string(e.cap()) + " states";
  }
  return rec;
}

std::vector<BenchRecord> run_suite(const SuiteParams& p) {
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : p.sizes) {
    for (std::size_t j = 0; j < p.instances_per_size; ++j) {
      jobs.push_back(Job{n, p.seed * 1'000'003ULL + n * 1'000ULL + j});
    }
  }
  std::vector<BenchRecord> out(jobs.size());
  auto run = [&](std::size_t k) {
    GenParams g = p.base;
    g.n_protocols = jobs[k].n;
    g.seed = jobs[k].seed;
    auto gs = generate_protocols(g);
    out[k] = bench_compare(gs, {}, p.repetitions, p.cap);
    out[k].instance = k;
  };
  if (!p.parallel) {
    for (std::size_t k = 0; k < jobs.size(); ++k) run(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < jobs.size(); k = next++) run(k);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::string csv_header() { return "instance,transitions,alg1_us,exact_us,alg1_efrac,exact_efrac"; }

std::string to_csv(const BenchRecord& r) {
  char buf[256];
  std::string tr = r.transitions ? std::to_string(*r.transitions) : "";
  std::string ex = r.exact_us ? std::to_string(*r.exact_us) : "";
  std::string ef = r.exact_efrac ? std::to_string(*r.exact_efrac) : "";
  std::snprintf(buf, sizeof buf, "%zu,%s,%.3f,%s,%.6f,%s", r.instance, tr.c_str(), r.alg1_us, ex.c_str(),
                r.alg1_efrac, ef.c_str());
  return buf;
}

}  // namespace swarmkit
