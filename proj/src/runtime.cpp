#include "swarmkit/runtime.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <unordered_set>

namespace swarmkit {

namespace {

template <typename Next>
TypeSet chain_types(int start, const EventType& t, const TypeSet& updating, const ConcurrencyRelation& conc,
                    Next&& next) {
  TypeSet out{t};
  std::set<int> seen{start};
  std::vector<int> work{start};
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    next(q, [&](const EventType& u, int target) {
      if (conc.contains(u, t)) return;
      out.insert(u);
      if (updating.count(u)) return;
      if (seen.insert(target).second) work.push_back(target);
    });
  }
  return out;
}

bool pointer_matches(const Event& e, const LastUp& last_up) {
  auto it = last_up.find(e.type);
  std::optional<EventId> expected;
  if (it != last_up.end()) expected = it->second;
  return e.pue == expected;
}

}  // namespace

TypeSet branch_set(const Machine& m, int s, const EventType& t) {
  auto start = m.target(s, t);
  if (!start) return {t};
  return chain_types(*start, t, m.updating(), m.conc(), [&](int q, auto&& visit) {
    for (const auto& [u, tgt] : m.accepts(q)) visit(u, tgt);
  });
}

TypeSet protocol_branch_set(const SwarmProtocol& g, int s, const EventType& t, const TypeSet& updating,
                            const ConcurrencyRelation& conc) {
  auto e = g.edge_for(s, t);
  if (!e) return {t};
  return chain_types(g.edge(*e).target, t, updating, conc, [&](int q, auto&& visit) {
    for (int o : g.out(q)) visit(g.edge(o).type, g.edge(o).target);
  });
}

Processed process_log(const Machine& m, const Log& l, bool legacy) {
  Processed p;
  for (const auto& e : l) {
    auto next = m.target(p.state, e.type);
    if (!next) continue;
    if (!legacy && !pointer_matches(e, p.last_up)) continue;
    if (!legacy && m.updating().count(e.type)) {
      for (const auto& u : branch_set(m, p.state, e.type)) p.last_up[u] = e.id;
    }
    p.state = *next;
    p.accepted.push_back(e.id);
  }
  return p;
}

Event emit(const Machine& m, const Log& l, const EventType& t, EventId id, bool legacy) {
  auto p = process_log(m, l, legacy);
  if (!m.emitters(p.state).count(t)) {
    throw EmissionRefused("machine for " + m.role() + " cannot emit " + t + " in state " + m.name(p.state));
  }
  Event e{id, t, std::nullopt};
  if (!legacy) {
    auto it = p.last_up.find(t);
    if (it != p.last_up.end()) e.pue = it->second;
  }
  return e;
}

Log effective_log_protocol(const Log& l, const SwarmProtocol& g, const TypeSet& updating,
                           const ConcurrencyRelation& conc, bool legacy) {
  Log out;
  int state = 0;
  LastUp last_up;
  for (const auto& e : l) {
    auto edge = g.edge_for(state, e.type);
    if (!edge) continue;
    if (!legacy && !pointer_matches(e, last_up)) continue;
    if (!legacy && updating.count(e.type)) {
      for (const auto& u : protocol_branch_set(g, state, e.type, updating, conc)) last_up[u] = e.id;
    }
    state = g.edge(*edge).target;
    out.push_back(e);
  }
  return out;
}

Log effective_log_machine(const Log& l, const Machine& m, bool legacy) {
  auto p = process_log(m, l, legacy);
  Log out;
  std::size_t k = 0;
  for (const auto& e : l) {
    if (k < p.accepted.size() && p.accepted[k] == e.id) {
      out.push_back(e);
      ++k;
    }
  }
  return out;
}

Log filter_types(const Log& l, const TypeSet& ts) {
  Log out;
  for (const auto& e : l) {
    if (ts.count(e.type)) out.push_back(e);
  }
  return out;
}

Swarm::Swarm(SwarmSpec spec, bool legacy) : spec_(std::move(spec)), legacy_(legacy), local_(spec_.members.size()) {}

int Swarm::member_state(std::size_t i) const { return process_log(spec_.members[i].machine, local_[i], legacy_).state; }

TypeSet Swarm::enabled(std::size_t i) const { return spec_.members[i].machine.emitters(member_state(i)); }

std::size_t Swarm::first_insert_position(std::size_t i) const {
  if (local_[i].empty()) return 0;
  EventId last = local_[i].back().id;
  for (std::size_t k = 0; k < global_.size(); ++k) {
    if (global_[k].id == last) return k + 1;
  }
  throw Error("local log is not a sublog of the global log");
}

std::vector<EventId> Swarm::missing(std::size_t i) const {
  std::unordered_set<EventId> have;
  for (const auto& e : local_[i]) have.insert(e.id);
  std::vector<EventId> out;
  for (const auto& e : global_) {
    if (!have.count(e.id)) out.push_back(e.id);
  }
  return out;
}

std::optional<Event> Swarm::step(const Choice& c) {
  if (const auto* ls = std::get_if<LocalStep>(&c)) {
    if (ls->member >= size()) throw Error("local step: member out of range");
    std::size_t lo = first_insert_position(ls->member);
    if (ls->position < lo || ls->position > global_.size()) {
      throw Error("local step: invalid insert position " + std::to_string(ls->position) + " (valid " +
                  std::to_string(lo) + ".." + std::to_string(global_.size()) + ")");
    }
    Event e = emit(spec_.members[ls->member].machine, local_[ls->member], ls->type, next_id_, legacy_);
    ++next_id_;
    local_[ls->member].push_back(e);
    global_.insert(global_.begin() + static_cast<std::ptrdiff_t>(ls->position), e);
    check_sublogs();
    return e;
  }
  const auto& ps = std::get<PropStep>(c);
  if (ps.member >= size()) throw Error("prop step: member out of range");
  if (ps.delivered.empty()) throw Error("prop step: nothing to deliver");
  std::unordered_set<EventId> keep;
  for (const auto& e : local_[ps.member]) keep.insert(e.id);
  for (EventId id : ps.delivered) {
    bool known = std::any_of(global_.begin(), global_.end(), [&](const Event& e) { return e.id == id; });
    if (!known) throw Error("prop step: event " + std::to_string(id) + " is not in the global log");
    if (!keep.insert(id).second) throw Error("prop step: event " + std::to_string(id) + " already delivered");
  }
  Log merged;
  for (const auto& e : global_) {
    if (keep.count(e.id)) merged.push_back(e);
  }
  local_[ps.member] = std::move(merged);
  check_sublogs();
  return std::nullopt;
}

void Swarm::check_sublogs() const {
  for (const auto& l : local_) {
    std::size_t k = 0;
    for (const auto& e : global_) {
      if (k < l.size() && l[k].id == e.id) ++k;
    }
    if (k != l.size()) throw Error("internal error: local log is not an order-preserving sublog of the global log");
  }
}

FidelityVerdict check_fidelity(const Log& global, const SwarmSpec& spec, const SwarmProtocol& g, bool legacy) {
  FidelityVerdict v;
  Log eff = effective_log_protocol(global, g, spec.updating, spec.conc, legacy);
  for (std::size_t i = 0; i < spec.members.size(); ++i) {
    const auto& mem = spec.members[i];
    Log expected = filter_types(eff, spec.sigma.of(mem.role));
    Log actual = effective_log_machine(global, mem.machine, legacy);
    auto ids = [](const Log& l) {
      std::vector<EventId> out;
      for (const auto& e : l) out.push_back(e.id);
      return out;
    };
    if (ids(expected) != ids(actual)) v.failures.push_back(MemberDiff{i, mem.role, ids(expected), ids(actual)});
  }
  return v;
}

FidelityVerdict check_fidelity(const Swarm& s, const SwarmProtocol& g) {
  return check_fidelity(s.global(), s.spec(), g, s.legacy());
}

namespace {

void finish(Swarm& swarm, const std::optional<SwarmProtocol>& g, SimResult& res, bool propagate) {
  if (propagate) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      auto miss = swarm.missing(i);
      if (miss.empty()) continue;
      PropStep p{i, miss};
      swarm.step(p);
      res.trace.push_back(TraceStep{res.trace.size() + 1, p, std::nullopt});
    }
  }
  res.global = swarm.global();
  for (std::size_t i = 0; i < swarm.size(); ++i) res.final_states.push_back(swarm.member_state(i));
  if (g) {
    res.final_verdict = check_fidelity(swarm, *g);
    if (!res.final_verdict.passed() && !res.first_failure) {
      res.first_failure = std::make_pair(res.trace.size(), res.final_verdict);
    }
  }
}

}  // namespace

SimResult simulate(const SwarmSpec& spec, const std::optional<SwarmProtocol>& g, const SimOptions& opts) {
  Swarm swarm(spec, opts.legacy);
  SimResult res;
  std::mt19937_64 rng(opts.seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution prefix(0.7);
  for (std::size_t step = 1; step <= opts.steps; ++step) {
    std::vector<std::pair<std::size_t, EventType>> locals;
    std::vector<std::size_t> lacking;
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      for (const auto& t : swarm.enabled(i)) locals.emplace_back(i, t);
      if (!swarm.missing(i).empty()) lacking.push_back(i);
    }
    if (locals.empty() && lacking.empty()) break;
    Choice choice;
    if (!locals.empty() && (lacking.empty() || coin(rng))) {
      const auto& [member, type] = locals[uniform(0, locals.size() - 1)];
      std::size_t pos = uniform(swarm.first_insert_position(member), swarm.global().size());
      choice = LocalStep{member, type, pos};
    } else {
      std::size_t member = lacking[uniform(0, lacking.size() - 1)];
      auto miss = swarm.missing(member);
      std::vector<EventId> delivered;
      if (prefix(rng)) {
        delivered.assign(miss.begin(), miss.begin() + static_cast<std::ptrdiff_t>(uniform(1, miss.size())));
      } else {
        while (delivered.empty()) {
          for (EventId id : miss) {
            if (coin(rng)) delivered.push_back(id);
          }
        }
      }
      choice = PropStep{member, delivered};
    }
    auto ev = swarm.step(choice);
    res.trace.push_back(TraceStep{step, choice, ev});
    if (g && opts.check_every_step && !res.first_failure) {
      auto v = check_fidelity(swarm, *g);
      if (!v.passed()) res.first_failure = std::make_pair(step, v);
    }
  }
  finish(swarm, g, res, opts.final_propagation);
  return res;
}

SimResult replay(const SwarmSpec& spec, const std::optional<SwarmProtocol>& g, const std::vector<Choice>& schedule,
                 bool legacy) {
  Swarm swarm(spec, legacy);
  SimResult res;
  for (const auto& c : schedule) {
    auto ev = swarm.step(c);
    res.trace.push_back(TraceStep{res.trace.size() + 1, c, ev});
    if (g && !res.first_failure) {
      auto v = check_fidelity(swarm, *g);
      if (!v.passed()) res.first_failure = std::make_pair(res.trace.size(), v);
    }
  }
  finish(swarm, g, res, false);
  return res;
}

namespace {

// Identity of a swarm state up to renaming of event ids.
std::string state_key(const Swarm& s) {
  std::map<EventId, std::size_t> pos;
  for (std::size_t k = 0; k < s.global().size(); ++k) pos[s.global()[k].id] = k;
  std::string key;
  for (const auto& e : s.global()) {
    key += e.type;
    key += '@';
    key += e.pue ? std::to_string(pos.at(*e.pue)) : "-";
    key += ';';
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    key += '|';
    for (const auto& e : s.local(i)) key += std::to_string(pos.at(e.id)) + ',';
  }
  return key;
}

}  // namespace

ExhaustiveResult explore_all(const SwarmSpec& spec, const SwarmProtocol& g, std::size_t depth, bool legacy,
                             std::size_t state_cap) {
  ExhaustiveResult res;
  std::unordered_set<std::string> seen;
  std::vector<Choice> path;
  std::function<void(const Swarm&, std::size_t)> dfs = [&](const Swarm& s, std::size_t d) {
    if (!seen.insert(state_key(s)).second) return;
    if (seen.size() > state_cap) {
      res.truncated = true;
      return;
    }
    ++res.states;
    if (!check_fidelity(s, g).passed()) {
      if (++res.failures == 1) res.counterexample = path;
    }
    if (d == depth) return;
    std::vector<Choice> choices;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (const auto& t : s.enabled(i)) {
        for (std::size_t p = s.first_insert_position(i); p <= s.global().size(); ++p) {
          choices.push_back(LocalStep{i, t, p});
        }
      }
      auto miss = s.missing(i);
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << miss.size()); ++mask) {
        PropStep p{i, {}};
        for (std::size_t k = 0; k < miss.size(); ++k) {
          if (mask >> k & 1U) p.delivered.push_back(miss[k]);
        }
        choices.push_back(std::move(p));
      }
    }
    for (const auto& c : choices) {
      Swarm next = s;
      next.step(c);
      path.push_back(c);
      dfs(next, d + 1);
      path.pop_back();
      if (res.truncated) return;
    }
  };
  dfs(Swarm(spec, legacy), 0);
  return res;
}

}  // namespace swarmkit
