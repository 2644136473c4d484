#include "swarmkit/machine.hpp"

#include <algorithm>
#include <deque>

#include "swarmkit/compose.hpp"

namespace swarmkit {

int Machine::Builder::add_state(const StateId& name, TypeSet emit) {
  names.push_back(name);
  accepts.emplace_back();
  emitters.push_back(std::move(emit));
  return static_cast<int>(names.size()) - 1;
}

Machine Machine::build(const Builder& b) {
  if (b.names.empty()) throw ValidationError("machine has no states");
  if (b.initial < 0 || static_cast<std::size_t>(b.initial) >= b.names.size()) {
    throw ValidationError("machine initial state out of range");
  }
  std::vector<int> order;
  std::vector<int> index(b.names.size(), -1);
  index[b.initial] = 0;
  order.push_back(b.initial);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& [t, tgt] : b.accepts[order[i]]) {
      if (index[tgt] < 0) {
        index[tgt] = static_cast<int>(order.size());
        order.push_back(tgt);
      }
    }
  }
  Machine m;
  m.role_ = b.role;
  for (int old : order) {
    m.names_.push_back(b.names[old]);
    std::map<EventType, int> acc;
    for (const auto& [t, tgt] : b.accepts[old]) acc.emplace(t, index[tgt]);
    m.accepts_.push_back(std::move(acc));
    m.emitters_.push_back(b.emitters[old]);
  }
  return m;
}

std::size_t Machine::transition_count() const {
  std::size_t n = 0;
  for (const auto& a : accepts_) n += a.size();
  return n;
}

std::optional<int> Machine::index_of(const StateId& s) const {
  auto it = std::find(names_.begin(), names_.end(), s);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

std::optional<int> Machine::target(int s, const EventType& t) const {
  auto it = accepts_[s].find(t);
  if (it == accepts_[s].end()) return std::nullopt;
  return it->second;
}

TypeSet Machine::alphabet() const {
  TypeSet out;
  for (const auto& a : accepts_) {
    for (const auto& [t, tgt] : a) out.insert(t);
  }
  return out;
}

namespace {

// Coarsest stable partition of a builder's states; class ids are dense.
std::vector<int> bisimulation_classes(const std::vector<std::map<EventType, int>>& accepts,
                                      const std::vector<TypeSet>& emitters) {
  const std::size_t n = accepts.size();
  std::vector<int> cls(n);
  {
    std::map<TypeSet, int> ids;
    for (std::size_t s = 0; s < n; ++s) cls[s] = ids.emplace(emitters[s], static_cast<int>(ids.size())).first->second;
  }
  std::size_t count = 0;
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<EventType, int>>>, int> ids;
    std::vector<int> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::pair<EventType, int>> sig;
      for (const auto& [t, tgt] : accepts[s]) sig.emplace_back(t, cls[tgt]);
      next[s] = ids.emplace(std::make_pair(cls[s], std::move(sig)), static_cast<int>(ids.size())).first->second;
    }
    cls = std::move(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  return cls;
}

StateId subset_name(const SwarmProtocol& g, const std::vector<int>& members) {
  if (members.size() == 1) return g.name(members[0]);
  std::vector<StateId> names;
  for (int s : members) names.push_back(g.name(s));
  std::sort(names.begin(), names.end());
  StateId out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out + "}";
}

}  // namespace

Machine project(const SwarmProtocol& g, const Role& r, const Subscription& sigma) {
  const TypeSet& sub = sigma.of(r);
  auto closure = [&](std::vector<int> seed) {
    std::vector<bool> in(g.state_count());
    for (int s : seed) in[s] = true;
    for (std::size_t i = 0; i < seed.size(); ++i) {
      for (int e : g.out(seed[i])) {
        const auto& ed = g.edge(e);
        if (!sub.count(ed.type) && !in[ed.target]) {
          in[ed.target] = true;
          seed.push_back(ed.target);
        }
      }
    }
    std::sort(seed.begin(), seed.end());
    return seed;
  };

  Machine::Builder b;
  b.role = r;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> subsets;
  std::vector<std::vector<int>> ambiguous;  // groups of single-target closures that must agree
  auto intern = [&](const std::vector<int>& set) {
    auto [it, fresh] = index.emplace(set, static_cast<int>(subsets.size()));
    if (fresh) {
      subsets.push_back(set);
      TypeSet emit;
      for (int s : set) {
        for (int e : g.out(s)) {
          if (g.edge(e).role == r) emit.insert(g.edge(e).type);
        }
      }
      b.add_state(subset_name(g, set), std::move(emit));
    }
    return it->second;
  };
  intern(closure({0}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::map<EventType, std::vector<int>> targets;
    for (int s : subsets[i]) {
      for (int e : g.out(s)) {
        const auto& ed = g.edge(e);
        if (sub.count(ed.type)) targets[ed.type].push_back(ed.target);
      }
    }
    for (auto& [t, tg] : targets) {
      std::sort(tg.begin(), tg.end());
      tg.erase(std::unique(tg.begin(), tg.end()), tg.end());
      int next = intern(closure(tg));
      b.accepts[i].emplace(t, next);
      if (tg.size() > 1) {
        std::vector<int> group;
        for (int x : tg) group.push_back(intern(closure({x})));
        ambiguous.push_back(std::move(group));
      }
    }
  }
  if (!ambiguous.empty()) {
    auto cls = bisimulation_classes(b.accepts, b.emitters);
    for (const auto& group : ambiguous) {
      for (int s : group) {
        if (cls[s] != cls[group.front()]) {
          throw ProjectionError("projection onto " + r + " is not uniquely defined: states " + b.names[group.front()] +
                                " and " + b.names[s] +
                                " are reached by the same event type but behave differently (protocol is not "
                                "well-formed for this subscription)");
        }
      }
    }
  }
  return Machine::build(b);
}

Machine minimize(const Machine& m) {
  std::vector<std::map<EventType, int>> acc;
  std::vector<TypeSet> emit;
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    acc.push_back(m.accepts(static_cast<int>(s)));
    emit.push_back(m.emitters(static_cast<int>(s)));
  }
  auto cls = bisimulation_classes(acc, emit);
  int count = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
  Machine::Builder b;
  b.role = m.role();
  b.names.assign(count, "");
  b.accepts.assign(count, {});
  b.emitters.assign(count, {});
  std::vector<bool> named(count, false);
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    int c = cls[s];
    if (named[c]) continue;
    named[c] = true;
    b.names[c] = m.name(static_cast<int>(s));
    b.emitters[c] = m.emitters(static_cast<int>(s));
    for (const auto& [t, tgt] : m.accepts(static_cast<int>(s))) b.accepts[c].emplace(t, cls[tgt]);
  }
  b.initial = cls[0];
  Machine out = Machine::build(b);
  out.set_realisation(m.updating(), m.conc());
  return out;
}

bool isomorphic(const Machine& a, const Machine& b) {
  if (a.state_count() != b.state_count()) return false;
  for (std::size_t s = 0; s < a.state_count(); ++s) {
    if (a.accepts(static_cast<int>(s)) != b.accepts(static_cast<int>(s))) return false;
    if (a.emitters(static_cast<int>(s)) != b.emitters(static_cast<int>(s))) return false;
  }
  return true;
}

bool equivalent(const Machine& a, const Machine& b) { return isomorphic(minimize(a), minimize(b)); }

Machine compose_machines(const Machine& m, const Machine& other) {
  const TypeSet am = m.alphabet();
  const TypeSet ao = other.alphabet();
  Machine::Builder b;
  b.role = m.role();
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> pairs;
  auto intern = [&](int x, int y) {
    auto [it, fresh] = index.emplace(std::make_pair(x, y), static_cast<int>(pairs.size()));
    if (fresh) {
      pairs.emplace_back(x, y);
      b.add_state(tuple_name({m.name(x), other.name(y)}));
    }
    return it->second;
  };
  intern(0, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [x, y] = pairs[i];
    std::map<EventType, int> acc;
    for (const auto& [t, tx] : m.accepts(x)) {
      if (ao.count(t)) {
        if (auto ty = other.target(y, t)) acc.emplace(t, intern(tx, *ty));
      } else {
        acc.emplace(t, intern(tx, y));
      }
    }
    for (const auto& [t, ty] : other.accepts(y)) {
      if (!am.count(t)) acc.emplace(t, intern(x, ty));
    }
    TypeSet emit;
    for (const TypeSet* k : {&m.emitters(x), &other.emitters(y)}) {
      for (const auto& t : *k) {
        if (acc.count(t)) emit.insert(t);
      }
    }
    b.accepts[i] = std::move(acc);
    b.emitters[i] = std::move(emit);
  }
  Machine out = Machine::build(b);
  TypeSet updating = m.updating();
  updating.insert(other.updating().begin(), other.updating().end());
  ConcurrencyRelation conc = m.conc();
  conc.merge(other.conc());
  out.set_realisation(std::move(updating), std::move(conc));
  return out;
}

AdaptResult adapt_machine_steps(const Machine& m, const std::vector<SwarmProtocol>& gs, const Role& r,
                                std::size_t k, const Subscription& sigma, const TypeSet& updating,
                                const ConcurrencyRelation& conc) {
  if (k >= gs.size()) throw Error("adapt_machine: home protocol index out of range");
  AdaptResult res;
  std::optional<Machine> acc;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    Machine part = project(gs[i], r, sigma);
    if (i == k) {
      part = compose_machines(m, part);
      res.with_home = part;
    }
    acc = acc ? compose_machines(*acc, part) : part;
  }
  acc->set_role(r);
  acc->set_realisation(updating, conc);
  res.machine = minimize(*acc);
  res.with_home.set_role(r);
  res.with_home.set_realisation(updating, conc);
  return res;
}

Machine adapt_machine(const Machine& m, const std::vector<SwarmProtocol>& gs, const Role& r, std::size_t k,
                      const Subscription& sigma, const TypeSet& updating, const ConcurrencyRelation& conc) {
  return adapt_machine_steps(m, gs, r, k, sigma, updating, conc).machine;
}

SwarmSpec realise(const SwarmProtocol& g, const Subscription& sigma, const std::vector<Role>& members) {
  SwarmSpec spec;
  spec.sigma = sigma;
  spec.conc = concurrent_pairs(g);
  spec.updating = check_determinacy(g, sigma, spec.conc).updating.types();
  spec.protocol = g;
  for (const auto& r : members) {
    Machine m = project(g, r, sigma);
    m.set_realisation(spec.updating, spec.conc);
    spec.members.push_back(SwarmMember{std::move(m), r, 0});
  }
  return spec;
}

SwarmSpec compose_swarm(const std::vector<std::vector<std::pair<Machine, Role>>>& swarms,
                        const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas) {
  if (swarms.size() != gs.size()) throw Error("compose_swarm: one swarm per protocol is required");
  auto alg = generate_subscription(gs, sigmas);
  SwarmSpec spec;
  spec.sigma = alg.sigma;
  spec.updating = alg.updating.types();
  spec.conc = alg.conc();
  for (std::size_t i = 0; i < swarms.size(); ++i) {
    for (const auto& [m, r] : swarms[i]) {
      spec.members.push_back(
          SwarmMember{adapt_machine(m, gs, r, i, spec.sigma, spec.updating, spec.conc), r, i});
    }
  }
  return spec;
}

}  // namespace swarmkit
