#include "swarmkit/wellformed.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <tuple>

#include "swarmkit/compose.hpp"
#include "swarmkit/graph.hpp"

namespace swarmkit {

using nlohmann::json;

void WfReport::merge(const WfReport& other) {
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

bool WfReport::has(const std::string& check) const {
  return std::any_of(failures.begin(), failures.end(), [&](const WfFailure& f) { return f.check == check; });
}

void UpdatingTypeSet::add(const EventType& t, const std::string& provenance) { provenance_[t].insert(provenance); }

void UpdatingTypeSet::merge(const UpdatingTypeSet& other) {
  for (const auto& [t, ps] : other.provenance_) provenance_[t].insert(ps.begin(), ps.end());
}

TypeSet UpdatingTypeSet::types() const {
  TypeSet out;
  for (const auto& [t, ps] : provenance_) out.insert(t);
  return out;
}

WfReport check_confusion_free(const SwarmProtocol& g, const std::vector<SwarmProtocol>* components) {
  WfReport rep;
  for (const auto& t : g.event_types()) {
    auto rs = g.emitters_of(t);
    if (rs.size() > 1) {
      rep.failures.push_back({"confusion-freeness-1", json{{"eventType", t}, {"roles", rs}},
                              "event type '" + t + "' is emitted by more than one role"});
    }
  }
  // Item 2 holds structurally: validation rejects two equal labels at one state.
  std::vector<SwarmProtocol> trivial;
  if (!components) trivial.push_back(g);
  const auto& parts = components ? *components : trivial;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    std::map<EventType, std::vector<StateId>> firing;
    for (const auto& e : parts[c].edges()) firing[e.type].push_back(parts[c].name(e.source));
    for (const auto& [t, states] : firing) {
      if (states.size() > 1) {
        rep.failures.push_back({"confusion-freeness-3",
                                json{{"component", c}, {"eventType", t}, {"states", states}},
                                "event type '" + t + "' is fired at " + std::to_string(states.size()) +
                                    " states of component " + std::to_string(c)});
      }
    }
  }
  return rep;
}

WfReport check_causal_consistency(const SwarmProtocol& g, const Subscription& sigma,
                                  const ConcurrencyRelation& conc) {
  WfReport rep;
  std::set<std::pair<Role, EventType>> missing1;
  std::set<std::tuple<Role, EventType, EventType>> missing2;
  for (const auto& e : g.edges()) {
    if (!sigma.contains(e.role, e.type) && missing1.emplace(e.role, e.type).second) {
      rep.failures.push_back({"causal-consistency-1",
                              json{{"role", e.role}, {"eventType", e.type}, {"state", g.name(e.source)}},
                              "role " + e.role + " emits '" + e.type + "' but does not subscribe to it"});
    }
    for (int pe : g.in(e.source)) {
      const auto& prev = g.edge(pe).type;
      if (conc.contains(prev, e.type) || sigma.contains(e.role, prev)) continue;
      if (missing2.emplace(e.role, e.type, prev).second) {
        rep.failures.push_back(
            {"causal-consistency-2",
             json{{"role", e.role}, {"eventType", e.type}, {"preceding", prev}, {"state", g.name(e.source)}},
             "role " + e.role + " emits '" + e.type + "' after '" + prev + "' but does not subscribe to '" + prev +
                 "'"});
      }
    }
  }
  return rep;
}

namespace {

struct LoopAnalysis {
  // Edges lying on a cycle of the residual graph.
  std::vector<int> residual_cycle_edges;
  // A residual cycle as state indices, empty when none.
  std::vector<int> witness_cycle;
  // Cycle edges whose type is looping in sigma for their cycle.
  std::vector<int> looping_edges;
};

// Per strongly connected component K, a cycle is discharged by any of its
// types covered at some state reachable from K.
LoopAnalysis analyze_loops(const SwarmProtocol& g, const std::vector<bool>& covered) {
  const std::size_t n = g.state_count();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges()) adj[e.source].push_back(e.target);
  auto sccs = graph::strongly_connected(adj);
  std::vector<TypeSet> cov(sccs.count);
  std::vector<std::vector<int>> members(sccs.count);
  for (std::size_t s = 0; s < n; ++s) members[sccs.comp[s]].push_back(static_cast<int>(s));
  for (int c = 0; c < sccs.count; ++c) {
    for (int s : members[c]) {
      for (int e : g.out(s)) {
        if (covered[e]) cov[c].insert(g.edge(e).type);
        int tc = sccs.comp[g.edge(e).target];
        if (tc != c) cov[c].insert(cov[tc].begin(), cov[tc].end());
      }
    }
  }

  LoopAnalysis out;
  std::vector<std::vector<int>> residual(n);
  std::vector<int> residual_edges;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(static_cast<int>(e));
    int c = sccs.comp[ed.source];
    if (c != sccs.comp[ed.target]) continue;
    if (cov[c].count(ed.type)) {
      out.looping_edges.push_back(static_cast<int>(e));
    } else {
      residual[ed.source].push_back(ed.target);
      residual_edges.push_back(static_cast<int>(e));
    }
  }
  auto rs = graph::strongly_connected(residual);
  for (int e : residual_edges) {
    const auto& ed = g.edge(e);
    if (rs.comp[ed.source] == rs.comp[ed.target]) out.residual_cycle_edges.push_back(e);
  }
  if (!out.residual_cycle_edges.empty()) out.witness_cycle = graph::find_cycle(residual);
  return out;
}

std::vector<bool> covered_edges(const SwarmProtocol& g, const AnchorIndex& idx, const Subscription& sigma) {
  std::vector<bool> cov(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) cov[e] = idx.covered(static_cast<int>(e), sigma);
  return cov;
}

std::vector<EventType> missing_from(const Subscription& sigma, const Role& r, std::initializer_list<EventType> ts) {
  std::vector<EventType> out;
  for (const auto& t : ts) {
    if (!sigma.contains(r, t)) out.push_back(t);
  }
  return out;
}

}  // namespace

DeterminacyResult check_determinacy(const SwarmProtocol& g, const Subscription& sigma,
                                    const ConcurrencyRelation& conc) {
  DeterminacyResult res;
  AnchorIndex idx(g, conc);

  std::set<std::tuple<StateId, EventType, EventType, Role>> seen_b;
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    for (int e1 : g.out(static_cast<int>(s))) {
      for (int e2 : g.out(static_cast<int>(s))) {
        const auto& a = g.edge(e1);
        const auto& b = g.edge(e2);
        if (a.type == b.type || a.target == b.target || conc.contains(a.type, b.type)) continue;
        res.updating.add(a.type, "branching");
        for (const auto& r : idx.roles(e1, sigma)) {
          auto miss = missing_from(sigma, r, {a.type, b.type});
          if (miss.empty() || !seen_b.emplace(g.name(static_cast<int>(s)), a.type, b.type, r).second) continue;
          res.report.failures.push_back(
              {"determinacy-branching",
               json{{"state", g.name(static_cast<int>(s))}, {"eventType", a.type}, {"branchesWith", b.type},
                    {"role", r}, {"missing", miss}},
               "role " + r + " depends on '" + a.type + "' at state " + g.name(static_cast<int>(s)) +
                   " but misses branching types"});
        }
      }
    }
  }

  for (const auto& j : joining_triples(g, conc)) {
    int s = *g.index_of(j.state);
    int e = *g.edge_for(s, j.t);
    res.updating.add(j.t, "joining");
    for (const auto& r : idx.roles(e, sigma)) {
      auto miss = missing_from(sigma, r, {j.t, j.t1, j.t2});
      if (miss.empty()) continue;
      res.report.failures.push_back(
          {"determinacy-joining",
           json{{"state", j.state}, {"eventType", j.t}, {"joins", {j.t1, j.t2}}, {"role", r}, {"missing", miss}},
           "role " + r + " depends on joining type '" + j.t + "' at state " + j.state +
               " but misses part of the join"});
    }
  }

  auto loops = analyze_loops(g, covered_edges(g, idx, sigma));
  for (int e : loops.looping_edges) res.updating.add(g.edge(e).type, "looping");
  if (!loops.witness_cycle.empty()) {
    std::vector<StateId> states;
    for (int s : loops.witness_cycle) states.push_back(g.name(s));
    TypeSet types;
    for (int e : loops.residual_cycle_edges) types.insert(g.edge(e).type);
    res.report.failures.push_back({"determinacy-looping", json{{"cycle", states}, {"uncoveredTypes", types}},
                                   "a cycle through state " + states.front() +
                                       " has no event type that all dependent roles subscribe to"});
  }
  return res;
}

namespace {

// Role-set helper of the rule system, computed by direct search over
// (state, last anchor) pairs for one transition.
RoleSet rule_roles(const SwarmProtocol& g, int edge, const Subscription& sigma, const ConcurrencyRelation& conc) {
  std::set<std::pair<int, EventType>> seen;
  std::deque<std::pair<int, EventType>> work;
  TypeSet anchors;
  auto push = [&](int q, const EventType& a) {
    if (seen.emplace(q, a).second) work.emplace_back(q, a);
  };
  push(g.edge(edge).target, g.edge(edge).type);
  while (!work.empty()) {
    auto [q, a] = work.front();
    work.pop_front();
    anchors.insert(a);
    for (int e : g.out(q)) {
      const auto& ed = g.edge(e);
      push(ed.target, a);
      if (!conc.contains(a, ed.type)) push(ed.target, ed.type);
    }
  }
  RoleSet out;
  for (const auto& [r, ts] : sigma.entries()) {
    for (const auto& a : anchors) {
      if (ts.count(a)) {
        out.insert(r);
        break;
      }
    }
  }
  return out;
}

bool subset_of(const TypeSet& ts, const TypeSet& of) { return std::includes(of.begin(), of.end(), ts.begin(), ts.end()); }

}  // namespace

std::optional<bool> rule_based_dcc(const SwarmProtocol& g, const Subscription& sigma, const ConcurrencyRelation& conc,
                                   std::size_t budget) {
  const std::size_t n = g.state_count();
  std::vector<RoleSet> roles(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) roles[e] = rule_roles(g, static_cast<int>(e), sigma, conc);

  // [Term] premises that do not mention V.
  std::vector<bool> term_ok(n, true);
  for (std::size_t s = 0; s < n; ++s) {
    for (int ei : g.out(static_cast<int>(s))) {
      const auto& ed = g.edge(ei);
      bool ok = sigma.contains(ed.role, ed.type);
      for (int nx : g.out(ed.target)) {
        const auto& after = g.edge(nx);
        if (!conc.contains(ed.type, after.type) && !sigma.contains(after.role, ed.type)) ok = false;
      }
      TypeSet bw;
      for (int o : g.out(static_cast<int>(s))) {
        const auto& other = g.edge(o);
        if (other.type != ed.type && other.target != ed.target && !conc.contains(ed.type, other.type)) {
          bw.insert(other.type);
        }
      }
      TypeSet jf;
      for (int i1 : g.in(static_cast<int>(s))) {
        for (int i2 : g.in(static_cast<int>(s))) {
          const auto& t1 = g.edge(i1).type;
          const auto& t2 = g.edge(i2).type;
          if (t1 != t2 && conc.contains(t1, t2) && !conc.contains(ed.type, t1) && !conc.contains(ed.type, t2)) {
            jf.insert(t1);
          }
        }
      }
      for (const TypeSet* need : {&bw, &jf}) {
        if (need->empty()) continue;
        TypeSet want = *need;
        want.insert(ed.type);
        for (const auto& r : roles[ei]) {
          if (!subset_of(want, sigma.of(r))) ok = false;
        }
      }
      if (!ok) term_ok[s] = false;
    }
  }

  // Types covered at some state reachable from each state ([Loop] side condition).
  std::vector<TypeSet> cov_from(n);
  {
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : g.edges()) adj[e.source].push_back(e.target);
    for (std::size_t s = 0; s < n; ++s) {
      auto reach = graph::reachable(adj, {static_cast<int>(s)});
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(static_cast<int>(e));
        if (!reach[ed.source]) continue;
        bool all = true;
        for (const auto& r : roles[e]) all = all && sigma.contains(r, ed.type);
        if (all) cov_from[s].insert(ed.type);
      }
    }
  }

  // Derivation over simple paths; V is the set of states on the current path.
  std::vector<int> pos(n, -1);
  std::vector<EventType> labels;
  std::size_t nodes = 0;
  bool exceeded = false;
  std::function<bool(int)> derive = [&](int s) -> bool {
    if (++nodes > budget) {
      exceeded = true;
      return true;
    }
    if (pos[s] >= 0) {
      for (std::size_t i = static_cast<std::size_t>(pos[s]); i < labels.size(); ++i) {
        if (cov_from[s].count(labels[i])) return true;
      }
      return false;
    }
    if (!term_ok[s]) return false;
    pos[s] = static_cast<int>(labels.size());
    bool ok = true;
    for (int e : g.out(s)) {
      labels.push_back(g.edge(e).type);
      ok = derive(g.edge(e).target);
      labels.pop_back();
      if (!ok || exceeded) break;
    }
    pos[s] = -1;
    return ok;
  };
  bool verdict = derive(0);
  if (exceeded) return std::nullopt;
  return verdict;
}

ConcurrencyRelation component_concurrency(const std::vector<SwarmProtocol>& gs) {
  auto together = [&](const EventType& a, const EventType& b) {
    return std::any_of(gs.begin(), gs.end(), [&](const SwarmProtocol& g) { return g.has_type(a) && g.has_type(b); });
  };
  ConcurrencyRelation conc;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (std::size_t j = 0; j < gs.size(); ++j) {
      if (i == j) continue;
      for (const auto& a : gs[i].event_types()) {
        if (gs[j].has_type(a)) continue;
        for (const auto& b : gs[j].event_types()) {
          if (!gs[i].has_type(b) && !together(a, b)) conc.insert(a, b);
        }
      }
    }
  }
  return conc;
}

WfResult check_well_formed(const SwarmProtocol& g, const Subscription& sigma,
                           const std::vector<SwarmProtocol>* components) {
  WfResult res;
  res.conc = concurrent_pairs(g);
  res.report = check_confusion_free(g, components);
  WfReport dcc = check_causal_consistency(g, sigma, res.conc);
  auto det = check_determinacy(g, sigma, res.conc);
  dcc.merge(det.report);
  res.report.merge(dcc);
  res.updating = det.updating;

  ConcurrencyRelation appendix = components ? component_concurrency(*components) : ConcurrencyRelation{};
  if (appendix == res.conc) {
    res.rules_verdict = rule_based_dcc(g, sigma, res.conc);
    if (res.rules_verdict && *res.rules_verdict != dcc.passed()) {
      throw ConsistencyError(std::string("rule-based and direct well-formedness checkers disagree (rules: ") +
                             (*res.rules_verdict ? "pass" : "fail") + ", direct: " + (dcc.passed() ? "pass" : "fail") +
                             ")");
    }
  }
  return res;
}

std::size_t expansion_cap() {
  if (const char* env = std::getenv("SWARMKIT_EXPANSION_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

ExactResult exact_subscription(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas,
                               std::size_t cap) {
  auto comp = check_composable(gs);
  if (!comp.composable) throw Error("exact_subscription: protocols are not composable: " + comp.failures.front());

  ComposeOptions opts;
  opts.cap = cap;
  SwarmProtocol g = compose(gs, opts);
  ConcurrencyRelation conc = concurrent_pairs(g);
  AnchorIndex idx(g, conc);
  Subscription sigma;
  for (const auto& s : sigmas) sigma.merge(s);

  auto branching = branching_pairs(g, conc);
  auto joining = joining_triples(g, conc);
  auto closure = [&] {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& e : g.edges()) {
        changed |= sigma.add(e.role, e.type);
        for (int pe : g.in(e.source)) {
          const auto& prev = g.edge(pe).type;
          if (!conc.contains(prev, e.type)) changed |= sigma.add(e.role, prev);
        }
      }
      for (const auto& b : branching) {
        int e = *g.edge_for(*g.index_of(b.state), b.t);
        for (const auto& r : idx.roles(e, sigma)) {
          changed |= sigma.add(r, b.t);
          changed |= sigma.add(r, b.t2);
        }
      }
      for (const auto& j : joining) {
        int e = *g.edge_for(*g.index_of(j.state), j.t);
        for (const auto& r : idx.roles(e, sigma)) {
          changed |= sigma.add(r, j.t);
          changed |= sigma.add(r, j.t1);
          changed |= sigma.add(r, j.t2);
        }
      }
    }
  };

  for (;;) {
    closure();
    auto loops = analyze_loops(g, covered_edges(g, idx, sigma));
    if (loops.residual_cycle_edges.empty()) break;
    int pick = *std::min_element(loops.residual_cycle_edges.begin(), loops.residual_cycle_edges.end(),
                                 [&](int a, int b) {
                                   const auto& ea = g.edge(a);
                                   const auto& eb = g.edge(b);
                                   return std::tie(ea.type, g.name(ea.source)) < std::tie(eb.type, g.name(eb.source));
                                 });
    for (const auto& r : idx.roles(pick, sigma)) sigma.add(r, g.edge(pick).type);
  }

  auto wf = check_well_formed(g, sigma, &gs);
  if (!wf.passed()) {
    throw Error("exact_subscription: internal error, result is not well-formed (" + wf.report.failures.front().check +
                ")");
  }
  return ExactResult{sigma, wf.updating, g, conc};
}

}  // namespace swarmkit
