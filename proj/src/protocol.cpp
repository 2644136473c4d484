#include "swarmkit/protocol.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include <boost/dynamic_bitset.hpp>

#include "swarmkit/graph.hpp"

namespace swarmkit {

SwarmProtocol SwarmProtocol::validate(const RawProtocol& raw) {
  if (raw.initial.empty()) throw ValidationError("missing initial state");

  std::set<StateId> declared;
  if (raw.states) {
    declared.insert(raw.states->begin(), raw.states->end());
    if (!declared.count(raw.initial)) {
      throw ValidationError("missing initial state: '" + raw.initial + "' is not a declared state");
    }
  }

  // state -> type -> transition
  std::map<StateId, std::map<EventType, Transition>> by_state;
  std::set<StateId> all{raw.initial};
  for (const auto& tr : raw.transitions) {
    if (tr.source.empty() || tr.target.empty()) {
      throw ValidationError("transition with empty endpoint: " + tr.source + " -> " + tr.target);
    }
    if (tr.role.empty()) throw ValidationError("transition " + tr.source + " -> " + tr.target + " has an empty role");
    if (tr.type.empty()) {
      throw ValidationError("transition " + tr.source + " -> " + tr.target + " has an empty event type");
    }
    if (raw.states) {
      for (const auto* end : {&tr.source, &tr.target}) {
        if (!declared.count(*end)) {
          throw ValidationError("dangling transition endpoint '" + *end + "' in " + tr.source + " --" + tr.role +
                                "<" + tr.type + ">--> " + tr.target);
        }
      }
    }
    auto [it, fresh] = by_state[tr.source].emplace(tr.type, tr);
    if (!fresh && it->second != tr) {
      throw ValidationError("state '" + tr.source + "' has two outgoing transitions labelled '" + tr.type +
                            "' (targets '" + it->second.target + "' and '" + tr.target + "')");
    }
    all.insert(tr.source);
    all.insert(tr.target);
  }
  if (raw.states) all.insert(declared.begin(), declared.end());

  SwarmProtocol g;
  std::unordered_map<StateId, int> index;
  std::deque<StateId> work{raw.initial};
  index[raw.initial] = 0;
  g.names_.push_back(raw.initial);
  while (!work.empty()) {
    StateId s = work.front();
    work.pop_front();
    auto it = by_state.find(s);
    if (it == by_state.end()) continue;
    for (const auto& [t, tr] : it->second) {
      if (!index.count(tr.target)) {
        index[tr.target] = static_cast<int>(g.names_.size());
        g.names_.push_back(tr.target);
        work.push_back(tr.target);
      }
    }
  }
  if (index.size() != all.size()) {
    std::string missing;
    for (const auto& s : all) {
      if (!index.count(s)) missing += (missing.empty() ? "" : ", ") + ("'" + s + "'");
    }
    throw ValidationError("unreachable state(s) from initial '" + raw.initial + "': " + missing);
  }

  g.index_.insert(index.begin(), index.end());
  g.out_.resize(g.names_.size());
  g.in_.resize(g.names_.size());
  for (std::size_t s = 0; s < g.names_.size(); ++s) {
    auto it = by_state.find(g.names_[s]);
    if (it == by_state.end()) continue;
    for (const auto& [t, tr] : it->second) {
      int e = static_cast<int>(g.edges_.size());
      g.edges_.push_back(Edge{static_cast<int>(s), index[tr.target], tr.role, tr.type});
      g.out_[s].push_back(e);
      g.in_[index[tr.target]].push_back(e);
      g.types_.insert(tr.type);
      g.roles_.insert(tr.role);
    }
  }
  return g;
}

SwarmProtocol SwarmProtocol::from_transitions(const StateId& initial, const std::vector<Transition>& ts) {
  return validate(RawProtocol{initial, std::nullopt, ts});
}

SwarmProtocol SwarmProtocol::empty(const StateId& initial) { return from_transitions(initial, {}); }

std::optional<int> SwarmProtocol::index_of(const StateId& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> SwarmProtocol::edge_for(int s, const EventType& t) const {
  const auto& o = out_[s];
  auto it = std::lower_bound(o.begin(), o.end(), t,
                             [&](int e, const EventType& x) { return edges_[e].type < x; });
  if (it != o.end() && edges_[*it].type == t) return *it;
  return std::nullopt;
}

RoleSet SwarmProtocol::emitters_of(const EventType& t) const {
  RoleSet out;
  for (const auto& e : edges_) {
    if (e.type == t) out.insert(e.role);
  }
  return out;
}

std::vector<Transition> SwarmProtocol::transitions() const {
  std::vector<Transition> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(Transition{names_[e.source], e.role, e.type, names_[e.target]});
  return out;
}

ConcurrencyRelation concurrent_pairs(const SwarmProtocol& g) {
  ConcurrencyRelation conc;
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    const auto& out = g.out(static_cast<int>(s));
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const auto& a = g.edge(out[i]);
        const auto& b = g.edge(out[j]);
        auto ab = g.edge_for(a.target, b.type);
        auto ba = g.edge_for(b.target, a.type);
        if (ab && ba && g.edge(*ab).target == g.edge(*ba).target) conc.insert(a.type, b.type);
      }
    }
  }
  return conc;
}

std::set<BranchingPair> branching_pairs(const SwarmProtocol& g, const ConcurrencyRelation& conc) {
  std::set<BranchingPair> out;
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    const auto& o = g.out(static_cast<int>(s));
    for (int e1 : o) {
      for (int e2 : o) {
        const auto& a = g.edge(e1);
        const auto& b = g.edge(e2);
        if (a.type == b.type || a.target == b.target || conc.contains(a.type, b.type)) continue;
        out.insert(BranchingPair{a.type, b.type, g.name(static_cast<int>(s))});
      }
    }
  }
  return out;
}

std::set<JoiningTriple> joining_triples(const SwarmProtocol& g, const ConcurrencyRelation& conc) {
  std::set<JoiningTriple> out;
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    const auto& in = g.in(static_cast<int>(s));
    for (int e1 : in) {
      for (int e2 : in) {
        const auto& t1 = g.edge(e1).type;
        const auto& t2 = g.edge(e2).type;
        if (!(t1 < t2) || !conc.contains(t1, t2)) continue;
        for (int e : g.out(static_cast<int>(s))) {
          const auto& t = g.edge(e).type;
          if (conc.contains(t1, t) || conc.contains(t2, t)) continue;
          out.insert(JoiningTriple{t, t1, t2, g.name(static_cast<int>(s))});
        }
      }
    }
  }
  return out;
}

std::vector<bool> cyclic_edges(const SwarmProtocol& g) {
  std::vector<std::vector<int>> adj(g.state_count());
  for (const auto& e : g.edges()) adj[e.source].push_back(e.target);
  auto sccs = graph::strongly_connected(adj);
  std::vector<bool> out(g.edge_count(), false);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(static_cast<int>(i));
    out[i] = sccs.comp[e.source] == sccs.comp[e.target];
  }
  return out;
}

TypeSet looping_types(const SwarmProtocol& g) {
  TypeSet out;
  auto cyc = cyclic_edges(g);
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    if (cyc[i]) out.insert(g.edge(static_cast<int>(i)).type);
  }
  return out;
}

AnchorIndex::AnchorIndex(const SwarmProtocol& g, const ConcurrencyRelation& conc) : g_(&g) {
  types_.assign(g.event_types().begin(), g.event_types().end());
  const int m = static_cast<int>(types_.size());
  const std::size_t n_states = g.state_count();
  std::vector<int> type_id(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& t = g.edge(static_cast<int>(e)).type;
    type_id[e] = static_cast<int>(std::lower_bound(types_.begin(), types_.end(), t) - types_.begin());
  }
  std::vector<std::vector<bool>> conc_m(m, std::vector<bool>(m, false));
  for (const auto& [a, b] : conc.pairs()) {
    auto ia = std::lower_bound(types_.begin(), types_.end(), a);
    auto ib = std::lower_bound(types_.begin(), types_.end(), b);
    if (ia == types_.end() || *ia != a || ib == types_.end() || *ib != b) continue;
    conc_m[ia - types_.begin()][ib - types_.begin()] = true;
    conc_m[ib - types_.begin()][ia - types_.begin()] = true;
  }

  // Product node (state q, last anchor a) -> compact id.
  std::vector<int> compact(n_states * static_cast<std::size_t>(m), -1);
  std::vector<std::pair<int, int>> nodes;
  auto intern = [&](int q, int a) {
    std::size_t key = static_cast<std::size_t>(q) * m + a;
    if (compact[key] < 0) {
      compact[key] = static_cast<int>(nodes.size());
      nodes.emplace_back(q, a);
    }
    return compact[key];
  };
  std::vector<int> start(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    start[e] = intern(g.edge(static_cast<int>(e)).target, type_id[e]);
  }
  std::vector<std::vector<int>> adj;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [q, a] = nodes[i];
    std::vector<int> succ;
    for (int e : g.out(q)) {
      int target = g.edge(e).target;
      succ.push_back(intern(target, a));
      if (!conc_m[a][type_id[e]]) succ.push_back(intern(target, type_id[e]));
    }
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    adj.push_back(std::move(succ));
  }

  auto sccs = graph::strongly_connected(adj);
  std::vector<boost::dynamic_bitset<>> reach(sccs.count, boost::dynamic_bitset<>(m));
  std::vector<std::vector<int>> members(sccs.count);
  for (std::size_t i = 0; i < nodes.size(); ++i) members[sccs.comp[i]].push_back(static_cast<int>(i));
  for (int c = 0; c < sccs.count; ++c) {
    auto& bits = reach[c];
    for (int v : members[c]) {
      bits.set(nodes[v].second);
      for (int w : adj[v]) {
        if (sccs.comp[w] != c) bits |= reach[sccs.comp[w]];
      }
    }
  }
  anchors_.resize(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& bits = reach[sccs.comp[start[e]]];
    for (auto i = bits.find_first(); i != boost::dynamic_bitset<>::npos; i = bits.find_next(i)) {
      anchors_[e].push_back(static_cast<int>(i));
    }
  }
}

RoleSet AnchorIndex::roles(int e, const Subscription& sigma) const {
  RoleSet out;
  for (const auto& [r, ts] : sigma.entries()) {
    for (int a : anchors_[e]) {
      if (ts.count(types_[a])) {
        out.insert(r);
        break;
      }
    }
  }
  return out;
}

bool AnchorIndex::covered(int e, const Subscription& sigma) const {
  const auto& t = g_->edge(e).type;
  for (const auto& r : roles(e, sigma)) {
    if (!sigma.contains(r, t)) return false;
  }
  return true;
}

RoleSet roles_set(const SwarmProtocol& g, const StateId& s, const EventType& t, const Subscription& sigma,
                  const ConcurrencyRelation& conc) {
  auto idx = g.index_of(s);
  if (!idx) throw Error("roles_set: unknown state '" + s + "'");
  auto e = g.edge_for(*idx, t);
  if (!e) throw Error("roles_set: state '" + s + "' does not fire '" + t + "'");
  return AnchorIndex(g, conc).roles(*e, sigma);
}

std::vector<std::tuple<int, EventType, Role, int>> canonical_form(const SwarmProtocol& g) {
  // Validation already numbers states by BFS over type-sorted edges.
  std::vector<std::tuple<int, EventType, Role, int>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.source, e.type, e.role, e.target);
  return out;
}

bool isomorphic(const SwarmProtocol& a, const SwarmProtocol& b) {
  return a.state_count() == b.state_count() && canonical_form(a) == canonical_form(b);
}

}  // namespace swarmkit
