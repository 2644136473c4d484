#include "swarmkit/subscription.hpp"

#include <algorithm>
#include <numeric>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "swarmkit/graph.hpp"

namespace swarmkit {

ComponentConcurrency::ComponentConcurrency(const std::vector<SwarmProtocol>& gs) {
  roles_.reserve(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    roles_.push_back(gs[i].roles());
    for (const auto& e : gs[i].edges()) {
      auto& info = types_[e.type];
      if (info.components.empty() || info.components.back() != static_cast<int>(i)) {
        info.components.push_back(static_cast<int>(i));
      }
      info.emitter = e.role;
    }
  }
}

bool ComponentConcurrency::contains(const EventType& a, const EventType& b) const {
  if (a == b) return false;
  auto ia = types_.find(a);
  auto ib = types_.find(b);
  if (ia == types_.end() || ib == types_.end()) return false;
  // A sequential component orders any two of its types in every composition.
  const auto& ca = ia->second.components;
  const auto& cb = ib->second.components;
  if (std::find_first_of(ca.begin(), ca.end(), cb.begin(), cb.end()) != ca.end()) return false;
  for (int i : ia->second.components) {
    if (roles_[i].count(ib->second.emitter)) continue;
    for (int j : ib->second.components) {
      if (i != j && !roles_[j].count(ia->second.emitter)) return true;
    }
  }
  return false;
}

ConcurrencyRelation ComponentConcurrency::materialize() const {
  ConcurrencyRelation out;
  for (auto a = types_.begin(); a != types_.end(); ++a) {
    for (auto b = std::next(a); b != types_.end(); ++b) {
      if (contains(a->first, b->first)) out.insert(a->first, b->first);
    }
  }
  return out;
}

ComposabilityReport check_composable_fast(const std::vector<SwarmProtocol>& gs) {
  ComposabilityReport rep;
  std::unordered_map<EventType, std::pair<Role, std::size_t>> emitter;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (!concurrent_pairs(gs[i]).empty()) rep.failures.push_back("protocol " + std::to_string(i) + " is not sequential");
    for (const auto& f : check_confusion_free(gs[i]).failures) {
      rep.failures.push_back("protocol " + std::to_string(i) + " is not confusion-free: " + f.message);
    }
    for (const auto& e : gs[i].edges()) {
      auto [it, fresh] = emitter.emplace(e.type, std::make_pair(e.role, i));
      if (!fresh && it->second.first != e.role && it->second.second != i) {
        rep.failures.push_back("protocols " + std::to_string(it->second.second) + " and " + std::to_string(i) +
                               " are not interfacing: " + e.type + " emitted by " + it->second.first + " and " +
                               e.role);
      }
    }
  }
  rep.composable = rep.failures.empty();
  return rep;
}

RoleSet subscribers(const SwarmProtocol& g, const StateId& s, const Subscription& sigma) {
  auto idx = g.index_of(s);
  if (!idx) throw Error("subscribers: unknown state " + s);
  std::vector<bool> seen(g.state_count());
  std::deque<int> work{*idx};
  seen[*idx] = true;
  TypeSet reach;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int e : g.out(q)) {
      reach.insert(g.edge(e).type);
      int t = g.edge(e).target;
      if (!seen[t]) {
        seen[t] = true;
        work.push_back(t);
      }
    }
  }
  RoleSet out;
  for (const auto& [r, ts] : sigma.entries()) {
    if (std::any_of(ts.begin(), ts.end(), [&](const EventType& t) { return reach.count(t) > 0; })) out.insert(r);
  }
  return out;
}

namespace {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : w_((n + 63) / 64, 0) {}
  bool set(int i) {
    auto& word = w_[i >> 6];
    std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (word & m) return false;
    word |= m;
    return true;
  }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  bool intersects(const Bits& o) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      if (w_[k] & o.w_[k]) return true;
    }
    return false;
  }
  void merge(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
  }
  bool empty_storage() const { return w_.empty(); }

 private:
  std::vector<std::uint64_t> w_;
};

struct Component {
  const SwarmProtocol* g = nullptr;
  std::vector<int> gtype;  // local type -> global type
  std::vector<int> etype;  // edge -> local type
  std::vector<int> erole;  // edge -> global role
  std::vector<Bits> reach;  // state -> local types reachable from it
  std::vector<Bits> sig;  // global role -> subscribed local types
  std::vector<int> active;  // roles with a non-empty local subscription
  std::vector<std::vector<int>> branching;  // state -> local branching types
  graph::Sccs sccs;
  bool dirty = true;
  bool queued = false;
};

struct Join {
  int x;
  int t1, t2, t;  // global types: t1 precedes t in this component, t2 in another
};

class CompositionalGenerator {
 public:
  CompositionalGenerator(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas) : gs_(gs) {
    auto comp = check_composable_fast(gs);
    if (!comp.composable) throw Error("generate_subscription: protocols are not composable: " + comp.failures.front());
    res_.conc_oracle = ComponentConcurrency(gs);

    std::map<Role, int> role_count;
    for (const auto& g : gs) {
      for (const auto& r : g.roles()) {
        if (++role_count[r] == 2) res_.ifr.insert(r);
      }
    }
    for (const auto& g : gs) {
      for (const auto& e : g.edges()) type_id(e.type);
    }
    type_locs_.resize(types_.size());
    comps_.resize(gs.size());
    for (std::size_t c = 0; c < gs.size(); ++c) build_component(static_cast<int>(c));
    for (std::size_t c = 0; c < gs.size(); ++c) build_joins(static_cast<int>(c));
    for (const auto& s : sigmas) {
      extra_.merge(s);
      for (const auto& [r, ts] : s.entries()) {
        for (const auto& t : ts) {
          auto it = type_ids_.find(t);
          if (it != type_ids_.end()) add(role_id(r), it->second);
        }
      }
    }
  }

  CompositionalResult run() {
    for (auto& c : comps_) {
      for (std::size_t e = 0; e < c.g->edge_count(); ++e) {
        const auto& ed = c.g->edge(static_cast<int>(e));
        int r = c.erole[e];
        add(r, c.gtype[c.etype[e]]);
        for (int pe : c.g->in(ed.source)) add(r, c.gtype[c.etype[pe]]);
      }
    }
    res_.causal_sigma = export_sigma();
    for (;;) {
      closure();
      std::size_t picks = 0;
      for (std::size_t c = 0; c < comps_.size(); ++c) picks += cover_one_loop(static_cast<int>(c)) ? 1 : 0;
      if (picks == 0) break;
      res_.loop_picks += picks;
    }
    res_.sigma = export_sigma();
    collect_updating();
    return std::move(res_);
  }

 private:
  int type_id(const EventType& t) {
    auto [it, fresh] = type_ids_.emplace(t, static_cast<int>(types_.size()));
    if (fresh) types_.push_back(t);
    return it->second;
  }

  int role_id(const Role& r) {
    auto [it, fresh] = role_ids_.emplace(r, static_cast<int>(roles_.size()));
    if (fresh) {
      roles_.push_back(r);
      for (auto& c : comps_) c.sig.emplace_back();
    }
    return it->second;
  }

  void build_component(int ci) {
    Component& c = comps_[ci];
    const SwarmProtocol& g = gs_[ci];
    c.g = &g;
    std::unordered_map<int, int> local;
    for (const auto& e : g.edges()) {
      int gt = type_ids_.at(e.type);
      auto [it, fresh] = local.emplace(gt, static_cast<int>(c.gtype.size()));
      if (fresh) {
        c.gtype.push_back(gt);
        type_locs_[gt].emplace_back(ci, it->second);
      }
      c.etype.push_back(it->second);
      c.erole.push_back(role_id(e.role));
    }
    c.sig.resize(roles_.size());

    const std::size_t n = g.state_count();
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : g.edges()) adj[e.source].push_back(e.target);
    c.sccs = graph::strongly_connected(adj);
    std::vector<std::vector<int>> members(c.sccs.count);
    for (std::size_t s = 0; s < n; ++s) members[c.sccs.comp[s]].push_back(static_cast<int>(s));
    std::vector<Bits> creach(c.sccs.count, Bits(c.gtype.size()));
    for (int k = 0; k < c.sccs.count; ++k) {
      for (int s : members[k]) {
        for (int e : g.out(s)) {
          creach[k].set(c.etype[e]);
          int tk = c.sccs.comp[g.edge(e).target];
          if (tk != k) creach[k].merge(creach[tk]);
        }
      }
    }
    c.reach.resize(n);
    for (std::size_t s = 0; s < n; ++s) c.reach[s] = creach[c.sccs.comp[s]];

    c.branching.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& out = g.out(static_cast<int>(s));
      for (int e1 : out) {
        bool branches = std::any_of(out.begin(), out.end(),
                                    [&](int e2) { return g.edge(e2).target != g.edge(e1).target; });
        if (branches) c.branching[s].push_back(c.etype[e1]);
      }
    }
  }

  void build_joins(int ci) {
    const Component& c = comps_[ci];
    std::vector<Join> joins;
    for (std::size_t e = 0; e < c.g->edge_count(); ++e) {
      int gt = c.gtype[c.etype[e]];
      for (auto [cj, lj] : type_locs_[gt]) {
        if (cj == ci) continue;
        const Component& o = comps_[cj];
        for (std::size_t f = 0; f < o.g->edge_count(); ++f) {
          if (o.etype[f] != lj) continue;
          for (int pi : c.g->in(c.g->edge(static_cast<int>(e)).source)) {
            for (int pj : o.g->in(o.g->edge(static_cast<int>(f)).source)) {
              int t1 = c.gtype[c.etype[pi]];
              int t2 = o.gtype[o.etype[pj]];
              if (conc(t1, t2) && !conc(t1, gt) && !conc(t2, gt)) {
                joins.push_back(Join{c.g->edge(pi).source, t1, t2, gt});
              }
            }
          }
        }
      }
    }
    joins_.push_back(std::move(joins));
  }

  // Memoized oracle over global type ids; -1 marks an unknown pair.
  bool conc(int a, int b) {
    const std::size_t n = types_.size();
    if (conc_memo_.empty()) conc_memo_.assign(n * n, -1);
    auto& v = conc_memo_[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
    if (v < 0) v = conc_memo_[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)] =
                   res_.conc_oracle.contains(types_[a], types_[b]) ? 1 : 0;
    return v == 1;
  }

  void add(int r, int gt) {
    for (auto [ci, l] : type_locs_[gt]) {
      Component& c = comps_[ci];
      if (c.sig[r].empty_storage()) {
        c.sig[r] = Bits(c.gtype.size());
        c.active.push_back(r);
      }
      if (c.sig[r].set(l)) {
        c.dirty = true;
        if (!c.queued) {
          c.queued = true;
          work_.push_back(ci);
        }
      }
    }
  }

  std::vector<int> subs(const Component& c, int s) const {
    std::vector<int> out;
    for_each_sub(c, s, [&](int r) { out.push_back(r); });
    return out;
  }

  // Visits the subscribers of s; roles activated by f during the visit are
  // skipped, which is harmless because activation marks the component dirty.
  template <class F>
  void for_each_sub(const Component& c, int s, F&& f) const {
    for (std::size_t k = 0, n = c.active.size(); k < n; ++k) {
      int r = c.active[k];
      if (c.sig[r].intersects(c.reach[s])) f(r);
    }
  }

  // Applies Branching, Joining and Interfacing until no component changes.
  void closure() {
    while (!work_.empty()) {
      int ci = work_.front();
      work_.pop_front();
      Component& c = comps_[ci];
      c.queued = false;
      while (c.dirty) {
        c.dirty = false;
        ++res_.iterations;
        for (std::size_t s = 0; s < c.branching.size(); ++s) {
          if (c.branching[s].empty()) continue;
          for_each_sub(c, static_cast<int>(s), [&](int r) {
            for (int lt : c.branching[s]) add(r, c.gtype[lt]);
          });
        }
        for (const auto& j : joins_[ci]) {
          for_each_sub(c, j.x, [&](int r) {
            add(r, j.t1);
            add(r, j.t2);
            add(r, j.t);
          });
        }
        for (std::size_t e = 0; e < c.g->edge_count(); ++e) {
          if (!res_.ifr.count(roles_[c.erole[e]])) continue;
          int gt = c.gtype[c.etype[e]];
          for_each_sub(c, c.g->edge(static_cast<int>(e)).target, [&](int r) { add(r, gt); });
        }
      }
    }
  }

  struct LoopState {
    std::vector<bool> covered;
    std::vector<Bits> cov;  // per SCC
  };

  LoopState loop_state(const Component& c) const {
    const SwarmProtocol& g = *c.g;
    LoopState ls;
    ls.covered.assign(g.edge_count(), false);
    for (std::size_t s = 0; s < g.state_count(); ++s) {
      auto rs = subs(c, static_cast<int>(s));
      for (int e : g.out(static_cast<int>(s))) {
        ls.covered[e] = std::all_of(rs.begin(), rs.end(), [&](int r) { return c.sig[r].test(c.etype[e]); });
      }
    }
    ls.cov.assign(c.sccs.count, Bits(c.gtype.size()));
    std::vector<std::vector<int>> members(c.sccs.count);
    for (std::size_t s = 0; s < g.state_count(); ++s) members[c.sccs.comp[s]].push_back(static_cast<int>(s));
    for (int k = 0; k < c.sccs.count; ++k) {
      for (int s : members[k]) {
        for (int e : g.out(s)) {
          if (ls.covered[e]) ls.cov[k].set(c.etype[e]);
          int tk = c.sccs.comp[g.edge(e).target];
          if (tk != k) ls.cov[k].merge(ls.cov[tk]);
        }
      }
    }
    return ls;
  }

  bool cover_one_loop(int ci) {
    Component& c = comps_[ci];
    const SwarmProtocol& g = *c.g;
    auto ls = loop_state(c);
    std::vector<std::vector<int>> residual(g.state_count());
    std::vector<int> redges;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(static_cast<int>(e));
      int k = c.sccs.comp[ed.source];
      if (k != c.sccs.comp[ed.target] || ls.cov[k].test(c.etype[e])) continue;
      residual[ed.source].push_back(ed.target);
      redges.push_back(static_cast<int>(e));
    }
    if (redges.empty()) return false;
    auto rs = graph::strongly_connected(residual);
    int pick = -1;
    for (int e : redges) {
      const auto& ed = g.edge(e);
      if (rs.comp[ed.source] != rs.comp[ed.target]) continue;
      if (pick < 0 || std::tie(ed.type, g.name(ed.source)) < std::tie(g.edge(pick).type, g.name(g.edge(pick).source))) {
        pick = e;
      }
    }
    if (pick < 0) return false;
    for (int r : subs(c, g.edge(pick).source)) add(r, c.gtype[c.etype[pick]]);
    return true;
  }

  void collect_updating() {
    for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
      const Component& c = comps_[ci];
      for (const auto& b : c.branching) {
        for (int lt : b) res_.updating.add(types_[c.gtype[lt]], "branching");
      }
      for (const auto& j : joins_[ci]) res_.updating.add(types_[j.t], "joining");
      auto ls = loop_state(c);
      for (std::size_t e = 0; e < c.g->edge_count(); ++e) {
        const auto& ed = c.g->edge(static_cast<int>(e));
        int k = c.sccs.comp[ed.source];
        if (k == c.sccs.comp[ed.target] && ls.cov[k].test(c.etype[e])) res_.updating.add(ed.type, "looping");
      }
    }
  }

  Subscription export_sigma() const {
    std::vector<std::vector<char>> has(roles_.size());
    for (const auto& c : comps_) {
      for (int r : c.active) {
        if (has[r].empty()) has[r].assign(types_.size(), 0);
        for (std::size_t l = 0; l < c.gtype.size(); ++l) {
          if (c.sig[r].test(static_cast<int>(l))) has[r][c.gtype[l]] = 1;
        }
      }
    }
    std::vector<int> by_name(types_.size());
    std::iota(by_name.begin(), by_name.end(), 0);
    std::sort(by_name.begin(), by_name.end(), [&](int a, int b) { return types_[a] < types_[b]; });
    std::map<Role, TypeSet> m = extra_.entries();
    for (std::size_t r = 0; r < roles_.size(); ++r) {
      if (has[r].empty()) continue;
      auto& ts = m[roles_[r]];
      for (int t : by_name) {
        if (has[r][t]) ts.emplace_hint(ts.end(), types_[t]);
      }
    }
    return Subscription(m);
  }

  const std::vector<SwarmProtocol>& gs_;
  CompositionalResult res_;
  std::vector<EventType> types_;
  std::unordered_map<EventType, int> type_ids_;
  std::vector<Role> roles_;
  std::unordered_map<Role, int> role_ids_;
  std::vector<std::vector<std::pair<int, int>>> type_locs_;
  std::vector<Component> comps_;
  std::vector<std::vector<Join>> joins_;
  std::vector<signed char> conc_memo_;
  std::deque<int> work_;
  Subscription extra_;
};

}  // namespace

CompositionalResult generate_subscription(const std::vector<SwarmProtocol>& gs, const std::vector<Subscription>& sigmas) {
  if (gs.empty()) throw Error("generate_subscription: empty protocol list");
  return CompositionalGenerator(gs, sigmas).run();
}

}  // namespace swarmkit
