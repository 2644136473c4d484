#include "swarmkit/compose.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "swarmkit/wellformed.hpp"

namespace swarmkit {

InterfaceReport interface(const SwarmProtocol& g, const SwarmProtocol& h) {
  InterfaceReport rep;
  for (const auto& r : g.roles()) {
    if (h.has_role(r)) rep.interfacing_roles.insert(r);
  }
  for (const auto& e : g.edges()) {
    if (rep.interfacing_roles.count(e.role)) rep.interfacing_event_types.insert(e.type);
  }
  std::set<InterfaceViolation> seen;
  for (const auto& e : g.edges()) {
    for (const auto& r2 : h.emitters_of(e.type)) {
      if (r2 != e.role) seen.insert(InterfaceViolation{e.type, e.role, r2});
    }
  }
  rep.violations.assign(seen.begin(), seen.end());
  return rep;
}

StateId tuple_name(const std::vector<StateId>& parts) {
  StateId out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '|';
    const auto& p = parts[i];
    if (p.find_first_of("|()") != std::string::npos) {
      out += '(' + p + ')';
    } else {
      out += p;
    }
  }
  return out;
}

namespace {

struct ProductEdge {
  int source;
  Role role;
  EventType type;
  int target;
};

struct Product {
  std::vector<std::vector<int>> tuples;
  std::vector<ProductEdge> transitions;
  // Per component, per edge: realised by some product transition.
  std::vector<std::vector<bool>> used;
};

Product build_product(const std::vector<SwarmProtocol>& gs, const ComposeOptions& opts) {
  const std::size_t n = gs.size();
  if (n == 0) throw Error("compose: empty protocol list");

  if (!opts.roles) {
    std::vector<InterfaceViolation> all;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        auto rep = interface(gs[i], gs[j]);
        all.insert(all.end(), rep.violations.begin(), rep.violations.end());
      }
    }
    if (!all.empty()) {
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      std::string msg = "protocols are not interfacing:";
      for (const auto& v : all) msg += " " + v.type + " emitted by " + v.role + " and " + v.other_role + ";";
      throw InterfaceError(msg, all);
    }
  }

  // Synchronising roles and the components that must move jointly on them.
  std::map<Role, std::vector<int>> sync;
  if (opts.roles) {
    std::vector<int> everyone(n);
    for (std::size_t i = 0; i < n; ++i) everyone[i] = static_cast<int>(i);
    for (const auto& r : *opts.roles) sync[r] = everyone;
  } else {
    std::map<Role, std::vector<int>> owners;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& r : gs[i].roles()) owners[r].push_back(static_cast<int>(i));
    }
    for (auto& [r, cs] : owners) {
      if (cs.size() >= 2) sync[r] = cs;
    }
  }

  Product p;
  p.used.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.used[i].assign(gs[i].edge_count(), false);
  std::map<std::vector<int>, int> index;
  std::deque<int> work;
  auto intern = [&](const std::vector<int>& t) {
    auto [it, fresh] = index.emplace(t, static_cast<int>(p.tuples.size()));
    if (fresh) {
      if (opts.cap && p.tuples.size() >= opts.cap) {
        throw CapExceeded("composition exceeds the expansion cap of " + std::to_string(opts.cap) + " states",
                          opts.cap);
      }
      p.tuples.push_back(t);
      work.push_back(it->second);
    }
    return it->second;
  };
  intern(std::vector<int>(n, 0));

  while (!work.empty()) {
    int cur = work.front();
    work.pop_front();
    const std::vector<int> tuple = p.tuples[cur];
    // Synchronised moves, keyed by (role, type).
    std::set<std::pair<Role, EventType>> joint;
    for (std::size_t c = 0; c < n; ++c) {
      for (int e : gs[c].out(tuple[c])) {
        const auto& edge = gs[c].edge(e);
        auto it = sync.find(edge.role);
        if (it == sync.end()) {
          std::vector<int> next = tuple;
          next[c] = edge.target;
          p.used[c][e] = true;
          int tgt = intern(next);
          p.transitions.push_back(ProductEdge{cur, edge.role, edge.type, tgt});
        } else {
          joint.emplace(edge.role, edge.type);
        }
      }
    }
    for (const auto& [role, type] : joint) {
      const auto& parts = sync.at(role);
      std::vector<int> next = tuple;
      std::vector<std::pair<int, int>> fired;
      bool ok = true;
      for (int c : parts) {
        auto e = gs[c].edge_for(tuple[c], type);
        if (!e || gs[c].edge(*e).role != role) {
          ok = false;
          break;
        }
        next[c] = gs[c].edge(*e).target;
        fired.emplace_back(c, *e);
      }
      if (!ok) continue;
      for (auto [c, e] : fired) p.used[c][e] = true;
      int tgt = intern(next);
      p.transitions.push_back(ProductEdge{cur, role, type, tgt});
    }
  }
  return p;
}

}  // namespace

SwarmProtocol compose(const std::vector<SwarmProtocol>& gs, const ComposeOptions& opts) {
  Product p = build_product(gs, opts);
  std::vector<StateId> names(p.tuples.size());
  for (std::size_t i = 0; i < p.tuples.size(); ++i) {
    std::vector<StateId> parts;
    for (std::size_t c = 0; c < gs.size(); ++c) parts.push_back(gs[c].name(p.tuples[i][c]));
    names[i] = gs.size() == 1 ? parts[0] : tuple_name(parts);
  }
  std::vector<Transition> ts;
  ts.reserve(p.transitions.size());
  for (const auto& tr : p.transitions) ts.push_back(Transition{names[tr.source], tr.role, tr.type, names[tr.target]});
  try {
    return SwarmProtocol::from_transitions(names[0], ts);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("composition is not a valid protocol: ") + e.what());
  }
}

std::size_t restricted_transition_count(const std::vector<SwarmProtocol>& gs, const ComposeOptions& opts) {
  Product p = build_product(gs, opts);
  std::size_t missing = 0;
  for (const auto& u : p.used) missing += static_cast<std::size_t>(std::count(u.begin(), u.end(), false));
  return missing;
}

std::size_t estimate_product_size(const std::vector<SwarmProtocol>& gs) {
  std::size_t est = 1;
  for (const auto& g : gs) {
    std::size_t n = g.state_count();
    if (est > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(n, 1)) {
      return std::numeric_limits<std::size_t>::max();
    }
    est *= n;
  }
  return est;
}

ComposabilityReport check_composable(const std::vector<SwarmProtocol>& gs) {
  ComposabilityReport rep;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    auto conc = concurrent_pairs(gs[i]);
    if (!conc.empty()) {
      rep.failures.push_back("protocol " + std::to_string(i) + " is not sequential (" +
                             std::to_string(conc.size()) + " concurrent pair(s))");
    }
    auto cf = check_confusion_free(gs[i]);
    for (const auto& f : cf.failures) {
      rep.failures.push_back("protocol " + std::to_string(i) + " is not confusion-free: " + f.message);
    }
    for (std::size_t j = i + 1; j < gs.size(); ++j) {
      auto a = interface(gs[i], gs[j]);
      for (const auto& v : a.violations) {
        rep.failures.push_back("protocols " + std::to_string(i) + " and " + std::to_string(j) +
                               " are not interfacing: " + v.type + " emitted by " + v.role + " and " +
                               v.other_role);
      }
    }
  }
  rep.composable = rep.failures.empty();
  return rep;
}

}  // namespace swarmkit
