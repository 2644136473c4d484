#include "swarmkit/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace swarmkit::io {

namespace {

const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(what + ": missing field '" + key + "'");
  return j.at(key);
}

std::string str(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_string()) throw ValidationError(what + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

TypeSet type_set(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of event types");
  TypeSet out;
  for (const auto& t : j) {
    if (!t.is_string()) throw ValidationError(what + ": event types must be strings");
    out.insert(t.get<std::string>());
  }
  return out;
}

}  // namespace

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << dump(j);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RawProtocol raw_protocol_from_json(const json& j) {
  const std::string what = "protocol";
  RawProtocol raw;
  raw.initial = str(j, "initial", what);
  if (j.contains("states")) {
    std::vector<StateId> states;
    for (const auto& s : j.at("states")) states.push_back(s.get<std::string>());
    raw.states = std::move(states);
  }
  const json& ts = field(j, "transitions", what);
  if (!ts.is_array()) throw ValidationError("protocol: 'transitions' must be an array");
  for (const auto& t : ts) {
    raw.transitions.push_back(Transition{str(t, "source", "transition"), str(t, "role", "transition"),
                                         str(t, "eventType", "transition"), str(t, "target", "transition")});
  }
  return raw;
}

SwarmProtocol protocol_from_json(const json& j) { return SwarmProtocol::validate(raw_protocol_from_json(j)); }

json to_json(const SwarmProtocol& g) {
  auto ts = g.transitions();
  std::sort(ts.begin(), ts.end());
  json arr = json::array();
  for (const auto& t : ts) {
    arr.push_back({{"source", t.source}, {"role", t.role}, {"eventType", t.type}, {"target", t.target}});
  }
  return {{"initial", g.initial_name()}, {"transitions", arr}};
}

Subscription subscription_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("subscription: expected an object mapping roles to event types");
  std::map<Role, TypeSet> m;
  for (const auto& [r, ts] : j.items()) m[r] = type_set(ts, "subscription of " + r);
  return Subscription(m);
}

json to_json(const Subscription& s) {
  json out = json::object();
  for (const auto& [r, ts] : s.entries()) out[r] = ts;
  return out;
}

ConcurrencyRelation concurrency_from_json(const json& j) {
  ConcurrencyRelation c;
  if (!j.is_array()) throw ValidationError("concurrency: expected an array of pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ValidationError("concurrency: each entry must be a pair");
    c.insert(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return c;
}

json to_json(const ConcurrencyRelation& c) {
  json out = json::array();
  for (const auto& [a, b] : c.pairs()) out.push_back({a, b});
  return out;
}

Machine machine_from_json(const json& j) {
  const std::string what = "machine";
  Machine::Builder b;
  if (j.contains("role")) b.role = j.at("role").get<std::string>();
  std::map<StateId, int> index;
  auto state = [&](const StateId& s) {
    auto [it, fresh] = index.emplace(s, static_cast<int>(b.names.size()));
    if (fresh) b.add_state(s);
    return it->second;
  };
  b.initial = state(str(j, "initial", what));
  if (j.contains("accepts")) {
    for (const auto& a : j.at("accepts")) {
      int src = state(str(a, "source", "acceptance edge"));
      int tgt = state(str(a, "target", "acceptance edge"));
      auto t = str(a, "eventType", "acceptance edge");
      if (!b.accepts[src].emplace(t, tgt).second && b.accepts[src].at(t) != tgt) {
        throw ValidationError("machine: state " + b.names[src] + " accepts " + t + " more than once");
      }
    }
  }
  if (j.contains("emitters")) {
    for (const auto& [s, ts] : j.at("emitters").items()) b.emitters[state(s)] = type_set(ts, "emitters of " + s);
  }
  Machine m = Machine::build(b);
  TypeSet updating = j.contains("updating") ? type_set(j.at("updating"), "updating") : TypeSet{};
  ConcurrencyRelation conc = j.contains("concurrent") ? concurrency_from_json(j.at("concurrent")) : ConcurrencyRelation{};
  m.set_realisation(std::move(updating), std::move(conc));
  return m;
}

json to_json(const Machine& m) {
  std::vector<std::tuple<StateId, EventType, StateId>> edges;
  json emitters = json::object();
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    for (const auto& [t, tgt] : m.accepts(static_cast<int>(s))) {
      edges.emplace_back(m.name(static_cast<int>(s)), t, m.name(tgt));
    }
    emitters[m.name(static_cast<int>(s))] = m.emitters(static_cast<int>(s));
  }
  std::sort(edges.begin(), edges.end());
  json acc = json::array();
  for (const auto& [s, t, d] : edges) acc.push_back({{"source", s}, {"eventType", t}, {"target", d}});
  return {{"role", m.role()},
          {"initial", m.name(0)},
          {"accepts", acc},
          {"emitters", emitters},
          {"updating", m.updating()},
          {"concurrent", to_json(m.conc())}};
}

json to_json(const WfReport& r) {
  json fs = json::array();
  auto failures = r.failures;
  std::stable_sort(failures.begin(), failures.end(), [](const WfFailure& a, const WfFailure& b) {
    return std::tie(a.check, a.message) < std::tie(b.check, b.message);
  });
  for (const auto& f : failures) fs.push_back({{"check", f.check}, {"witness", f.witness}, {"message", f.message}});
  return {{"passed", r.passed()}, {"failures", fs}};
}

json to_json(const UpdatingTypeSet& u) {
  json out = json::object();
  for (const auto& [t, ps] : u.provenance()) out[t] = ps;
  return out;
}

SwarmSpec swarm_from_json(const json& j) {
  SwarmSpec s;
  s.sigma = subscription_from_json(field(j, "subscription", "swarm"));
  if (j.contains("updating")) s.updating = type_set(j.at("updating"), "updating");
  if (j.contains("concurrent")) s.conc = concurrency_from_json(j.at("concurrent"));
  if (j.contains("protocol")) s.protocol = protocol_from_json(j.at("protocol"));
  for (const auto& m : field(j, "members", "swarm")) {
    SwarmMember mem;
    mem.role = str(m, "role", "swarm member");
    mem.origin = m.value("origin", std::size_t{0});
    mem.machine = machine_from_json(field(m, "machine", "swarm member"));
    mem.machine.set_role(mem.role);
    mem.machine.set_realisation(s.updating, s.conc);
    s.members.push_back(std::move(mem));
  }
  return s;
}

json to_json(const SwarmSpec& s) {
  json members = json::array();
  for (const auto& m : s.members) {
    members.push_back({{"role", m.role}, {"origin", m.origin}, {"machine", to_json(m.machine)}});
  }
  json out = {{"subscription", to_json(s.sigma)},
              {"updating", s.updating},
              {"concurrent", to_json(s.conc)},
              {"members", members}};
  if (s.protocol) out["protocol"] = to_json(*s.protocol);
  return out;
}

Event event_from_json(const json& j) {
  Event e;
  e.id = field(j, "id", "event").get<EventId>();
  e.type = str(j, "type", "event");
  if (j.contains("pue") && !j.at("pue").is_null()) e.pue = j.at("pue").get<EventId>();
  return e;
}

json to_json(const Event& e) {
  return {{"id", e.id}, {"type", e.type}, {"pue", e.pue ? json(*e.pue) : json(nullptr)}};
}

Log log_from_json(const json& j) {
  Log l;
  for (const auto& e : j) l.push_back(event_from_json(e));
  return l;
}

json to_json(const Log& l) {
  json out = json::array();
  for (const auto& e : l) out.push_back(to_json(e));
  return out;
}

json trace_to_json(const SimResult& r, const SwarmSpec& spec, bool legacy) {
  json steps = json::array();
  for (const auto& st : r.trace) {
    if (const auto* ls = std::get_if<LocalStep>(&st.choice)) {
      steps.push_back({{"step", st.step},
                       {"kind", "local"},
                       {"member", ls->member},
                       {"position", ls->position},
                       {"event", to_json(*st.event)}});
    } else {
      const auto& ps = std::get<PropStep>(st.choice);
      steps.push_back({{"step", st.step}, {"kind", "prop"}, {"member", ps.member}, {"delivered", ps.delivered}});
    }
  }
  json members = json::array();
  for (const auto& m : spec.members) members.push_back({{"role", m.role}, {"machine", to_json(m.machine)}});
  return {{"trace", steps}, {"members", members}, {"global", to_json(r.global)}, {"legacy", legacy}};
}

json to_json(const FidelityVerdict& v) {
  json fs = json::array();
  for (const auto& d : v.failures) {
    fs.push_back({{"member", d.member}, {"role", d.role}, {"expected", d.expected}, {"actual", d.actual}});
  }
  return {{"passed", v.passed()}, {"failures", fs}};
}

}  // namespace swarmkit::io
