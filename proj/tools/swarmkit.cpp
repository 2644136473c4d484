#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmkit/compose.hpp"
#include "swarmkit/generator.hpp"
#include "swarmkit/io.hpp"
#include "swarmkit/machine.hpp"
#include "swarmkit/runtime.hpp"
#include "swarmkit/subscription.hpp"
#include "swarmkit/wellformed.hpp"

using namespace swarmkit;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Usage error detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Output {
  bool json = false;
  std::string out;
};

// "-" reads standard input.
json read_input(const std::string& path) {
  if (path != "-") return io::read_file(path);
  try {
    return json::parse(std::cin);
  } catch (const json::exception& e) {
    throw io::IoError(std::string("cannot parse standard input: ") + e.what());
  }
}

std::vector<SwarmProtocol> read_protocols(const std::vector<std::string>& paths) {
  std::vector<SwarmProtocol> gs;
  for (const auto& p : paths) gs.push_back(io::protocol_from_json(read_input(p)));
  return gs;
}

std::vector<Subscription> read_subscriptions(const std::vector<std::string>& paths) {
  std::vector<Subscription> out;
  for (const auto& p : paths) out.push_back(io::subscription_from_json(read_input(p)));
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::set<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

// JSON goes to --out when given, to stdout under --json, otherwise the text is printed.
void emit(const Output& o, const json& j, const std::string& text) {
  if (!o.out.empty()) io::write_file(o.out, j);
  if (o.json) {
    std::cout << io::dump(j);
  } else if (o.out.empty()) {
    std::cout << text;
  }
}

std::string sigma_text(const Subscription& s) {
  std::string out;
  for (const auto& [r, ts] : s.entries()) out += "  " + r + ": {" + join(ts) + "}\n";
  return out;
}

std::string report_text(const WfReport& r) {
  std::string out;
  for (const auto& f : io::to_json(r)["failures"]) {
    out += "  " + f["check"].get<std::string>() + ": " + f["message"].get<std::string>() + "\n";
  }
  return out;
}

// check

struct CheckArgs {
  std::string protocol, subscription;
  std::vector<std::string> components;
};

int run_check(const CheckArgs& a, const Output& o) {
  auto g = io::protocol_from_json(read_input(a.protocol));
  auto sigma = io::subscription_from_json(read_input(a.subscription));
  auto parts = read_protocols(a.components);
  auto res = check_well_formed(g, sigma, parts.empty() ? nullptr : &parts);
  json j = io::to_json(res.report);
  j["updating"] = io::to_json(res.updating);
  j["concurrent"] = io::to_json(res.conc);
  j["rulesVerdict"] = res.rules_verdict ? json(*res.rules_verdict) : json(nullptr);
  std::string text = std::string(res.passed() ? "well-formed\n" : "not well-formed\n") + report_text(res.report);
  emit(o, j, text);
  return res.passed() ? kOk : kFail;
}

// compose

struct ComposeArgs {
  std::vector<std::string> protocols;
  std::string roles;
  std::size_t cap = 0;
};

int run_compose(const ComposeArgs& a, const Output& o) {
  auto gs = read_protocols(a.protocols);
  ComposeOptions opts;
  opts.cap = a.cap;
  if (!a.roles.empty()) {
    auto rs = split_list(a.roles);
    opts.roles = RoleSet(rs.begin(), rs.end());
  }
  try {
    auto c = compose(gs, opts);
    json j = {{"composition", io::to_json(c)},
              {"states", c.state_count()},
              {"transitions", c.edge_count()},
              {"restrictedTransitions", restricted_transition_count(gs, opts)}};
    emit(o, j,
         "composition: " + std::to_string(c.state_count()) + " states, " + std::to_string(c.edge_count()) +
             " transitions, " + std::to_string(j["restrictedTransitions"].get<std::size_t>()) +
             " component transitions lost\n");
    return kOk;
  } catch (const InterfaceError& e) {
    json vs = json::array();
    std::string text = std::string("not interfacing: ") + e.what() + "\n";
    for (const auto& v : e.violations()) {
      vs.push_back({{"eventType", v.type}, {"role", v.role}, {"otherRole", v.other_role}});
      text += "  " + v.type + " emitted by " + v.role + " and " + v.other_role + "\n";
    }
    emit(o, json{{"error", "interface"}, {"message", e.what()}, {"violations", vs}}, text);
    return kFail;
  }
}

// subscribe

struct SubscribeArgs {
  std::vector<std::string> protocols, subs;
  std::string mode = "alg1";
};

int run_subscribe(const SubscribeArgs& a, const Output& o) {
  auto gs = read_protocols(a.protocols);
  auto sigmas = read_subscriptions(a.subs);
  json j;
  Subscription sigma;
  if (a.mode == "alg1") {
    auto r = generate_subscription(gs, sigmas);
    sigma = r.sigma;
    j = {{"subscription", io::to_json(r.sigma)},
         {"updating", io::to_json(r.updating)},
         {"concurrent", io::to_json(r.conc())},
         {"interfacingRoles", r.ifr},
         {"stats", {{"eFrac", e_frac(r.sigma, gs)}, {"iterations", r.iterations}, {"loopPicks", r.loop_picks}}}};
  } else {
    auto r = exact_subscription(gs, sigmas);
    sigma = r.sigma;
    j = {{"subscription", io::to_json(r.sigma)},
         {"updating", io::to_json(r.updating)},
         {"concurrent", io::to_json(r.conc)},
         {"stats", {{"eFrac", e_frac(r.sigma, gs)}, {"compositionStates", r.composition.state_count()}}}};
  }
  std::ostringstream text;
  text << a.mode << " subscription (E_frac " << j["stats"]["eFrac"].get<double>() << "):\n" << sigma_text(sigma);
  emit(o, j, text.str());
  return kOk;
}

// project

struct ProjectArgs {
  std::string protocol, subscription, roles;
  bool minimal = false;
};

int run_project(const ProjectArgs& a, const Output& o) {
  auto g = io::protocol_from_json(read_input(a.protocol));
  auto sigma = io::subscription_from_json(read_input(a.subscription));
  std::vector<Role> roles = split_list(a.roles);
  if (roles.empty()) roles.assign(g.roles().begin(), g.roles().end());
  auto spec = realise(g, sigma, roles);
  std::string text;
  for (auto& m : spec.members) {
    if (a.minimal) {
      auto min = minimize(m.machine);
      min.set_role(m.role);
      min.set_realisation(spec.updating, spec.conc);
      m.machine = std::move(min);
    }
    text += m.role + ": " + std::to_string(m.machine.state_count()) + " states, " +
            std::to_string(m.machine.transition_count()) + " transitions\n";
  }
  emit(o, io::to_json(spec), text);
  return kOk;
}

// adapt

struct AdaptArgs {
  std::vector<std::string> protocols, subs, swarms;
  std::string machine, role;
  std::size_t index = 0;
};

int run_adapt(const AdaptArgs& a, const Output& o) {
  auto gs = read_protocols(a.protocols);
  if (!a.swarms.empty()) {
    if (a.swarms.size() != gs.size()) throw UsageError("adapt: one --swarm per protocol is required");
    std::vector<std::vector<std::pair<Machine, Role>>> swarms;
    std::vector<Subscription> sigmas;
    for (const auto& p : a.swarms) {
      auto s = io::swarm_from_json(read_input(p));
      std::vector<std::pair<Machine, Role>> members;
      for (auto& m : s.members) members.emplace_back(std::move(m.machine), m.role);
      swarms.push_back(std::move(members));
      sigmas.push_back(s.sigma);
    }
    auto spec = compose_swarm(swarms, gs, sigmas);
    std::string text = "composed swarm: " + std::to_string(spec.members.size()) + " members\n" + sigma_text(spec.sigma);
    emit(o, io::to_json(spec), text);
    return kOk;
  }
  if (a.machine.empty() || a.role.empty()) throw UsageError("adapt: give --machine and --role, or --swarm files");
  if (a.index >= gs.size()) throw UsageError("adapt: --index out of range");
  auto m = io::machine_from_json(read_input(a.machine));
  auto alg = generate_subscription(gs, read_subscriptions(a.subs));
  auto steps = adapt_machine_steps(m, gs, a.role, a.index, alg.sigma, alg.updating.types(), alg.conc());
  steps.machine.set_role(a.role);
  json j = {{"machine", io::to_json(steps.machine)}, {"withHome", io::to_json(steps.with_home)}};
  emit(o, j,
       "adapted " + a.role + ": " + std::to_string(steps.machine.state_count()) + " states, " +
           std::to_string(steps.machine.transition_count()) + " transitions\n");
  return kOk;
}

// simulate

struct SimulateArgs {
  std::string swarm;
  std::size_t steps = 50;
  std::uint64_t seed = 0;
  bool legacy = false;
  bool no_final_propagation = false;
};

int run_simulate(const SimulateArgs& a, const Output& o) {
  auto spec = io::swarm_from_json(read_input(a.swarm));
  SimOptions opts;
  opts.seed = a.seed;
  opts.steps = a.steps;
  opts.legacy = a.legacy;
  opts.final_propagation = !a.no_final_propagation;
  opts.check_every_step = spec.protocol.has_value();
  auto r = simulate(spec, spec.protocol, opts);
  json j = io::trace_to_json(r, spec, a.legacy);
  if (spec.protocol) {
    j["verdict"] = io::to_json(r.final_verdict);
    j["firstFailure"] = r.first_failure ? json{{"step", r.first_failure->first},
                                                {"verdict", io::to_json(r.first_failure->second)}}
                                        : json(nullptr);
  }
  std::string text = std::to_string(r.trace.size()) + " steps, " + std::to_string(r.global.size()) + " events\n";
  if (spec.protocol) {
    text += r.first_failure ? "fidelity violated after step " + std::to_string(r.first_failure->first) + "\n"
                            : "fidelity held at every step\n";
  }
  emit(o, j, text);
  return r.first_failure ? kFail : kOk;
}

// fidelity

struct FidelityArgs {
  std::string trace, protocol, subscription;
};

int run_fidelity(const FidelityArgs& a, const Output& o) {
  auto t = read_input(a.trace);
  auto g = io::protocol_from_json(read_input(a.protocol));
  auto sigma = io::subscription_from_json(read_input(a.subscription));
  if (!t.is_object() || !t.contains("global") || !t.contains("members")) {
    throw ValidationError("trace: expected fields 'global' and 'members'");
  }
  auto det = check_determinacy(g, sigma, concurrent_pairs(g));
  SwarmSpec spec;
  spec.sigma = sigma;
  spec.updating = det.updating.types();
  spec.conc = concurrent_pairs(g);
  for (const auto& m : t.at("members")) {
    SwarmMember mem;
    mem.role = m.at("role").get<std::string>();
    mem.machine = io::machine_from_json(m.at("machine"));
    mem.machine.set_role(mem.role);
    spec.members.push_back(std::move(mem));
  }
  bool legacy = t.value("legacy", false);
  auto v = check_fidelity(io::log_from_json(t.at("global")), spec, g, legacy);
  std::string text = v.passed() ? "faithful\n" : "not faithful\n";
  for (const auto& d : v.failures) {
    text += "  member " + std::to_string(d.member) + " (" + d.role + ") diverges\n";
  }
  emit(o, io::to_json(v), text);
  return v.passed() ? kOk : kFail;
}

// bench

struct BenchArgs {
  std::size_t n = 5;
  std::uint64_t seed = 42;
  std::vector<std::size_t> sizes{2, 3, 4, 5, 6, 7, 8};
  std::size_t repetitions = 3;
  std::size_t cap = 0;
  bool parallel = false;
  std::string csv;
};

int run_bench(const BenchArgs& a, const Output& o) {
  SuiteParams p;
  p.sizes = a.sizes;
  p.instances_per_size = a.n;
  p.seed = a.seed;
  p.repetitions = a.repetitions;
  p.cap = a.cap ? a.cap : expansion_cap();
  p.parallel = a.parallel;
  auto records = run_suite(p);
  std::string csv = csv_header() + "\n";
  for (const auto& r : records) csv += to_csv(r) + "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw io::IoError("cannot write " + o.out);
    f << csv;
  }
  if (o.json) {
    json arr = json::array();
    for (const auto& r : records) {
      auto opt = [](const auto& x) { return x ? json(*x) : json(nullptr); };
      arr.push_back({{"instance", r.instance},
                     {"nProtocols", r.n_protocols},
                     {"totalSize", r.total_size},
                     {"transitions", opt(r.transitions)},
                     {"alg1Us", r.alg1_us},
                     {"alg1Efrac", r.alg1_efrac},
                     {"alg1Size", r.alg1_size},
                     {"exactUs", opt(r.exact_us)},
                     {"exactEfrac", opt(r.exact_efrac)},
                     {"exactSize", opt(r.exact_size)},
                     {"exactSkipped", r.exact_skipped}});
    }
    std::cout << io::dump(arr);
  } else if (o.out.empty()) {
    std::cout << csv;
  }
  return kOk;
}

void add_output(CLI::App* cmd, Output& o) {
  cmd->add_flag("--json", o.json, "Print the result as JSON on standard output");
  cmd->add_option("--out", o.out, "Write the JSON result (CSV for bench) to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmkit: swarm protocol composition, subscriptions, projection and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "swarmkit 1.0");
  app.footer("Exit codes: 0 success, 1 check failure or fidelity violation, 2 usage or IO error.\n"
             "SWARMKIT_EXPANSION_CAP overrides the state cap of the exact subscription algorithm.\n"
             "Input file arguments accept '-' for standard input.");

  Output out;

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Check well-formedness of a protocol under a subscription");
  c_check->add_option("--protocol", check.protocol, "Protocol JSON")->required();
  c_check->add_option("--subscription", check.subscription, "Subscription JSON")->required();
  c_check->add_option("--components", check.components, "Component protocols of a composition (confusion-freeness item 1)");
  add_output(c_check, out);

  ComposeArgs comp;
  auto* c_compose = app.add_subcommand("compose", "Compose protocols");
  c_compose->add_option("protocols", comp.protocols, "Protocol JSON files")->required();
  c_compose->add_option("--roles", comp.roles, "Comma-separated interfacing roles overriding the derived ones");
  c_compose->add_option("--cap", comp.cap, "Maximum product states (0: unbounded)");
  add_output(c_compose, out);

  SubscribeArgs sub;
  auto* c_sub = app.add_subcommand("subscribe", "Compute a well-formed subscription for a composition");
  c_sub->add_option("protocols", sub.protocols, "Component protocol JSON files")->required();
  c_sub->add_option("--mode", sub.mode, "alg1 (compositional) or exact (expands the composition)")
      ->check(CLI::IsMember({"alg1", "exact"}));
  c_sub->add_option("--subs", sub.subs, "Input subscriptions to include");
  add_output(c_sub, out);

  ProjectArgs proj;
  auto* c_proj = app.add_subcommand("project", "Project a protocol onto roles; prints a swarm specification");
  c_proj->add_option("--protocol", proj.protocol, "Protocol JSON")->required();
  c_proj->add_option("--subscription", proj.subscription, "Subscription JSON")->required();
  c_proj->add_option("--roles", proj.roles, "Comma-separated member roles, repeated for replicas (default: every role once)");
  c_proj->add_flag("--minimize", proj.minimal, "Minimize each machine");
  add_output(c_proj, out);

  AdaptArgs adapt;
  auto* c_adapt = app.add_subcommand("adapt", "Adapt a machine, or whole swarms, to a composition");
  c_adapt->add_option("protocols", adapt.protocols, "Component protocol JSON files")->required();
  c_adapt->add_option("--machine", adapt.machine, "Machine JSON to adapt");
  c_adapt->add_option("--role", adapt.role, "Role the machine plays");
  c_adapt->add_option("--index", adapt.index, "Index of the machine's home protocol");
  c_adapt->add_option("--subs", adapt.subs, "Input subscriptions for the compositional subscription");
  c_adapt->add_option("--swarm", adapt.swarms, "Swarm specification per protocol; composes the swarms");
  add_output(c_adapt, out);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run a seeded random schedule of a swarm");
  c_sim->add_option("--swarm", sim.swarm, "Swarm specification JSON")->required();
  c_sim->add_option("--steps", sim.steps, "Maximum scheduler steps");
  c_sim->add_option("--seed", sim.seed, "Scheduler seed");
  c_sim->add_flag("--legacy", sim.legacy, "Disable branch tracking");
  c_sim->add_flag("--no-final-propagation", sim.no_final_propagation, "Do not deliver outstanding events at the end");
  add_output(c_sim, out);

  FidelityArgs fid;
  auto* c_fid = app.add_subcommand("fidelity", "Check eventual fidelity of a simulation trace");
  c_fid->add_option("--trace", fid.trace, "Trace JSON from simulate")->required();
  c_fid->add_option("--protocol", fid.protocol, "Protocol JSON")->required();
  c_fid->add_option("--subscription", fid.subscription, "Subscription JSON")->required();
  add_output(c_fid, out);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Benchmark the compositional and exact subscription algorithms");
  c_bench->add_option("--n", bench.n, "Instances per protocol count");
  c_bench->add_option("--seed", bench.seed, "Generator seed");
  c_bench->add_option("--sizes", bench.sizes, "Protocol counts")->delimiter(',');
  c_bench->add_option("--repetitions", bench.repetitions, "Timing repetitions (median reported)");
  c_bench->add_option("--cap", bench.cap, "State cap of the exact algorithm (default: SWARMKIT_EXPANSION_CAP or 10^6)");
  c_bench->add_flag("--parallel", bench.parallel, "Run instances on a worker pool");
  add_output(c_bench, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c_check) return run_check(check, out);
    if (*c_compose) return run_compose(comp, out);
    if (*c_sub) return run_subscribe(sub, out);
    if (*c_proj) return run_project(proj, out);
    if (*c_adapt) return run_adapt(adapt, out);
    if (*c_sim) return run_simulate(sim, out);
    if (*c_fid) return run_fidelity(fid, out);
    if (*c_bench) return run_bench(bench, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
