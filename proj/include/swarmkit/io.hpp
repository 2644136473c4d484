#pragma once

#include <string>

#include "json.hpp"

#include "swarmkit/machine.hpp"
#include "swarmkit/protocol.hpp"
#include "swarmkit/runtime.hpp"
#include "swarmkit/wellformed.hpp"

namespace swarmkit::io {

using nlohmann::json;

// Unreadable or unparsable input file.
class IoError : public Error {
 public:
  using Error::Error;
};

json read_file(const std::string& path);
void write_file(const std::string& path, const json& j);
// Two-space indented text with a trailing newline; object keys are sorted.
std::string dump(const json& j);

RawProtocol raw_protocol_from_json(const json& j);
SwarmProtocol protocol_from_json(const json& j);
json to_json(const SwarmProtocol& g);

Subscription subscription_from_json(const json& j);
json to_json(const Subscription& s);

ConcurrencyRelation concurrency_from_json(const json& j);
json to_json(const ConcurrencyRelation& c);

Machine machine_from_json(const json& j);
json to_json(const Machine& m);

json to_json(const WfReport& r);
json to_json(const UpdatingTypeSet& u);

SwarmSpec swarm_from_json(const json& j);
json to_json(const SwarmSpec& s);

Event event_from_json(const json& j);
json to_json(const Event& e);
Log log_from_json(const json& j);
json to_json(const Log& l);

// {"trace": [...], "members": [...], "global": [...], "legacy": bool}
json trace_to_json(const SimResult& r, const SwarmSpec& spec, bool legacy);
json to_json(const FidelityVerdict& v);

}  // namespace swarmkit::io
