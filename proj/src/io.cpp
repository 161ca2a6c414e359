#include "stabfs/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stabfs/state_space.hpp"

namespace stabfs {

using nlohmann::json;

ParseError::ParseError(const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + what : what),
      line_(line) {}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t at = e.byte ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line_of(text, at));
  }
}

NodeId as_node(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<NodeId>(j.get<long long>());
}

std::optional<NodeId> as_pointer(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return as_node(*it, key);
}

}  // namespace

Topology parse_topology(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("topology must be a JSON object");
  if (!j.contains("edges") || !j["edges"].is_array()) throw ParseError("missing edges array");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2) throw ParseError("each edge must be a pair [u, v]");
    edges.emplace_back(as_node(e[0], "edge endpoint"), as_node(e[1], "edge endpoint"));
  }
  const NodeId root = j.contains("root") ? as_node(j["root"], "root") : 0;
  std::optional<std::size_t> nodes;
  if (j.contains("nodes")) nodes = as_node(j["nodes"], "nodes");
  return Topology::build(edges, root, nodes);
}

std::string format_topology(const Topology& topology) {
  json j;
  j["nodes"] = topology.size();
  j["root"] = topology.root();
  j["edges"] = json::array();
  for (const auto& [u, v] : topology.edges()) j["edges"].push_back({u, v});
  return j.dump() + "\n";
}

Configuration parse_configuration(std::string_view text, const Topology& topology) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("configuration must be a JSON object keyed by node id");
  Configuration config(topology.size());
  std::vector<char> seen(topology.size(), 0);
  for (const auto& [key, value] : j.items()) {
    NodeId u = 0;
    try {
      std::size_t used = 0;
      const unsigned long parsed = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
      u = static_cast<NodeId>(parsed);
    } catch (const std::exception&) {
      throw ParseError("bad node id '" + key + "'");
    }
    if (u >= topology.size()) throw ParseError("node " + key + " is not in the topology");
    if (!value.is_object()) throw ParseError("state of node " + key + " must be an object");
    ProcessState s;
    s.parent = as_pointer(value, "P");
    s.tree_parent = as_pointer(value, "TS");
    if (!value.contains("C") || !value["C"].is_number_integer()) {
      throw ParseError("node " + key + ": C must be 0 or 1");
    }
    s.color = static_cast<std::uint8_t>(value["C"].get<int>());
    try {
      s.status = parse_status(value.at("S").get<std::string>());
      s.phase = parse_phase(value.at("ph").get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError("node " + key + ": " + e.what());
    }
    config[u] = s;
    seen[u] = 1;
  }
  for (NodeId u = 0; u < topology.size(); ++u) {
    if (!seen[u]) throw ParseError("node " + std::to_string(u) + " has no state");
  }
  try {
    validate(topology, config);
  } catch (const ContractError& e) {
    throw ParseError(e.what());
  }
  return config;
}

std::string format_configuration(const Configuration& config) {
  json j = json::object();
  for (NodeId u = 0; u < config.size(); ++u) {
    const ProcessState& s = config[u];
    json e;
    e["P"] = s.parent ? json(*s.parent) : json(nullptr);
    e["TS"] = s.tree_parent ? json(*s.tree_parent) : json(nullptr);
    e["C"] = s.color;
    e["S"] = std::string(to_string(s.status));
    e["ph"] = std::string(to_string(s.phase));
    j[std::to_string(u)] = e;
  }
  return j.dump() + "\n";
}

std::vector<std::vector<NodeId>> parse_script(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_array()) throw ParseError("adversary script must be an array of node arrays");
  std::vector<std::vector<NodeId>> out;
  for (const auto& set : j) {
    if (!set.is_array()) throw ParseError("adversary script entries must be arrays");
    std::vector<NodeId> nodes;
    for (const auto& u : set) nodes.push_back(as_node(u, "script node"));
    out.push_back(std::move(nodes));
  }
  return out;
}

std::string format_step_record(std::size_t step, std::span<const Move> moves, std::size_t round) {
  json j;
  j["step"] = step;
  j["activated"] = json::array();
  for (const Move& m : moves) {
    json a;
    a["node"] = m.node;
    a["rule"] = std::string(to_string(m.rule.name));
    if (m.rule.connection_target) a["target"] = *m.rule.connection_target;
    j["activated"].push_back(a);
  }
  j["round"] = round;
  return j.dump();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace stabfs
