#include "stabfs/types.hpp"

#include <sstream>

namespace stabfs {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Idle: return "Idle";
    case Status::Working: return "Working";
    case Status::Power: return "Power";
    case Status::WeakE: return "WeakE";
    case Status::StrongE: return "StrongE";
  }
  return "?";
}

std::string_view to_string(Phase p) { return p == Phase::A ? "a" : "b"; }

Status parse_status(std::string_view name) {
  for (Status s : kAllStatuses) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown status '" + std::string(name) + "'");
}

Phase parse_phase(std::string_view name) {
  if (name == "a") return Phase::A;
  if (name == "b") return Phase::B;
  throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

std::size_t Configuration::Hash::operator()(const Configuration& c) const {
  // FNV-1a over the field values.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& s : c.states_) {
    mix(s.parent ? *s.parent + 1 : 0);
    mix(s.tree_parent ? *s.tree_parent + 1 : 0);
    mix((static_cast<std::uint64_t>(s.color) << 8) | (static_cast<std::uint64_t>(s.status) << 1) |
        static_cast<std::uint64_t>(s.phase));
  }
  return static_cast<std::size_t>(h);
}

std::string to_string(const ProcessState& s) {
  std::ostringstream out;
  out << "(P=" << (s.parent ? std::to_string(*s.parent) : "-")
      << ",TS=" << (s.tree_parent ? std::to_string(*s.tree_parent) : "-")
      << ",C=" << int(s.color) << ",S=" << to_string(s.status) << ",ph=" << to_string(s.phase)
      << ")";
  return out.str();
}

}  // namespace stabfs
