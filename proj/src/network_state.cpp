#include "nwpat/network_state.hpp"

namespace nwpat {

const char* to_string(NetworkModifier m) {
  switch (m) {
    case NetworkModifier::kRaw: return "raw";
    case NetworkModifier::kDpinOnly: return "dpin";
    case NetworkModifier::kDa: return "da";
  }
  return "?";
}

NetworkState NetworkState::create(WireSet ws, std::uint64_t seed) {
  NetworkState st;
  st.junctions = find_junctions(ws);
  st.wires = std::move(ws);
  st.stream_seed = seed;
  return st;
}

CensusRow NetworkState::summarize(const std::string& step_kind) const {
  CensusRow row;
  row.step_index = steps_applied;
  row.step_kind = step_kind;
  for (const Junction& j : junctions) {
    switch (j.state) {
      case JunctionState::kPristine: row.pristine++; break;
      case JunctionState::kDaDecorated: row.da_decorated++; break;
      case JunctionState::kWelded: row.welded++; break;
      case JunctionState::kBroken: row.broken++; break;
    }
  }
  return row;
}

void NetworkState::record_census(const std::string& step_kind) {
  census.push_back(summarize(step_kind));
}

} // namespace nwpat
