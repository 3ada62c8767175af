#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwpat/netgen.hpp"
#include "nwpat/topology.hpp"

namespace nwpat {

// Surface chemistry of the as-coated film. DPIN-only and DA inks behave
// differently under UV even where no nanoparticle decorates a junction.
enum class NetworkModifier : std::uint8_t { kRaw, kDpinOnly, kDa };

const char* to_string(NetworkModifier m);

struct CensusRow {
  int step_index = 0;
  std::string step_kind;
  std::size_t pristine = 0;
  std::size_t da_decorated = 0;
  std::size_t welded = 0;
  std::size_t broken = 0;
};

// Full process ensemble: geometry, junction states, ink flavor, and the RNG
// lineage all process draws derive from.
struct NetworkState {
  WireSet wires;
  std::vector<Junction> junctions;
  NetworkModifier modifier = NetworkModifier::kRaw;
  std::uint64_t stream_seed = 0;
  int steps_applied = 0;
  std::vector<CensusRow> census;

  static NetworkState create(WireSet ws, std::uint64_t seed);

  CensusRow summarize(const std::string& step_kind) const;
  void record_census(const std::string& step_kind);
};

} // namespace nwpat
