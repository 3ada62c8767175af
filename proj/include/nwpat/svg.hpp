#pragma once

#include <string>

#include "nwpat/mask.hpp"
#include "nwpat/network_state.hpp"

namespace nwpat {

// One line element per wire piece between junction sites, colored by the
// adjacent junction state (broken-stub pieces darkest). Optional mask overlay
// as translucent rectangles. Deterministic element order. Networks above
// 100k wires are rejected; subsample before rendering.
void render_svg(const NetworkState& state, const RegionMask* mask, const std::string& path,
                double stub_length_diameters = 2.0);

} // namespace nwpat
