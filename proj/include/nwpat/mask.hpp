#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwpat/common.hpp"

namespace nwpat {

// Binary photomask raster. bit 1 = EXPOSED (conductive-to-be), 0 = SHADOWED.
// Row 0 of the stored raster is the bottom of the domain (y = 0); the PBM
// loader flips file rows, which follow the top-down image convention.
struct RegionMask {
  int width_px = 0;
  int height_px = 0;
  double pitch_um = 0.0;
  std::vector<std::uint8_t> bits; // row-major [iy * width_px + ix]

  // A point belongs to the pixel containing it; points exactly on a pixel
  // boundary go to the lower-index pixel.
  int pixel_x(double x_um) const { return pixel_of(x_um, width_px); }
  int pixel_y(double y_um) const { return pixel_of(y_um, height_px); }
  bool exposed_at(const Vec2& p_um) const {
    return bits[static_cast<std::size_t>(pixel_y(p_um.y)) * width_px + pixel_x(p_um.x)] != 0;
  }

  std::size_t exposed_count() const;
  std::size_t shadowed_count() const { return bits.size() - exposed_count(); }

  double width_um() const { return width_px * pitch_um; }
  double height_um() const { return height_px * pitch_um; }

  // Raster extents must match the network domain within half a pitch.
  void validate_against(const Rect& domain) const;

private:
  int pixel_of(double v_um, int count) const {
    double scaled = v_um / pitch_um;
    int i = static_cast<int>(scaled);
    if (static_cast<double>(i) == scaled && i > 0) --i; // boundary tie: lower pixel
    if (i < 0) i = 0;
    if (i >= count) i = count - 1;
    return i;
  }
};

// PBM P1 (ASCII) or P4 (binary). A comment line `# pitch_um=<value>` in the
// header is mandatory and carries the physical pitch.
RegionMask load_mask_pbm(const std::string& path);
RegionMask parse_mask_pbm(const std::string& bytes, const std::string& origin);
std::string write_mask_pbm_p1(const RegionMask& mask);

enum class LineOrientation { kVertical, kHorizontal };

// Exposed stripes of the given linewidth separated by shadowed spacing,
// starting with a stripe at the low edge. Vertical stripes run along y.
RegionMask make_line_mask(const Rect& domain, double pitch_um, double linewidth_um,
                          double spacing_um,
                          LineOrientation orientation = LineOrientation::kVertical);
RegionMask make_uniform_mask(const Rect& domain, double pitch_um, bool exposed);
// Left half exposed, right half shadowed.
RegionMask make_half_mask(const Rect& domain, double pitch_um);

} // namespace nwpat
