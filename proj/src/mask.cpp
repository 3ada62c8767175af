#include "nwpat/mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nwpat {

std::size_t RegionMask::exposed_count() const {
  std::size_t n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

void RegionMask::validate_against(const Rect& domain) const {
  if (width_px <= 0 || height_px <= 0 || !(pitch_um > 0.0))
    throw ValidationError("mask: degenerate raster");
  if (bits.size() != static_cast<std::size_t>(width_px) * height_px)
    throw ValidationError("mask: bit count does not match dimensions");
  double half = 0.5 * pitch_um;
  if (std::abs(width_um() - domain.width()) > half ||
      std::abs(height_um() - domain.height()) > half)
    throw ValidationError("mask: raster extents do not match the network domain");
}

namespace {

// Pulls whitespace-separated header tokens, skipping `#` comments but
// remembering the pitch comment.
struct PbmHeaderReader {
  const std::string& data;
  std::size_t pos = 0;
  bool pitch_found = false;
  double pitch = 0.0;
  std::string origin;

  void skip_space_and_comments() {
    while (pos < data.size()) {
      char c = data[pos];
      if (c == '#') {
        std::size_t eol = data.find('\n', pos);
        std::string comment = data.substr(pos, eol == std::string::npos ? std::string::npos
                                                                        : eol - pos);
        double v;
        if (std::sscanf(comment.c_str(), "# pitch_um=%lf", &v) == 1 ||
            std::sscanf(comment.c_str(), "#pitch_um=%lf", &v) == 1) {
          pitch_found = true;
          pitch = v;
        }
        if (eol == std::string::npos) pos = data.size();
        else pos = eol + 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) &&
           data[pos] != '#')
      ++pos;
    if (start == pos) throw ValidationError(origin + ": truncated PBM header");
    return data.substr(start, pos - start);
  }

  int int_token(const char* what) {
    std::string t = token();
    try {
      return std::stoi(t);
    } catch (...) {
      throw ValidationError(origin + ": bad PBM " + what + " '" + t + "'");
    }
  }
};

} // namespace

RegionMask parse_mask_pbm(const std::string& bytes, const std::string& origin) {
  PbmHeaderReader rd{bytes};
  rd.origin = origin;
  std::string magic = rd.token();
  if (magic != "P1" && magic != "P4")
    throw ValidationError(origin + ": not a PBM file (magic '" + magic + "')");
  int width = rd.int_token("width");
  int height = rd.int_token("height");
  if (width <= 0 || height <= 0) throw ValidationError(origin + ": bad PBM dimensions");

  RegionMask mask;
  mask.width_px = width;
  mask.height_px = height;
  mask.bits.assign(static_cast<std::size_t>(width) * height, 0);

  auto store = [&](int file_row, int col, bool on) {
    int iy = height - 1 - file_row; // image rows are top-down
    mask.bits[static_cast<std::size_t>(iy) * width + col] = on ? 1 : 0;
  };

  if (magic == "P1") {
    int count = 0;
    std::size_t p = rd.pos;
    while (p < bytes.size() && count < width * height) {
      char c = bytes[p];
      if (c == '#') {
        std::size_t eol = bytes.find('\n', p);
        p = eol == std::string::npos ? bytes.size() : eol + 1;
        continue;
      }
      if (c == '0' || c == '1') {
        store(count / width, count % width, c == '1');
        ++count;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw ValidationError(origin + ": unexpected character in P1 data");
      }
      ++p;
    }
    if (count != width * height) throw ValidationError(origin + ": truncated P1 data");
  } else {
    rd.skip_space_and_comments();
    // P4: after the header exactly one whitespace byte precedes the raster;
    // skip_space_and_comments has already consumed it.
    std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
    if (bytes.size() - rd.pos < row_bytes * height)
      throw ValidationError(origin + ": truncated P4 data");
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        std::uint8_t byte =
            static_cast<std::uint8_t>(bytes[rd.pos + r * row_bytes + c / 8]);
        bool on = (byte >> (7 - c % 8)) & 1;
        store(r, c, on);
      }
  }

  if (!rd.pitch_found)
    throw ValidationError(origin + ": missing mandatory '# pitch_um=<value>' comment");
  if (!(rd.pitch > 0.0)) throw ValidationError(origin + ": pitch must be positive");
  mask.pitch_um = rd.pitch;
  return mask;
}

RegionMask load_mask_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("mask: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mask_pbm(ss.str(), path);
}

std::string write_mask_pbm_p1(const RegionMask& mask) {
  std::ostringstream os;
  char head[64];
  std::snprintf(head, sizeof head, "P1\n# pitch_um=%.9g\n%d %d\n", mask.pitch_um,
                mask.width_px, mask.height_px);
  os << head;
  for (int r = 0; r < mask.height_px; ++r) {
    int iy = mask.height_px - 1 - r;
    for (int c = 0; c < mask.width_px; ++c) {
      os << (mask.bits[static_cast<std::size_t>(iy) * mask.width_px + c] ? '1' : '0');
      os << (c + 1 == mask.width_px ? '\n' : ' ');
    }
  }
  return os.str();
}

namespace {

RegionMask raster_for(const Rect& domain, double pitch_um) {
  if (!(pitch_um > 0.0)) throw ValidationError("mask: pitch must be positive");
  RegionMask m;
  m.pitch_um = pitch_um;
  m.width_px = std::max(1, static_cast<int>(std::lround(domain.width() / pitch_um)));
  m.height_px = std::max(1, static_cast<int>(std::lround(domain.height() / pitch_um)));
  m.bits.assign(static_cast<std::size_t>(m.width_px) * m.height_px, 0);
  m.validate_against(domain);
  return m;
}

} // namespace

RegionMask make_line_mask(const Rect& domain, double pitch_um, double linewidth_um,
                          double spacing_um, LineOrientation orientation) {
  if (!(linewidth_um > 0.0)) throw ValidationError("mask: zero-width line mask rejected");
  if (spacing_um < 0.0) throw ValidationError("mask: negative spacing");
  RegionMask m = raster_for(domain, pitch_um);
  double period = linewidth_um + spacing_um;
  auto exposed_at = [&](int i) {
    double c = (i + 0.5) * pitch_um;
    return std::fmod(c, period) < linewidth_um;
  };
  if (orientation == LineOrientation::kVertical) {
    for (int ix = 0; ix < m.width_px; ++ix)
      if (exposed_at(ix))
        for (int iy = 0; iy < m.height_px; ++iy)
          m.bits[static_cast<std::size_t>(iy) * m.width_px + ix] = 1;
  } else {
    for (int iy = 0; iy < m.height_px; ++iy)
      if (exposed_at(iy))
        for (int ix = 0; ix < m.width_px; ++ix)
          m.bits[static_cast<std::size_t>(iy) * m.width_px + ix] = 1;
  }
  return m;
}

RegionMask make_uniform_mask(const Rect& domain, double pitch_um, bool exposed) {
  RegionMask m = raster_for(domain, pitch_um);
  if (exposed) std::fill(m.bits.begin(), m.bits.end(), 1);
  return m;
}

RegionMask make_half_mask(const Rect& domain, double pitch_um) {
  RegionMask m = raster_for(domain, pitch_um);
  for (int iy = 0; iy < m.height_px; ++iy)
    for (int ix = 0; ix < m.width_px / 2; ++ix)
      m.bits[static_cast<std::size_t>(iy) * m.width_px + ix] = 1;
  return m;
}

} // namespace nwpat
