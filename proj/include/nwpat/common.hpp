#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nwpat {

// Physical constants, SI unless noted.
inline constexpr double kBoltzmannJ = 1.380649e-23;    // J/K
inline constexpr double kBoltzmannEv = 8.617333262e-5; // eV/K
inline constexpr double kLightSpeedM = 299792458.0;    // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kCelsiusOffset = 273.15;

// Geometric coincidence tolerance, micrometers.
inline constexpr double kGeomTolUm = 1e-9;

// Validation failures exit the CLI with code 1, model/runtime failures with 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const = default;

  double norm() const { return std::hypot(x, y); }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle, [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
};

// Static chunked parallel loop. Work items must write to disjoint state so
// the result is independent of the thread count. threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

int resolve_thread_count(int requested);

} // namespace nwpat
