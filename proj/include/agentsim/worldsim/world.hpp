#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace agentsim::worldsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  static Vec2 from_angle(double radians) { return {std::cos(radians), std::sin(radians)}; }
};

struct Aabb {
  Vec2 half;  // half extents
};
struct Circle {
  double radius = 0.0;
};
using Shape = std::variant<Aabb, Circle>;

using BodyId = int;

struct Body {
  BodyId id = -1;
  std::string tag;
  Shape shape = Aabb{{0.5, 0.5}};
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;  // constant per-body acceleration (gravity for the Tennis ball)
  // Kinematic bodies move; the rest are static colliders.
  bool kinematic = false;
  // Non-solid bodies (goal zones, food) report overlaps but never block.
  bool solid = true;
  bool enabled = true;
  int z_order = 0;
};

struct Contact {
  BodyId a = -1;  // a < b
  BodyId b = -1;
  Vec2 normal;    // unit vector pointing from a toward b
  double depth = 0.0;
};

struct RayHit {
  BodyId body = -1;
  std::string tag;
  double fraction = 1.0;  // distance / max_length, in [0, 1]
};

struct Bounds {
  Vec2 min;
  Vec2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

using BodyFilter = std::function<bool(const Body&)>;

// Penetration of two shapes; nullopt when they do not overlap (touching
// counts as not overlapping). Normal points from `a` toward `b`.
std::optional<Contact> penetration(const Body& a, const Body& b);

// Distance along a unit-direction ray at which it first meets the body, or
// nullopt. Origin inside the body yields 0.
std::optional<double> ray_entry(const Body& body, Vec2 origin, Vec2 unit_dir);

// Point containment with half-open AABB extents [lo, hi).
bool contains_point(const Body& body, Vec2 p);

class World {
 public:
  explicit World(Bounds bounds = {{0, 0}, {1, 1}},
                 double max_speed = std::numeric_limits<double>::infinity())
      : bounds_(bounds), max_speed_(max_speed) {}

  BodyId add_body(Body body);
  Body& body(BodyId id) { return bodies_.at(static_cast<std::size_t>(id)); }
  const Body& body(BodyId id) const { return bodies_.at(static_cast<std::size_t>(id)); }
  std::span<const Body> bodies() const { return bodies_; }
  void clear() { bodies_.clear(); }

  const Bounds& bounds() const { return bounds_; }
  void set_bounds(Bounds b) { bounds_ = b; }
  double max_speed() const { return max_speed_; }

  // Semi-implicit Euler step for every enabled kinematic body followed by
  // static collision resolution. Returns all contacts (resolved and
  // overlap-only) sorted by (a, b).
  std::vector<Contact> integrate_and_collide(double dt);

  // Projects every kinematic solid body out of static solid geometry along
  // the minimum translation and removes the inbound velocity component.
  // Returns the contacts that required a correction.
  std::vector<Contact> resolve_static();

  // Nearest intersection among enabled bodies accepted by `filter`.
  std::optional<RayHit> raycast(Vec2 origin, Vec2 direction, double max_length,
                                const BodyFilter& filter = {}) const;

  // Highest z-order enabled body containing `p` (later id wins ties).
  std::optional<BodyId> topmost_at(Vec2 p, const BodyFilter& filter = {}) const;

 private:
  void clamp_speed(Body& b) const;

  Bounds bounds_;
  double max_speed_;
  std::vector<Body> bodies_;
};

}  // namespace agentsim::worldsim
