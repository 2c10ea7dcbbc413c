#include "agentsim/worldsim/world.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace agentsim::worldsim {

namespace {

constexpr double kPenetrationSlop = 1e-12;
constexpr int kResolvePasses = 4;

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

std::optional<Contact> box_box(const Body& a, const Aabb& sa, const Body& b, const Aabb& sb) {
  const Vec2 d = b.position - a.position;
  const double px = sa.half.x + sb.half.x - std::abs(d.x);
  const double py = sa.half.y + sb.half.y - std::abs(d.y);
  if (px <= kPenetrationSlop || py <= kPenetrationSlop) return std::nullopt;
  Contact c;
  if (px < py) {
    c.normal = {sign_or_one(d.x), 0.0};
    c.depth = px;
  } else {
    c.normal = {0.0, sign_or_one(d.y)};
    c.depth = py;
  }
  return c;
}

std::optional<Contact> circle_circle(const Body& a, double ra, const Body& b, double rb) {
  const Vec2 d = b.position - a.position;
  const double dist = d.norm();
  const double depth = ra + rb - dist;
  if (depth <= kPenetrationSlop) return std::nullopt;
  Contact c;
  c.normal = dist > 0.0 ? d * (1.0 / dist) : Vec2{1.0, 0.0};
  c.depth = depth;
  return c;
}

// Normal points from the circle toward the box.
std::optional<Contact> circle_box(const Body& circle, double r, const Body& box, const Aabb& s) {
  const Vec2 rel = circle.position - box.position;
  const Vec2 clamped{std::clamp(rel.x, -s.half.x, s.half.x),
                     std::clamp(rel.y, -s.half.y, s.half.y)};
  const Vec2 d = rel - clamped;  // box surface -> circle centre
  const double dist = d.norm();
  Contact c;
  if (dist > 0.0) {
    const double depth = r - dist;
    if (depth <= kPenetrationSlop) return std::nullopt;
    c.normal = d * (-1.0 / dist);
    c.depth = depth;
    return c;
  }
  // Centre inside the box: leave through the nearest face.
  const double dx = s.half.x - std::abs(rel.x);
  const double dy = s.half.y - std::abs(rel.y);
  if (dx < dy) {
    c.normal = {-sign_or_one(rel.x), 0.0};
    c.depth = dx + r;
  } else {
    c.normal = {0.0, -sign_or_one(rel.y)};
    c.depth = dy + r;
  }
  return c;
}

}  // namespace

std::optional<Contact> penetration(const Body& a, const Body& b) {
  std::optional<Contact> c;
  if (const auto* ba = std::get_if<Aabb>(&a.shape)) {
    if (const auto* bb = std::get_if<Aabb>(&b.shape)) {
      c = box_box(a, *ba, b, *bb);
    } else {
      c = circle_box(b, std::get<Circle>(b.shape).radius, a, *ba);
      if (c) c->normal = c->normal * -1.0;
    }
  } else {
    const double ra = std::get<Circle>(a.shape).radius;
    if (const auto* bb = std::get_if<Aabb>(&b.shape)) {
      c = circle_box(a, ra, b, *bb);
    } else {
      c = circle_circle(a, ra, b, std::get<Circle>(b.shape).radius);
    }
  }
  if (c) {
    c->a = a.id;
    c->b = b.id;
  }
  return c;
}

std::optional<double> ray_entry(const Body& body, Vec2 origin, Vec2 dir) {
  if (const auto* box = std::get_if<Aabb>(&body.shape)) {
    const Vec2 lo = body.position - box->half;
    const Vec2 hi = body.position + box->half;
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    const double o[2] = {origin.x, origin.y};
    const double d[2] = {dir.x, dir.y};
    const double l[2] = {lo.x, lo.y};
    const double h[2] = {hi.x, hi.y};
    for (int axis = 0; axis < 2; ++axis) {
      if (d[axis] == 0.0) {
        if (o[axis] < l[axis] || o[axis] > h[axis]) return std::nullopt;
        continue;
      }
      double ta = (l[axis] - o[axis]) / d[axis];
      double tb = (h[axis] - o[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return std::nullopt;
    }
    return t0;
  }
  const double r = std::get<Circle>(body.shape).radius;
  const Vec2 m = origin - body.position;
  const double c = m.dot(m) - r * r;
  if (c <= 0.0) return 0.0;
  const double b = m.dot(dir);
  if (b > 0.0) return std::nullopt;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  return -b - std::sqrt(disc);
}

bool contains_point(const Body& body, Vec2 p) {
  if (const auto* box = std::get_if<Aabb>(&body.shape)) {
    const Vec2 lo = body.position - box->half;
    const Vec2 hi = body.position + box->half;
    return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y;
  }
  const double r = std::get<Circle>(body.shape).radius;
  const Vec2 d = p - body.position;
  return d.dot(d) < r * r;
}

BodyId World::add_body(Body body) {
  body.id = static_cast<BodyId>(bodies_.size());
  clamp_speed(body);
  bodies_.push_back(std::move(body));
  return bodies_.back().id;
}

void World::clamp_speed(Body& b) const {
  const double speed = b.velocity.norm();
  if (speed > max_speed_) b.velocity = b.velocity * (max_speed_ / speed);
}

std::vector<Contact> World::integrate_and_collide(double dt) {
  for (auto& b : bodies_) {
    if (!b.enabled || !b.kinematic) continue;
    b.velocity += b.acceleration * dt;
    clamp_speed(b);
    b.position += b.velocity * dt;
  }
  std::vector<Contact> contacts = resolve_static();

  // Overlap-only contacts: kinematic vs kinematic, and anything vs triggers.
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const Body& a = bodies_[i];
    if (!a.enabled) continue;
    for (std::size_t j = i + 1; j < bodies_.size(); ++j) {
      const Body& b = bodies_[j];
      if (!b.enabled || (!a.kinematic && !b.kinematic)) continue;
      const bool resolved_pair = a.solid && b.solid && (a.kinematic != b.kinematic);
      if (resolved_pair) continue;
      if (auto c = penetration(a, b)) contacts.push_back(*c);
    }
  }
  std::stable_sort(contacts.begin(), contacts.end(), [](const Contact& l, const Contact& r) {
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });
  return contacts;
}

std::vector<Contact> World::resolve_static() {
  std::map<std::pair<BodyId, BodyId>, Contact> events;
  for (int pass = 0; pass < kResolvePasses; ++pass) {
    bool moved = false;
    for (auto& k : bodies_) {
      if (!k.enabled || !k.kinematic || !k.solid) continue;
      for (const auto& s : bodies_) {
        if (!s.enabled || s.kinematic || !s.solid) continue;
        auto c = penetration(k, s);
        if (!c) continue;
        // Outward normal from the static body toward the kinematic one.
        const Vec2 out = c->normal * -1.0;
        k.position += out * c->depth;
        const double inbound = k.velocity.dot(out);
        if (inbound < 0.0) k.velocity -= out * inbound;
        moved = true;
        Contact ev = *c;
        if (ev.a > ev.b) {
          std::swap(ev.a, ev.b);
          ev.normal = ev.normal * -1.0;
        }
        events.emplace(std::pair(ev.a, ev.b), ev);
      }
    }
    if (!moved) break;
  }
  std::vector<Contact> out;
  out.reserve(events.size());
  for (auto& [key, c] : events) out.push_back(c);
  return out;
}

std::optional<RayHit> World::raycast(Vec2 origin, Vec2 direction, double max_length,
                                     const BodyFilter& filter) const {
  const double len = direction.norm();
  if (!(len > 0.0) || !(max_length > 0.0)) return std::nullopt;
  const Vec2 dir = direction * (1.0 / len);
  std::optional<RayHit> best;
  double best_t = max_length;
  for (const auto& b : bodies_) {
    if (!b.enabled || (filter && !filter(b))) continue;
    auto t = ray_entry(b, origin, dir);
    if (!t || *t > best_t) continue;
    if (best && *t == best_t) continue;  // ascending id wins ties
    best_t = *t;
    best = RayHit{b.id, b.tag, std::clamp(*t / max_length, 0.0, 1.0)};
  }
  return best;
}

std::optional<BodyId> World::topmost_at(Vec2 p, const BodyFilter& filter) const {
  std::optional<BodyId> best;
  int best_z = std::numeric_limits<int>::min();
  for (const auto& b : bodies_) {
    if (!b.enabled || (filter && !filter(b))) continue;
    if (!contains_point(b, p)) continue;
    if (!best || b.z_order >= best_z) {
      best = b.id;
      best_z = b.z_order;
    }
  }
  return best;
}

}  // namespace agentsim::worldsim
