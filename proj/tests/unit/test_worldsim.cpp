#include <doctest.h>

#include <cmath>
#include <tuple>

#include "agentsim/core/rng.hpp"
#include "agentsim/worldsim/world.hpp"

using namespace agentsim;
using namespace agentsim::worldsim;

TEST_CASE("free body integrates one Euler step") {
  World w({{-10, -10}, {10, 10}});
  const BodyId b = w.add_body({.tag = "agent", .shape = Aabb{{0.5, 0.5}}, .velocity = {1.0, 0.0},
                               .kinematic = true});
  w.integrate_and_collide(0.02);
  CHECK(w.body(b).position.x == doctest::Approx(0.02));
  CHECK(w.body(b).position.y == 0.0);
}

TEST_CASE("semi-implicit Euler applies acceleration before position") {
  World w({{-10, -10}, {10, 10}});
  const BodyId b = w.add_body({.tag = "ball", .shape = Circle{0.1}, .acceleration = {0.0, -10.0},
                               .kinematic = true, .solid = false});
  w.integrate_and_collide(0.1);
  CHECK(w.body(b).velocity.y == doctest::Approx(-1.0));
  CHECK(w.body(b).position.y == doctest::Approx(-0.1));
}

TEST_CASE("speed is capped at max_speed") {
  World w({{-10, -10}, {10, 10}}, 2.0);
  const BodyId b = w.add_body({.tag = "a", .velocity = {6.0, 8.0}, .kinematic = true});
  w.integrate_and_collide(0.01);
  CHECK(w.body(b).velocity.norm() == doctest::Approx(2.0));
}

TEST_CASE("body moving into a wall stops flush with the wall face") {
  World w({{-10, -10}, {10, 10}});
  const BodyId wall = w.add_body({.tag = "wall", .shape = Aabb{{0.5, 5.0}}, .position = {3.0, 0.0}});
  const BodyId a = w.add_body({.tag = "agent", .shape = Aabb{{0.5, 0.5}}, .position = {1.9, 0.0},
                               .velocity = {10.0, 0.0}, .kinematic = true});
  const auto contacts = w.integrate_and_collide(0.02);
  // Wall face at x = 2.5, agent half width 0.5.
  CHECK(w.body(a).position.x == doctest::Approx(2.0));
  CHECK(w.body(a).velocity.x == doctest::Approx(0.0));
  bool found = false;
  for (const auto& c : contacts) found = found || (c.a == wall && c.b == a) || (c.a == a && c.b == wall);
  CHECK(found);
}

TEST_CASE("non-solid bodies report overlap without blocking") {
  World w({{-10, -10}, {10, 10}});
  w.add_body({.tag = "goal", .shape = Aabb{{1.0, 1.0}}, .position = {0.5, 0.0}, .solid = false});
  const BodyId a = w.add_body({.tag = "agent", .shape = Aabb{{0.25, 0.25}}, .velocity = {5.0, 0.0},
                               .kinematic = true});
  const auto contacts = w.integrate_and_collide(0.02);
  CHECK(w.body(a).position.x == doctest::Approx(0.1));
  CHECK(contacts.size() == 1);
}

TEST_CASE("penetration of boxes and circles") {
  Body a{.shape = Aabb{{1.0, 1.0}}, .position = {0.0, 0.0}};
  Body b{.shape = Aabb{{1.0, 1.0}}, .position = {1.5, 0.2}};
  auto c = penetration(a, b);
  REQUIRE(c.has_value());
  CHECK(c->depth == doctest::Approx(0.5));
  CHECK(c->normal.x == doctest::Approx(1.0));

  Body touching{.shape = Aabb{{1.0, 1.0}}, .position = {2.0, 0.0}};
  CHECK_FALSE(penetration(a, touching).has_value());

  Body c1{.shape = Circle{1.0}, .position = {0.0, 0.0}};
  Body c2{.shape = Circle{1.0}, .position = {0.0, 1.5}};
  auto cc = penetration(c1, c2);
  REQUIRE(cc.has_value());
  CHECK(cc->depth == doctest::Approx(0.5));
  CHECK(cc->normal.y == doctest::Approx(1.0));
}

TEST_CASE("ray queries") {
  World w({{-20, -20}, {20, 20}});
  SUBCASE("no geometry") { CHECK_FALSE(w.raycast({0, 0}, {1, 0}, 10.0).has_value()); }
  SUBCASE("circle on the ray") {
    const double d = 6.0, r = 1.5, len = 10.0;
    w.add_body({.tag = "ball", .shape = Circle{r}, .position = {d, 0.0}});
    auto hit = w.raycast({0, 0}, {1, 0}, len);
    REQUIRE(hit.has_value());
    CHECK(hit->fraction == doctest::Approx((d - r) / len));
    CHECK(hit->tag == "ball");
  }
  SUBCASE("circle off-axis uses the quadratic root") {
    w.add_body({.tag = "ball", .shape = Circle{1.0}, .position = {5.0, 0.6}});
    auto hit = w.raycast({0, 0}, {1, 0}, 10.0);
    REQUIRE(hit.has_value());
    CHECK(hit->fraction == doctest::Approx((5.0 - std::sqrt(1.0 - 0.36)) / 10.0));
  }
  SUBCASE("box face") {
    w.add_body({.tag = "wall", .shape = Aabb{{1.0, 3.0}}, .position = {5.0, 0.0}});
    auto hit = w.raycast({0, 0}, {1, 0}, 8.0);
    REQUIRE(hit.has_value());
    CHECK(hit->fraction == doctest::Approx(0.5));
  }
  SUBCASE("origin inside a body") {
    w.add_body({.tag = "wall", .shape = Aabb{{2.0, 2.0}}, .position = {0.0, 0.0}});
    auto hit = w.raycast({0.5, 0.5}, {0, 1}, 8.0);
    REQUIRE(hit.has_value());
    CHECK(hit->fraction == 0.0);
  }
  SUBCASE("beyond max length") {
    w.add_body({.tag = "wall", .shape = Aabb{{1.0, 1.0}}, .position = {12.0, 0.0}});
    CHECK_FALSE(w.raycast({0, 0}, {1, 0}, 10.0).has_value());
  }
  SUBCASE("nearest of several") {
    w.add_body({.tag = "far", .shape = Aabb{{0.5, 0.5}}, .position = {8.0, 0.0}});
    w.add_body({.tag = "near", .shape = Aabb{{0.5, 0.5}}, .position = {4.0, 0.0}});
    auto hit = w.raycast({0, 0}, {1, 0}, 10.0);
    REQUIRE(hit.has_value());
    CHECK(hit->tag == "near");
  }
}

TEST_CASE("topmost_at prefers higher z-order") {
  World w({{0, 0}, {10, 10}});
  w.add_body({.tag = "floor", .shape = Aabb{{5, 5}}, .position = {5, 5}, .z_order = 0});
  const BodyId top = w.add_body({.tag = "agent", .shape = Aabb{{1, 1}}, .position = {5, 5}, .z_order = 2});
  CHECK(w.topmost_at({5, 5}) == top);
  CHECK(w.topmost_at({1, 1}) == 0);
  CHECK_FALSE(w.topmost_at({20, 20}).has_value());
}

TEST_CASE("identical worlds produce identical contact lists") {
  auto run = [] {
    World w({{0, 0}, {10, 10}}, 5.0);
    w.add_body({.tag = "wall", .shape = Aabb{{5, 0.25}}, .position = {5, -0.25}});
    w.add_body({.tag = "wall", .shape = Aabb{{5, 0.25}}, .position = {5, 10.25}});
    w.add_body({.tag = "wall", .shape = Aabb{{0.25, 5}}, .position = {-0.25, 5}});
    w.add_body({.tag = "wall", .shape = Aabb{{0.25, 5}}, .position = {10.25, 5}});
    Rng rng(3);
    std::vector<BodyId> movers;
    for (int i = 0; i < 6; ++i) {
      movers.push_back(w.add_body({.tag = "m", .shape = Aabb{{0.3, 0.3}},
                                   .position = {rng.uniform(1, 9), rng.uniform(1, 9)},
                                   .kinematic = true}));
    }
    std::vector<std::tuple<int, int, double, double, double>> events;
    for (int t = 0; t < 200; ++t) {
      for (BodyId m : movers) w.body(m).velocity = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
      for (const auto& c : w.integrate_and_collide(0.02)) {
        events.emplace_back(c.a, c.b, c.normal.x, c.normal.y, c.depth);
      }
    }
    return events;
  };
  const auto a = run();
  CHECK(!a.empty());
  CHECK(a == run());
}
