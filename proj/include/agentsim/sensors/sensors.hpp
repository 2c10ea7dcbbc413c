#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentsim/worldsim/world.hpp"

namespace agentsim::sensors {

using worldsim::Vec2;

struct RaycastConfig {
  std::vector<double> angles;  // radians relative to the agent heading
  double max_length = 1.0;
  std::vector<std::string> detectable_tags;

  int floats_per_ray() const { return static_cast<int>(detectable_tags.size()) + 2; }
  std::size_t output_size() const { return angles.size() * detectable_tags.size() + 2 * angles.size(); }

  // `count` rays evenly spaced over the full circle starting at `offset`.
  static RaycastConfig ring(int count, double max_length, std::vector<std::string> tags,
                            double offset = 0.0);
};

struct Pose {
  Vec2 position;
  double heading = 0.0;
  worldsim::BodyId self = -1;  // excluded from hits
};

// Per ray: one-hot over detectable tags, a no-hit flag, then the hit
// fraction (1.0 when nothing was hit). Bodies with tags outside the list are
// transparent to the sensor.
std::vector<float> raycast_sense(const worldsim::World& world, const Pose& pose,
                                 const RaycastConfig& cfg);
void raycast_sense_into(const worldsim::World& world, const Pose& pose,
                        const RaycastConfig& cfg, std::span<float> out);

using Rgb = std::array<float, 3>;

struct Palette {
  std::map<std::string, Rgb, std::less<>> colors;
  Rgb background{0.0f, 0.0f, 0.0f};
};

// Orthographic top-down rasterization of `view` (the world bounds by
// default) into an H x W x 3 row-major tensor. Row 0 is the top edge. Each
// pixel takes the colour of the highest z-order body containing its centre;
// bodies whose tag has no palette entry are not drawn.
std::vector<float> grid_render(const worldsim::World& world, const Palette& palette, int height,
                               int width, std::optional<worldsim::Bounds> view = std::nullopt);
void grid_render_into(const worldsim::World& world, const Palette& palette, int height, int width,
                      const worldsim::Bounds& view, std::span<float> out);

// Rolling history of the last K observations. Frames older than the episode
// start are zeros.
class ObservationStack {
 public:
  ObservationStack(int depth, std::size_t frame_size);

  void reset();
  void push(std::span<const float> frame);
  // Oldest frame first: [o_{t-K+1}, ..., o_t].
  std::vector<float> stacked() const;
  void stacked_into(std::span<float> out) const;

  int depth() const { return depth_; }
  std::size_t frame_size() const { return frame_size_; }

 private:
  int depth_;
  std::size_t frame_size_;
  std::deque<std::vector<float>> frames_;
};

// Functional form: concatenates the last K entries of `history` (oldest
// first), zero-padding at the front when fewer than K are available.
std::vector<float> stack_observations(std::span<const std::vector<float>> history, int depth,
                                      std::size_t frame_size);

}  // namespace agentsim::sensors
