#include "agentsim/sensors/sensors.hpp"

#include <algorithm>
#include <numbers>

#include "agentsim/core/error.hpp"

namespace agentsim::sensors {

RaycastConfig RaycastConfig::ring(int count, double max_length, std::vector<std::string> tags,
                                  double offset) {
  RaycastConfig cfg;
  cfg.max_length = max_length;
  cfg.detectable_tags = std::move(tags);
  for (int i = 0; i < count; ++i) {
    cfg.angles.push_back(offset + 2.0 * std::numbers::pi * i / count);
  }
  return cfg;
}

void raycast_sense_into(const worldsim::World& world, const Pose& pose,
                        const RaycastConfig& cfg, std::span<float> out) {
  const std::size_t per_ray = static_cast<std::size_t>(cfg.floats_per_ray());
  if (out.size() != cfg.output_size()) {
    throw Error(ErrorCode::kShapeMismatch, "raycast output buffer has wrong size");
  }
  auto filter = [&](const worldsim::Body& b) {
    return b.id != pose.self &&
           std::find(cfg.detectable_tags.begin(), cfg.detectable_tags.end(), b.tag) !=
               cfg.detectable_tags.end();
  };
  for (std::size_t r = 0; r < cfg.angles.size(); ++r) {
    auto slot = out.subspan(r * per_ray, per_ray);
    std::fill(slot.begin(), slot.end(), 0.0f);
    const Vec2 dir = Vec2::from_angle(pose.heading + cfg.angles[r]);
    const auto hit = world.raycast(pose.position, dir, cfg.max_length, filter);
    if (!hit) {
      slot[per_ray - 2] = 1.0f;
      slot[per_ray - 1] = 1.0f;
      continue;
    }
    const auto it = std::find(cfg.detectable_tags.begin(), cfg.detectable_tags.end(), hit->tag);
    slot[static_cast<std::size_t>(it - cfg.detectable_tags.begin())] = 1.0f;
    slot[per_ray - 1] = static_cast<float>(hit->fraction);
  }
}

std::vector<float> raycast_sense(const worldsim::World& world, const Pose& pose,
                                 const RaycastConfig& cfg) {
  std::vector<float> out(cfg.output_size());
  raycast_sense_into(world, pose, cfg, out);
  return out;
}

void grid_render_into(const worldsim::World& world, const Palette& palette, int height, int width,
                      const worldsim::Bounds& view, std::span<float> out) {
  if (height <= 0 || width <= 0 ||
      out.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3) {
    throw Error(ErrorCode::kShapeMismatch, "render buffer does not match resolution");
  }
  // Bodies that can be drawn, in id order, so the per-pixel scan stays small.
  std::vector<const worldsim::Body*> drawable;
  std::vector<const Rgb*> colors;
  for (const auto& b : world.bodies()) {
    if (!b.enabled) continue;
    auto it = palette.colors.find(b.tag);
    if (it == palette.colors.end()) continue;
    drawable.push_back(&b);
    colors.push_back(&it->second);
  }
  // Pixel centres are computed as lo + (2i+1) * extent / (2n) so that they
  // land on exact binary fractions for integer-aligned worlds.
  const double w2 = 2.0 * width;
  const double h2 = 2.0 * height;
  for (int row = 0; row < height; ++row) {
    const double y = view.max.y - (2.0 * row + 1.0) * view.height() / h2;
    for (int col = 0; col < width; ++col) {
      const double x = view.min.x + (2.0 * col + 1.0) * view.width() / w2;
      const Rgb* color = &palette.background;
      int best_z = 0;
      bool found = false;
      for (std::size_t i = 0; i < drawable.size(); ++i) {
        const auto& b = *drawable[i];
        if (found && b.z_order < best_z) continue;
        if (!worldsim::contains_point(b, {x, y})) continue;
        color = colors[i];
        best_z = b.z_order;
        found = true;
      }
      float* px = out.data() + (static_cast<std::size_t>(row) * width + col) * 3;
      px[0] = (*color)[0];
      px[1] = (*color)[1];
      px[2] = (*color)[2];
    }
  }
}

std::vector<float> grid_render(const worldsim::World& world, const Palette& palette, int height,
                               int width, std::optional<worldsim::Bounds> view) {
  std::vector<float> out(static_cast<std::size_t>(height) * width * 3);
  grid_render_into(world, palette, height, width, view.value_or(world.bounds()), out);
  return out;
}

ObservationStack::ObservationStack(int depth, std::size_t frame_size)
    : depth_(depth), frame_size_(frame_size) {
  if (depth < 1) throw Error(ErrorCode::kShapeMismatch, "stack depth must be >= 1");
}

void ObservationStack::reset() { frames_.clear(); }

void ObservationStack::push(std::span<const float> frame) {
  if (frame.size() != frame_size_) {
    throw Error(ErrorCode::kShapeMismatch, "observation frame has wrong size");
  }
  frames_.emplace_back(frame.begin(), frame.end());
  while (frames_.size() > static_cast<std::size_t>(depth_)) frames_.pop_front();
}

void ObservationStack::stacked_into(std::span<float> out) const {
  const std::size_t pad = static_cast<std::size_t>(depth_) - frames_.size();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(pad * frame_size_), 0.0f);
  auto dst = out.begin() + static_cast<std::ptrdiff_t>(pad * frame_size_);
  for (const auto& f : frames_) dst = std::copy(f.begin(), f.end(), dst);
}

std::vector<float> ObservationStack::stacked() const {
  std::vector<float> out(static_cast<std::size_t>(depth_) * frame_size_);
  stacked_into(out);
  return out;
}

std::vector<float> stack_observations(std::span<const std::vector<float>> history, int depth,
                                      std::size_t frame_size) {
  ObservationStack stack(depth, frame_size);
  const std::size_t skip = history.size() > static_cast<std::size_t>(depth)
                               ? history.size() - static_cast<std::size_t>(depth)
                               : 0;
  for (std::size_t i = skip; i < history.size(); ++i) stack.push(history[i]);
  return stack.stacked();
}

}  // namespace agentsim::sensors
