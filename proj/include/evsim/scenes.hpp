#pragma once

#include <utility>

#include "evsim/types.hpp"

namespace evsim::scenes {

/// Band-limited noise frame (uniform noise, two box-blur passes), useful as
/// a textured input with informative gradients everywhere.
Frame textured_frame(int width, int height, time_us timestamp, std::uint32_t seed,
                     std::uint8_t lo = 0, std::uint8_t hi = 255);

/// Full-frame texture translating by an integer (dx, dy) per frame. Every
/// visible pixel moves by exactly that amount (the texture is generated with
/// margins, so no border content is invented).
std::vector<Frame> panning_texture(int width, int height, int n_frames, int dx, int dy,
                                   double fps = 20.0, std::uint32_t seed = 1234);

struct DiskScene {
  std::vector<Frame> frames;
  /// Ground-truth disk center per frame.
  std::vector<std::pair<double, double>> centers;
};

/// Anti-aliased disk circling the frame center at step_px per frame on a
/// static background. texture_seed 0 gives a uniform background, otherwise a
/// low-contrast static texture around the background level.
DiskScene moving_disk(int width, int height, int n_frames, double disk_radius, double step_px,
                      double fps, std::uint8_t background, std::uint8_t foreground,
                      std::uint32_t texture_seed = 0);

/// Bright square on black translating by (dx, dy) per frame.
std::vector<Frame> translating_square(int width, int height, int n_frames, int square_size,
                                      int x0, int y0, int dx, int dy, double fps = 30.0);

/// Benchmark scene with a high events-per-frame ratio: panning texture.
std::vector<Frame> high_dynamics_scene(int width, int height, int n_frames, double fps = 20.0);

/// Benchmark scene with a low events-per-frame ratio: one moving ball in
/// front of a static, lightly textured background.
std::vector<Frame> low_dynamics_scene(int width, int height, int n_frames, double fps = 150.0);

/// Small high-contrast dot moving at a constant speed (5 px diameter).
DiskScene constant_velocity_dot(int width, int height, int n_frames, double step_px,
                                double fps = 100.0);

}  // namespace evsim::scenes
