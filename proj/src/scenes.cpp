#include "evsim/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace evsim::scenes {
namespace {

time_us stamp(int k, double fps) {
  return static_cast<time_us>(std::llround(static_cast<double>(k) * 1e6 / fps));
}

std::vector<std::uint8_t> noise(int width, int height, std::uint32_t seed, int lo, int hi) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height);
  for (auto& p : px) p = static_cast<std::uint8_t>(dist(rng));
  return px;
}

void box_blur3(std::vector<std::uint8_t>& px, int width, int height) {
  std::vector<std::uint8_t> out(px.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int sum = 0;
      for (int oy = -1; oy <= 1; ++oy) {
        const int yy = std::clamp(y + oy, 0, height - 1);
        for (int ox = -1; ox <= 1; ++ox) {
          const int xx = std::clamp(x + ox, 0, width - 1);
          sum += px[static_cast<std::size_t>(yy) * width + xx];
        }
      }
      out[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>((sum + 4) / 9);
    }
  }
  px = std::move(out);
}

// Fraction of the pixel covered by the disk, 4x4 subsamples.
double disk_coverage(int px, int py, double cx, double cy, double radius) {
  const double r2 = radius * radius;
  int inside = 0;
  for (int sy = 0; sy < 4; ++sy) {
    const double y = py - 0.5 + (sy + 0.5) / 4.0;
    for (int sx = 0; sx < 4; ++sx) {
      const double x = px - 0.5 + (sx + 0.5) / 4.0;
      const double dx = x - cx;
      const double dy = y - cy;
      if (dx * dx + dy * dy <= r2) ++inside;
    }
  }
  return inside / 16.0;
}

void paint_disk(Frame& f, double cx, double cy, double radius, std::uint8_t fg) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 1)));
  const int x1 = std::min(f.width - 1, static_cast<int>(std::ceil(cx + radius + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 1)));
  const int y1 = std::min(f.height - 1, static_cast<int>(std::ceil(cy + radius + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double cov = disk_coverage(x, y, cx, cy, radius);
      if (cov <= 0.0) continue;
      const double bg = f.at(x, y);
      f.at(x, y) = static_cast<std::uint8_t>(std::lround(bg + cov * (fg - bg)));
    }
  }
}

}  // namespace

Frame textured_frame(int width, int height, time_us timestamp, std::uint32_t seed,
                     std::uint8_t lo, std::uint8_t hi) {
  Frame f(width, height, timestamp);
  f.pixels = noise(width, height, seed, lo, hi);
  box_blur3(f.pixels, width, height);
  box_blur3(f.pixels, width, height);
  return f;
}

std::vector<Frame> panning_texture(int width, int height, int n_frames, int dx, int dy, double fps,
                                   std::uint32_t seed) {
  const int pad = 4;
  const int margin_x = n_frames * std::abs(dx) + pad;
  const int margin_y = n_frames * std::abs(dy) + pad;
  const int tex_w = width + 2 * margin_x;
  const int tex_h = height + 2 * margin_y;
  std::vector<std::uint8_t> tex = noise(tex_w, tex_h, seed, 0, 255);
  box_blur3(tex, tex_w, tex_h);
  box_blur3(tex, tex_w, tex_h);

  std::vector<Frame> frames;
  frames.reserve(n_frames);
  for (int k = 0; k < n_frames; ++k) {
    // Crop origin shifts by -(dx, dy) each frame so content moves by +(dx, dy).
    const int ox = margin_x - k * dx;
    const int oy = margin_y - k * dy;
    Frame f(width, height, stamp(k, fps));
    for (int y = 0; y < height; ++y) {
      const std::uint8_t* src = tex.data() + static_cast<std::size_t>(y + oy) * tex_w + ox;
      std::copy(src, src + width, f.pixels.begin() + static_cast<std::size_t>(y) * width);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

DiskScene moving_disk(int width, int height, int n_frames, double disk_radius, double step_px,
                      double fps, std::uint8_t background, std::uint8_t foreground,
                      std::uint32_t texture_seed) {
  Frame base(width, height, 0, background);
  if (texture_seed != 0) {
    const int lo = std::max(0, background - 10);
    const int hi = std::min(255, background + 10);
    base.pixels = noise(width, height, texture_seed, lo, hi);
    box_blur3(base.pixels, width, height);
  }

  const double ccx = width / 2.0;
  const double ccy = height / 2.0;
  const double orbit = std::max(4.0, std::min(width, height) / 2.0 - disk_radius - 6.0);
  const double dtheta = step_px / orbit;

  DiskScene scene;
  scene.frames.reserve(n_frames);
  scene.centers.reserve(n_frames);
  for (int k = 0; k < n_frames; ++k) {
    const double theta = k * dtheta;
    const double cx = ccx + orbit * std::cos(theta);
    const double cy = ccy + orbit * std::sin(theta);
    Frame f = base;
    f.timestamp = stamp(k, fps);
    paint_disk(f, cx, cy, disk_radius, foreground);
    scene.frames.push_back(std::move(f));
    scene.centers.emplace_back(cx, cy);
  }
  return scene;
}

std::vector<Frame> translating_square(int width, int height, int n_frames, int square_size, int x0,
                                      int y0, int dx, int dy, double fps) {
  std::vector<Frame> frames;
  frames.reserve(n_frames);
  for (int k = 0; k < n_frames; ++k) {
    Frame f(width, height, stamp(k, fps));
    const int sx = x0 + k * dx;
    const int sy = y0 + k * dy;
    for (int y = std::max(0, sy); y < std::min(height, sy + square_size); ++y) {
      for (int x = std::max(0, sx); x < std::min(width, sx + square_size); ++x) {
        f.at(x, y) = 230;
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<Frame> high_dynamics_scene(int width, int height, int n_frames, double fps) {
  return panning_texture(width, height, n_frames, 3, 1, fps, 99);
}

std::vector<Frame> low_dynamics_scene(int width, int height, int n_frames, double fps) {
  const double radius = std::max(6.0, std::min(width, height) / 40.0);
  return moving_disk(width, height, n_frames, radius, 8.0, fps, 70, 235, 77).frames;
}

DiskScene constant_velocity_dot(int width, int height, int n_frames, double step_px, double fps) {
  return moving_disk(width, height, n_frames, 2.5, step_px, fps, 0, 255, 0);
}

}  // namespace evsim::scenes
