#pragma once

#include "evsim/types.hpp"

namespace evsim {

/// Events per pixel per second, aggregated across pixels: the per-pixel rate
/// map r(x, y) = count(x, y) / duration is reduced to its mean and population
/// standard deviation over all pixels.
struct EventRateStats {
  double mean_rate = 0.0;
  double std_rate = 0.0;
  double duration = 0.0;
  std::uint64_t total_events = 0;
};

enum class PixelClass : std::uint8_t { none = 0, positive = 1, negative = 2, both = 3 };

/// Per-pixel polarity classification over a half-open time window.
struct AccumulatedFrame {
  int width = 0;
  int height = 0;
  time_us t_start = 0;
  time_us t_end = 0;
  std::vector<PixelClass> classes;

  PixelClass at(int x, int y) const { return classes[static_cast<std::size_t>(y) * width + x]; }
};

/// Throws on duration <= 0 or unknown stream resolution.
EventRateStats events_per_pixel_second(const EventStream& stream, double duration);

/// Classifies each pixel by the polarities received in [t_start, t_end).
/// Throws on an inverted (or empty) window.
AccumulatedFrame accumulate(const EventStream& stream, time_us t_start, time_us t_end);

}  // namespace evsim
