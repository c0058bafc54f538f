#include "evsim/metrics.hpp"

#include <cmath>

namespace evsim {

EventRateStats events_per_pixel_second(const EventStream& stream, double duration) {
  if (duration <= 0.0) {
    throw std::invalid_argument("events_per_pixel_second: duration must be > 0");
  }
  if (stream.width <= 0 || stream.height <= 0) {
    throw std::invalid_argument("events_per_pixel_second: stream resolution unknown");
  }

  const std::size_t pixel_count =
      static_cast<std::size_t>(stream.width) * static_cast<std::size_t>(stream.height);
  std::vector<std::uint64_t> counts(pixel_count, 0);
  for (const auto& e : stream.events) {
    counts[static_cast<std::size_t>(e.y) * stream.width + e.x]++;
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto c : counts) {
    const double rate = static_cast<double>(c) / duration;
    sum += rate;
    sum_sq += rate * rate;
  }
  const double n = static_cast<double>(pixel_count);
  const double mean = sum / n;
  const double variance = std::max(0.0, sum_sq / n - mean * mean);

  EventRateStats stats;
  stats.mean_rate = mean;
  stats.std_rate = std::sqrt(variance);
  stats.duration = duration;
  stats.total_events = stream.events.size();
  return stats;
}

AccumulatedFrame accumulate(const EventStream& stream, time_us t_start, time_us t_end) {
  if (t_start >= t_end) {
    throw std::invalid_argument("accumulate: window must satisfy t_start < t_end");
  }
  if (stream.width <= 0 || stream.height <= 0) {
    throw std::invalid_argument("accumulate: stream resolution unknown");
  }

  AccumulatedFrame frame;
  frame.width = stream.width;
  frame.height = stream.height;
  frame.t_start = t_start;
  frame.t_end = t_end;
  frame.classes.assign(
      static_cast<std::size_t>(stream.width) * static_cast<std::size_t>(stream.height),
      PixelClass::none);

  for (const auto& e : stream.events) {
    if (e.t < t_start || e.t >= t_end) continue;
    PixelClass& c = frame.classes[static_cast<std::size_t>(e.y) * stream.width + e.x];
    const PixelClass polarity = e.p > 0 ? PixelClass::positive : PixelClass::negative;
    if (c == PixelClass::none) {
      c = polarity;
    } else if (c != polarity && c != PixelClass::both) {
      c = PixelClass::both;
    }
  }
  return frame;
}

}  // namespace evsim
