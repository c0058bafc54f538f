#include "evsim/core.hpp"

namespace evsim {

DifferenceFrame difference_frame(const Frame& prev, const Frame& curr) {
  if (prev.width != curr.width || prev.height != curr.height) {
    throw std::invalid_argument("difference_frame: incompatible input frames (" +
                                std::to_string(prev.width) + "x" + std::to_string(prev.height) +
                                " vs " + std::to_string(curr.width) + "x" +
                                std::to_string(curr.height) + ")");
  }
  DifferenceFrame diff(prev.width, prev.height, prev.timestamp, curr.timestamp);
  const std::size_t n = prev.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    diff.values[i] =
        static_cast<std::int16_t>(static_cast<int>(curr.pixels[i]) - static_cast<int>(prev.pixels[i]));
  }
  return diff;
}

void threshold_events_into(const DifferenceFrame& diff, const SimulatorConfig& config,
                           time_us event_time, std::vector<Event>& out) {
  config.validate();
  const int c_pos = config.c_pos;
  const int c_neg = config.c_neg;
  const bool magnitude = config.events_per_crossing == EventsPerCrossing::magnitude;
  for (int y = 0; y < diff.height; ++y) {
    const std::int16_t* row = diff.values.data() + static_cast<std::size_t>(y) * diff.width;
    for (int x = 0; x < diff.width; ++x) {
      const int v = row[x];
      if (v > c_pos) {
        const int count = magnitude ? v / c_pos : 1;
        for (int k = 0; k < count; ++k) {
          out.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                              event_time, std::int8_t{1}});
        }
      } else if (v < c_neg) {
        const int count = magnitude ? v / c_neg : 1;
        for (int k = 0; k < count; ++k) {
          out.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                              event_time, std::int8_t{-1}});
        }
      }
    }
  }
}

std::vector<Event> threshold_events(const DifferenceFrame& diff, const SimulatorConfig& config,
                                    time_us event_time) {
  std::vector<Event> out;
  threshold_events_into(diff, config, event_time, out);
  return out;
}

}  // namespace evsim
