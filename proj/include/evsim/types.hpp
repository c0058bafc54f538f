#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evsim {

/// Microsecond timestamps throughout; event cameras operate on a us scale.
using time_us = std::int64_t;

/// Single-channel 8-bit intensity image with a timestamp. Row-major storage.
struct Frame {
  int width = 0;
  int height = 0;
  time_us timestamp = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, time_us t, std::uint8_t fill = 0)
      : width(w), height(h), timestamp(t),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w <= 0 || h <= 0) {
      throw std::invalid_argument("Frame: width and height must be positive");
    }
  }

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// Signed per-pixel intensity delta between two frames, values in [-255, 255].
struct DifferenceFrame {
  int width = 0;
  int height = 0;
  time_us t_start = 0;
  time_us t_end = 0;
  std::vector<std::int16_t> values;

  DifferenceFrame() = default;
  DifferenceFrame(int w, int h, time_us t0, time_us t1)
      : width(w), height(h), t_start(t0), t_end(t1),
        values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  std::int16_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  std::int16_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// One <x, y, t, p> tuple, p is +1 or -1.
struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  time_us t = 0;
  std::int8_t p = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Sort key: time first, ties broken by (y, x, p) so streams are byte-deterministic.
inline bool event_order(const Event& a, const Event& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.p < b.p;
}

/// Events ordered by t (ties by (y, x, p)) plus the sensor resolution they came from.
struct EventStream {
  int width = 0;
  int height = 0;
  std::vector<Event> events;

  void append(const EventStream& other) {
    events.insert(events.end(), other.events.begin(), other.events.end());
  }
};

enum class Method { difference_only, dense, sparse, difference_interp };
enum class FlowQuality { low_quality, high_quality };

/// How many events an above-threshold pixel emits: one, or floor(|delta| / threshold).
enum class EventsPerCrossing { single, magnitude };

struct SimulatorConfig {
  Method method = Method::difference_only;
  int c_pos = 2;
  int c_neg = -2;
  int n_interp = 0;
  FlowQuality flow_preset = FlowQuality::low_quality;
  /// Intensity delta that selects pixels for sparse interpolation; 0 means "use c_pos".
  int selection_threshold = 0;
  EventsPerCrossing events_per_crossing = EventsPerCrossing::single;
  /// Whether the input frames themselves take part in the difference chain.
  bool include_endpoints = true;

  /// Per-method defaults: dense 2/-2/10, sparse 10/-10/10, difference 20/-20/10.
  static SimulatorConfig defaults(Method m) {
    SimulatorConfig c;
    c.method = m;
    switch (m) {
      case Method::difference_only:
        c.c_pos = 2, c.c_neg = -2, c.n_interp = 0;
        break;
      case Method::dense:
        c.c_pos = 2, c.c_neg = -2, c.n_interp = 10;
        break;
      case Method::sparse:
        c.c_pos = 10, c.c_neg = -10, c.n_interp = 10;
        c.selection_threshold = 10;
        break;
      case Method::difference_interp:
        c.c_pos = 20, c.c_neg = -20, c.n_interp = 10;
        break;
    }
    return c;
  }

  int effective_selection_threshold() const {
    return selection_threshold > 0 ? selection_threshold : c_pos;
  }

  void validate() const {
    if (c_pos <= 0) throw std::invalid_argument("SimulatorConfig: c_pos must be > 0");
    if (c_neg >= 0) throw std::invalid_argument("SimulatorConfig: c_neg must be < 0");
    if (n_interp < 0) throw std::invalid_argument("SimulatorConfig: n_interp must be >= 0");
  }
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::difference_only: return "difference_only";
    case Method::dense: return "dense";
    case Method::sparse: return "sparse";
    case Method::difference_interp: return "difference_interp";
  }
  return "?";
}

inline const char* flow_quality_name(FlowQuality q) {
  return q == FlowQuality::low_quality ? "low_quality" : "high_quality";
}

}  // namespace evsim
