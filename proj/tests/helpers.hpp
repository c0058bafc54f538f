#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "evsim/types.hpp"

namespace testutil {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("evsim_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline evsim::Frame random_frame(int w, int h, evsim::time_us t, std::mt19937& rng) {
  evsim::Frame f(w, h, t);
  std::uniform_int_distribution<int> dist(0, 255);
  for (auto& px : f.pixels) px = static_cast<std::uint8_t>(dist(rng));
  return f;
}

inline evsim::EventStream random_stream(int w, int h, std::size_t n, std::mt19937& rng) {
  evsim::EventStream s{w, h, {}};
  std::uniform_int_distribution<int> dx(0, w - 1), dy(0, h - 1), dp(0, 1);
  std::uniform_int_distribution<long long> dt(0, 1'000'000'000LL);
  s.events.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.events.push_back({static_cast<std::uint16_t>(dx(rng)), static_cast<std::uint16_t>(dy(rng)),
                        static_cast<evsim::time_us>(dt(rng)),
                        static_cast<std::int8_t>(dp(rng) ? 1 : -1)});
  }
  std::sort(s.events.begin(), s.events.end(), evsim::event_order);
  return s;
}

// Centroid of one polarity at one timestamp.
struct Centroid {
  double x = 0, y = 0;
  std::size_t count = 0;
};

inline Centroid centroid(const std::vector<evsim::Event>& events, evsim::time_us t, int polarity) {
  Centroid c;
  for (const auto& e : events) {
    if (e.t != t || e.p != polarity) continue;
    c.x += e.x;
    c.y += e.y;
    c.count++;
  }
  if (c.count > 0) {
    c.x /= static_cast<double>(c.count);
    c.y /= static_cast<double>(c.count);
  }
  return c;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

inline double point_segment_distance(double px, double py, double ax, double ay, double bx,
                                     double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

inline double point_polyline_distance(double px, double py,
                                      const std::vector<std::pair<double, double>>& pts) {
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(px, py, pts[i].first, pts[i].second,
                                                 pts[i + 1].first, pts[i + 1].second));
  }
  return best;
}

}  // namespace testutil
