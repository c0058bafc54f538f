#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "evsim/core.hpp"
#include "oracles.hpp"

using namespace evsim;

namespace {

Frame random_frame(int w, int h, time_us t, std::mt19937& rng) {
  Frame f(w, h, t);
  std::uniform_int_distribution<int> dist(0, 255);
  for (auto& px : f.pixels) px = static_cast<std::uint8_t>(dist(rng));
  return f;
}

SimulatorConfig config_with(int c_pos, int c_neg) {
  SimulatorConfig c;
  c.c_pos = c_pos;
  c.c_neg = c_neg;
  return c;
}

}  // namespace

TEST_CASE("difference_frame: identical frames give an all-zero result") {
  std::mt19937 rng(7);
  Frame f = random_frame(16, 12, 100, rng);
  Frame g = f;
  g.timestamp = 200;
  DifferenceFrame d = difference_frame(f, g);
  CHECK(d.width == 16);
  CHECK(d.height == 12);
  CHECK(d.t_start == 100);
  CHECK(d.t_end == 200);
  for (auto v : d.values) CHECK(v == 0);
}

TEST_CASE("difference_frame: 100 -> 103 yields +3") {
  Frame a(4, 4, 0, 100);
  Frame b(4, 4, 10, 100);
  b.at(2, 1) = 103;
  DifferenceFrame d = difference_frame(a, b);
  CHECK(d.at(2, 1) == 3);
  CHECK(d.at(0, 0) == 0);
}

TEST_CASE("difference_frame: random 8x8 pair matches the element-wise oracle") {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 20; ++iter) {
    Frame a = random_frame(8, 8, 0, rng);
    Frame b = random_frame(8, 8, 1000, rng);
    DifferenceFrame d = difference_frame(a, b);
    auto expected = oracle::subtract_pixels(a, b);
    REQUIRE(expected.size() == d.values.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(d.values[i] == expected[i]);
  }
}

TEST_CASE("difference_frame: dimension mismatch throws") {
  Frame a(4, 4, 0);
  Frame b(4, 5, 1);
  CHECK_THROWS_AS(difference_frame(a, b), std::invalid_argument);
}

TEST_CASE("difference_frame: anti-symmetric") {
  std::mt19937 rng(3);
  Frame a = random_frame(9, 7, 50, rng);
  Frame b = random_frame(9, 7, 50, rng);
  DifferenceFrame ab = difference_frame(a, b);
  DifferenceFrame ba = difference_frame(b, a);
  for (std::size_t i = 0; i < ab.values.size(); ++i) CHECK(ab.values[i] == -ba.values[i]);
}

TEST_CASE("threshold_events: +3 with dense defaults gives one positive event") {
  DifferenceFrame d(3, 3, 0, 1000);
  d.at(1, 1) = 3;
  auto events = threshold_events(d, config_with(2, -2), 1000);
  REQUIRE(events.size() == 1);
  CHECK(events[0].x == 1);
  CHECK(events[0].y == 1);
  CHECK(events[0].t == 1000);
  CHECK(events[0].p == 1);
}

TEST_CASE("threshold_events: value exactly at the threshold emits nothing") {
  DifferenceFrame d(2, 2, 0, 10);
  d.at(0, 0) = 2;    // == c_pos
  d.at(1, 0) = -2;   // == c_neg
  auto events = threshold_events(d, config_with(2, -2), 10);
  CHECK(events.empty());
}

TEST_CASE("threshold_events: random frames match the exhaustive scan oracle") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> delta(-255, 255);
  std::uniform_int_distribution<int> thr(1, 30);
  for (int iter = 0; iter < 50; ++iter) {
    DifferenceFrame d(8, 8, 0, 500);
    for (auto& v : d.values) v = static_cast<std::int16_t>(delta(rng));
    const int c_pos = thr(rng);
    const int c_neg = -thr(rng);
    auto got = threshold_events(d, config_with(c_pos, c_neg), 500);
    auto expected = oracle::scan_threshold(d, c_pos, c_neg, 500);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
  }
}

TEST_CASE("threshold_events: magnitude mode emits floor(|v| / |threshold|) events") {
  DifferenceFrame d(4, 1, 0, 7);
  d.at(0, 0) = 7;    // floor(7/2)  = 3 positive
  d.at(1, 0) = -5;   // floor(5/2)  = 2 negative
  d.at(2, 0) = 3;    // floor(3/2)  = 1
  d.at(3, 0) = 2;    // at threshold, none
  SimulatorConfig c = config_with(2, -2);
  c.events_per_crossing = EventsPerCrossing::magnitude;
  auto events = threshold_events(d, c, 7);
  auto expected = oracle::scan_threshold(d, 2, -2, 7, true);
  REQUIRE(events.size() == 6);
  REQUIRE(expected.size() == 6);
  int pos = 0, neg = 0;
  for (const auto& e : events) (e.p > 0 ? pos : neg)++;
  CHECK(pos == 4);
  CHECK(neg == 2);
}

TEST_CASE("threshold_events: zero difference frame emits nothing for any config") {
  DifferenceFrame d(6, 6, 0, 1);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> thr(1, 100);
  for (int iter = 0; iter < 10; ++iter) {
    auto events = threshold_events(d, config_with(thr(rng), -thr(rng)), 1);
    CHECK(events.empty());
  }
}

TEST_CASE("threshold_events: raising c_pos never increases the positive count") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> delta(-255, 255);
  DifferenceFrame d(12, 12, 0, 1);
  for (auto& v : d.values) v = static_cast<std::int16_t>(delta(rng));
  std::size_t prev_pos = std::numeric_limits<std::size_t>::max();
  std::size_t prev_neg = std::numeric_limits<std::size_t>::max();
  for (int c = 1; c <= 60; c += 3) {
    auto events = threshold_events(d, config_with(c, -c), 1);
    std::size_t pos = 0, neg = 0;
    for (const auto& e : events) (e.p > 0 ? pos : neg)++;
    CHECK(pos <= prev_pos);
    CHECK(neg <= prev_neg);  // lowering c_neg (more negative) as well
    prev_pos = pos;
    prev_neg = neg;
  }
}

TEST_CASE("threshold_events: no pixel emits both polarities, coordinates in bounds") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> delta(-255, 255);
  for (int iter = 0; iter < 20; ++iter) {
    DifferenceFrame d(10, 7, 0, 1);
    for (auto& v : d.values) v = static_cast<std::int16_t>(delta(rng));
    auto events = threshold_events(d, config_with(3, -4), 1);
    std::vector<int> polarity_seen(d.values.size(), 0);
    for (const auto& e : events) {
      REQUIRE(e.x < 10);
      REQUIRE(e.y < 7);
      int& seen = polarity_seen[e.y * 10 + e.x];
      if (seen != 0) CHECK(seen == e.p);
      seen = e.p;
    }
  }
}

TEST_CASE("threshold_events: invalid thresholds are rejected") {
  DifferenceFrame d(2, 2, 0, 1);
  CHECK_THROWS_AS(threshold_events(d, config_with(0, -2), 1), std::invalid_argument);
  CHECK_THROWS_AS(threshold_events(d, config_with(2, 0), 1), std::invalid_argument);
  SimulatorConfig bad = config_with(2, -2);
  bad.n_interp = -1;
  CHECK_THROWS_AS(threshold_events(d, bad, 1), std::invalid_argument);
}

TEST_CASE("SimulatorConfig: per-method defaults") {
  auto dense = SimulatorConfig::defaults(Method::dense);
  CHECK(dense.c_pos == 2);
  CHECK(dense.c_neg == -2);
  CHECK(dense.n_interp == 10);
  auto sparse = SimulatorConfig::defaults(Method::sparse);
  CHECK(sparse.c_pos == 10);
  CHECK(sparse.c_neg == -10);
  CHECK(sparse.n_interp == 10);
  CHECK(sparse.effective_selection_threshold() == 10);
  auto diff = SimulatorConfig::defaults(Method::difference_interp);
  CHECK(diff.c_pos == 20);
  CHECK(diff.c_neg == -20);
  CHECK(diff.n_interp == 10);
}
