#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "evsim/scenes.hpp"
#include "evsim/simulate.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace evsim;

namespace {

std::vector<Frame> identical_frames(int n) {
  const Frame base = scenes::textured_frame(24, 18, 0, 77);
  std::vector<Frame> frames;
  for (int k = 0; k < n; ++k) {
    Frame f = base;
    f.timestamp = 1000 * k;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

TEST_CASE("push_frame: first frame is warm-up, result is empty") {
  for (const Method m : {Method::difference_only, Method::dense, Method::sparse,
                         Method::difference_interp}) {
    Simulator sim(SimulatorConfig::defaults(m));
    const EventStream out = sim.push_frame(scenes::textured_frame(16, 16, 0, 3));
    CHECK(out.events.empty());
    CHECK(out.width == 16);
    CHECK(out.height == 16);
  }
}

TEST_CASE("push_frame: identical frames produce no events for any method") {
  for (const Method m : {Method::difference_only, Method::dense, Method::sparse,
                         Method::difference_interp}) {
    Simulator sim(SimulatorConfig::defaults(m));
    for (const auto& f : identical_frames(4)) {
      CHECK(sim.push_frame(f).events.empty());
    }
  }
}

TEST_CASE("push_frame: difference_only equals difference_frame + threshold_events") {
  const auto frames = scenes::translating_square(48, 48, 2, 8, 10, 12, 3, 2);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::difference_only);

  Simulator sim(config);
  sim.push_frame(frames[0]);
  const EventStream got = sim.push_frame(frames[1]);

  const auto expected =
      threshold_events(difference_frame(frames[0], frames[1]), config, frames[1].timestamp);
  REQUIRE(got.events.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got.events[i] == expected[i]);
  CHECK(!got.events.empty());
}

TEST_CASE("push_frame: rejects non-monotonic timestamps and resolution changes") {
  Simulator sim(SimulatorConfig::defaults(Method::difference_only));
  sim.push_frame(Frame(8, 8, 100));
  CHECK_THROWS_AS(sim.push_frame(Frame(8, 8, 100)), std::invalid_argument);
  CHECK_THROWS_AS(sim.push_frame(Frame(8, 8, 50)), std::invalid_argument);
  CHECK_THROWS_AS(sim.push_frame(Frame(8, 9, 200)), std::invalid_argument);
  // Still usable afterwards.
  CHECK_NOTHROW(sim.push_frame(Frame(8, 8, 200)));
}

TEST_CASE("interpolate_frames: zero flow, identical frames -> copies") {
  const Frame f = scenes::textured_frame(20, 20, 0, 5);
  Frame g = f;
  g.timestamp = 1100;
  const FlowField zero(20, 20);
  const auto inter = interpolate_frames(f, g, zero, 3);
  REQUIRE(inter.size() == 3);
  for (const auto& frame : inter) CHECK(frame.pixels == f.pixels);
  CHECK(inter[0].timestamp == 275);
  CHECK(inter[1].timestamp == 550);
  CHECK(inter[2].timestamp == 825);
}

TEST_CASE("interpolate_frames: zero flow blends linearly, midpoint is the average") {
  Frame a(6, 6, 0, 40);
  Frame b(6, 6, 1000, 120);
  const FlowField zero(6, 6);
  const auto inter = interpolate_frames(a, b, zero, 3);
  REQUIRE(inter.size() == 3);
  CHECK(inter[1].at(3, 3) == 80);  // midpoint of 40 and 120
  CHECK(inter[0].at(0, 0) == 60);  // 40 + 0.25 * 80
  CHECK(inter[2].at(0, 0) == 100);
}

TEST_CASE("interpolate_frames: translated square lands at fractional positions") {
  const int shift = 4;
  const auto frames = scenes::translating_square(64, 64, 2, 12, 20, 20, shift, 0);
  FlowField flow(64, 64);
  std::fill(flow.du.begin(), flow.du.end(), static_cast<float>(shift));
  const int n = 3;
  const auto inter = interpolate_frames(frames[0], frames[1], flow, n);
  for (int k = 1; k <= n; ++k) {
    const double alpha = static_cast<double>(k) / (n + 1);
    double cx = 0.0;
    int count = 0;
    const Frame& f = inter[k - 1];
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (f.at(x, y) > 128) {
          cx += x;
          ++count;
        }
      }
    }
    REQUIRE(count > 0);
    const double expected = 20.0 + 11.0 / 2.0 + alpha * shift;  // square center column
    CHECK(std::abs(cx / count - expected) < 1.0);
  }
}

TEST_CASE("interpolate_frames: flow dimension mismatch throws") {
  Frame a(8, 8, 0), b(8, 8, 10);
  CHECK_THROWS_AS(interpolate_frames(a, b, FlowField(8, 7), 2), std::invalid_argument);
}

TEST_CASE("simulate_dense: n_interp = 0 degenerates to difference_only") {
  std::mt19937 rng(15);
  const Frame a = testutil::random_frame(16, 16, 0, rng);
  const Frame b = testutil::random_frame(16, 16, 900, rng);
  SimulatorConfig config = SimulatorConfig::defaults(Method::dense);
  config.n_interp = 0;
  const EventStream dense = simulate_dense(a, b, config);
  const auto expected = oracle::difference_events(a, b, config.c_pos, config.c_neg);
  REQUIRE(dense.events.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(dense.events[i] == expected[i]);
}

TEST_CASE("simulate_dense: zero-flow pipeline equals the brute-force blend oracle") {
  std::mt19937 rng(33);
  SimulatorConfig config = SimulatorConfig::defaults(Method::dense);
  config.n_interp = 3;
  for (int iter = 0; iter < 25; ++iter) {
    const Frame a = testutil::random_frame(8, 8, 0, rng);
    const Frame b = testutil::random_frame(8, 8, 1000, rng);
    const EventStream got = dense_events_with_flow(a, b, FlowField(8, 8), config);
    const auto expected =
        oracle::zero_flow_dense_events(a, b, config.c_pos, config.c_neg, config.n_interp);
    REQUIRE(got.events.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got.events[i] == expected[i]);
  }
}

TEST_CASE("simulate_dense: positive events march across the sub-intervals") {
  const auto frames = scenes::translating_square(96, 64, 2, 16, 20, 24, 10, 0);
  SimulatorConfig config = SimulatorConfig::defaults(Method::dense);
  config.n_interp = 4;
  const EventStream out = simulate_dense(frames[0], frames[1], config);
  REQUIRE(!out.events.empty());

  std::set<time_us> stamps;
  for (const auto& e : out.events) stamps.insert(e.t);
  REQUIRE(stamps.size() >= 4);  // motion spread over the interpolation chain
  double last_cx = -1.0;
  for (const time_us t : stamps) {
    const auto c = testutil::centroid(out.events, t, +1);
    if (c.count == 0) continue;
    CHECK(c.x > last_cx);
    last_cx = c.x;
  }
}

TEST_CASE("simulate_sparse: static scene emits nothing") {
  const SimulatorConfig config = SimulatorConfig::defaults(Method::sparse);
  const auto frames = identical_frames(2);
  CHECK(simulate_sparse(frames[0], frames[1], config).events.empty());
}

TEST_CASE("simulate_sparse: n_interp = 0 degenerates to difference_only") {
  std::mt19937 rng(29);
  const Frame a = testutil::random_frame(16, 16, 0, rng);
  const Frame b = testutil::random_frame(16, 16, 500, rng);
  SimulatorConfig config = SimulatorConfig::defaults(Method::sparse);
  config.n_interp = 0;
  const EventStream got = simulate_sparse(a, b, config);
  const auto expected = oracle::difference_events(a, b, config.c_pos, config.c_neg);
  REQUIRE(got.events.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got.events[i] == expected[i]);
}

TEST_CASE("simulate_sparse: ball events stay near the true trajectory") {
  const auto scene = scenes::moving_disk(128, 96, 3, 6.0, 6.0, 100.0, 70, 235, 0);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::sparse);
  Simulator sim(config);
  sim.push_frame(scene.frames[0]);
  for (int k = 1; k < 3; ++k) {
    const EventStream out = sim.push_frame(scene.frames[k]);
    REQUIRE(!out.events.empty());
    // Bounding box of the true motion for this interval, grown by one diameter.
    const auto [ax, ay] = scene.centers[k - 1];
    const auto [bx, by] = scene.centers[k];
    const double margin = 2.0 * 6.0;
    for (const auto& e : out.events) {
      CHECK(e.x >= std::min(ax, bx) - margin);
      CHECK(e.x <= std::max(ax, bx) + margin);
      CHECK(e.y >= std::min(ay, by) - margin);
      CHECK(e.y <= std::max(ay, by) + margin);
    }
  }
}

TEST_CASE("simulate_difference: static scene emits nothing") {
  const auto frames = identical_frames(3);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::difference_interp);
  CHECK(simulate_difference(frames[0], frames[1], frames[2], config).events.empty());
}

TEST_CASE("simulate_difference: rejects non-increasing timestamps") {
  const Frame a(8, 8, 0), b(8, 8, 10), c(8, 8, 10);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::difference_interp);
  CHECK_THROWS_AS(simulate_difference(a, b, c, config), std::invalid_argument);
}

TEST_CASE("simulate_difference: dot events stay on the trajectory line") {
  const auto scene = scenes::constant_velocity_dot(160, 120, 6, 12.0);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::difference_interp);
  Simulator sim(config);
  sim.push_frame(scene.frames[0]);
  sim.push_frame(scene.frames[1]);
  for (int k = 2; k < 6; ++k) {
    const EventStream out = sim.push_frame(scene.frames[k]);
    REQUIRE(!out.events.empty());
    std::set<time_us> stamps;
    for (const auto& e : out.events) stamps.insert(e.t);
    for (const time_us t : stamps) {
      for (const int polarity : {+1, -1}) {
        const auto c = testutil::centroid(out.events, t, polarity);
        if (c.count == 0) continue;
        CHECK(testutil::point_polyline_distance(c.x, c.y, scene.centers) < 1.0);
      }
    }
  }
}

TEST_CASE("simulate_difference: per-sub-interval positive counts stay balanced") {
  const auto scene = scenes::constant_velocity_dot(200, 120, 4, 10.0);
  const SimulatorConfig config = SimulatorConfig::defaults(Method::difference_interp);
  Simulator sim(config);
  sim.push_frame(scene.frames[0]);
  sim.push_frame(scene.frames[1]);
  const EventStream out = sim.push_frame(scene.frames[2]);
  REQUIRE(!out.events.empty());

  std::map<time_us, int> positive_counts;
  for (const auto& e : out.events) {
    if (e.p > 0) positive_counts[e.t]++;
  }
  REQUIRE(positive_counts.size() > 1);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& [t, n] : positive_counts) {
    sum += n;
    sum_sq += static_cast<double>(n) * n;
  }
  const double mean = sum / positive_counts.size();
  const double var = sum_sq / positive_counts.size() - mean * mean;
  const double cv = std::sqrt(std::max(0.0, var)) / mean;
  CHECK(cv < 0.5);
}

TEST_CASE("all methods: event timestamps stay in (t_prev, t_curr]") {
  for (const Method m : {Method::difference_only, Method::dense, Method::sparse,
                         Method::difference_interp}) {
    SimulatorConfig config = SimulatorConfig::defaults(m);
    config.c_pos = 2;
    config.c_neg = -2;
    Simulator sim(config);
    std::mt19937 rng(101);
    time_us prev_t = -1;
    for (int k = 0; k < 5; ++k) {
      const time_us t = 700 * k;
      const EventStream out = sim.push_frame(testutil::random_frame(12, 12, t, rng));
      for (const auto& e : out.events) {
        CHECK(e.t > prev_t);
        CHECK(e.t <= t);
        CHECK(e.x < 12);
        CHECK(e.y < 12);
      }
      prev_t = t;
    }
  }
}

TEST_CASE("all methods: streams concatenate into a valid ordered stream") {
  const auto scene = scenes::moving_disk(96, 72, 5, 5.0, 5.0, 100.0, 60, 220, 0);
  for (const Method m : {Method::difference_only, Method::dense, Method::sparse,
                         Method::difference_interp}) {
    Simulator sim(SimulatorConfig::defaults(m));
    EventStream all{96, 72, {}};
    for (const auto& f : scene.frames) all.append(sim.push_frame(f));
    CHECK(std::is_sorted(all.events.begin(), all.events.end(), event_order));
  }
}

namespace {

// Stub backend returning a fixed displacement everywhere.
class ConstantFlow final : public DenseFlowEstimator {
 public:
  ConstantFlow(float du, float dv) : du_(du), dv_(dv) {}
  FlowField estimate(const Frame& prev, const Frame&) const override {
    FlowField f(prev.width, prev.height);
    std::fill(f.du.begin(), f.du.end(), du_);
    std::fill(f.dv.begin(), f.dv.end(), dv_);
    return f;
  }

 private:
  float du_;
  float dv_;
};

}  // namespace

TEST_CASE("simulate_dense: alternate flow backends plug in behind the interface") {
  std::mt19937 rng(64);
  const Frame a = testutil::random_frame(16, 16, 0, rng);
  const Frame b = testutil::random_frame(16, 16, 800, rng);
  SimulatorConfig config = SimulatorConfig::defaults(Method::dense);
  config.n_interp = 2;

  const ConstantFlow stub(1.5f, -0.5f);
  const EventStream via_interface = simulate_dense(a, b, config, stub);
  const EventStream via_field = dense_events_with_flow(a, b, stub.estimate(a, b), config);
  CHECK(via_interface.events == via_field.events);
}

TEST_CASE("all methods: two runs over one sequence are byte-identical") {
  const auto scene = scenes::moving_disk(96, 72, 4, 5.0, 6.0, 100.0, 60, 220, 13);
  for (const Method m : {Method::difference_only, Method::dense, Method::sparse,
                         Method::difference_interp}) {
    std::vector<Event> first, second;
    for (auto* sink : {&first, &second}) {
      Simulator sim(SimulatorConfig::defaults(m));
      for (const auto& f : scene.frames) {
        const auto out = sim.push_frame(f);
        sink->insert(sink->end(), out.events.begin(), out.events.end());
      }
    }
    CHECK(first == second);
  }
}
