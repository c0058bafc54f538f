#include "evsim/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "evsim/scenes.hpp"
#include "evsim/simulate.hpp"

namespace evsim {
namespace {

volatile std::uint64_t g_sink = 0;  // keeps the measured work observable

}  // namespace

RuntimeStats bench_callable(const std::function<void(const std::vector<Frame>&)>& pass,
                            const std::vector<Frame>& frames, int runs) {
  if (frames.empty()) throw std::invalid_argument("bench: frame sequence is empty");
  if (runs < 1) throw std::invalid_argument("bench: runs must be >= 1");

  pass(frames);  // warm-up, untimed

  std::vector<double> per_frame_ms;
  per_frame_ms.reserve(runs);
  for (int r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    pass(frames);
    const auto stop = std::chrono::steady_clock::now();
    const double total_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    per_frame_ms.push_back(total_ms / static_cast<double>(frames.size()));
  }

  double sum = 0.0;
  for (const double v : per_frame_ms) sum += v;
  const double mean = sum / static_cast<double>(runs);
  double var = 0.0;
  if (runs > 1) {
    for (const double v : per_frame_ms) var += (v - mean) * (v - mean);
    var /= static_cast<double>(runs - 1);
  }

  RuntimeStats stats;
  stats.mean_ms = mean;
  stats.std_ms = std::sqrt(var);
  stats.runs = runs;
  stats.total_frames = static_cast<int>(frames.size());
  stats.real_time = mean < kRealTimeLimitMs;
  return stats;
}

RuntimeStats bench_method(const SimulatorConfig& config, const std::vector<Frame>& frames,
                          int runs) {
  config.validate();
  return bench_callable(
      [&config](const std::vector<Frame>& seq) {
        Simulator sim(config);
        std::uint64_t produced = 0;
        for (const auto& frame : seq) produced += sim.push_frame(frame).events.size();
        g_sink = g_sink + produced;
      },
      frames, runs);
}

std::vector<BenchRow> bench_suite(BenchScene scene, int width, int height, int n_frames, int runs,
                                  const std::vector<std::pair<Method, FlowQuality>>& selection) {
  const std::vector<Frame> frames = scene == BenchScene::high_dynamics
                                        ? scenes::high_dynamics_scene(width, height, n_frames)
                                        : scenes::low_dynamics_scene(width, height, n_frames);

  std::vector<std::pair<Method, FlowQuality>> todo = selection;
  if (todo.empty()) {
    for (const Method method : {Method::difference_only, Method::dense, Method::sparse,
                                Method::difference_interp}) {
      for (const FlowQuality preset : {FlowQuality::low_quality, FlowQuality::high_quality}) {
        todo.emplace_back(method, preset);
      }
    }
  }

  std::vector<BenchRow> rows;
  rows.reserve(todo.size());
  for (const auto& [method, preset] : todo) {
    SimulatorConfig config = SimulatorConfig::defaults(method);
    config.flow_preset = preset;
    rows.push_back({method, preset, bench_method(config, frames, runs)});
  }
  return rows;
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "method,preset,mean_ms,std_ms,runs,frames,real_time\n";
  for (const auto& row : rows) {
    out << method_name(row.method) << ',' << flow_quality_name(row.preset) << ','
        << row.stats.mean_ms << ',' << row.stats.std_ms << ',' << row.stats.runs << ','
        << row.stats.total_frames << ',' << (row.stats.real_time ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace evsim
