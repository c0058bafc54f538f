#pragma once

#include <functional>

#include "evsim/types.hpp"

namespace evsim {

/// Mean per-frame latency below this counts as real-time capable.
constexpr double kRealTimeLimitMs = 30.0;

struct RuntimeStats {
  double mean_ms = 0.0;  // per-frame mean across runs
  double std_ms = 0.0;   // sample standard deviation across runs
  int runs = 0;
  int total_frames = 0;
  bool real_time = false;
};

/// Times `pass` over the preloaded frames: one untimed warm-up pass, then
/// `runs` timed passes. Reported numbers are per frame (total / frame count).
/// Ingestion and serialization stay outside the measured region by design of
/// the interface: frames are already in memory and output is discarded.
RuntimeStats bench_callable(const std::function<void(const std::vector<Frame>&)>& pass,
                            const std::vector<Frame>& frames, int runs);

/// Feeds every frame through a fresh simulator per pass.
RuntimeStats bench_method(const SimulatorConfig& config, const std::vector<Frame>& frames,
                          int runs);

enum class BenchScene { high_dynamics, low_dynamics };

struct BenchRow {
  Method method;
  FlowQuality preset;
  RuntimeStats stats;
};

/// Runs methods on the named synthetic scene. An empty selection means the
/// full matrix: every method at both flow presets.
std::vector<BenchRow> bench_suite(BenchScene scene, int width, int height, int n_frames,
                                  int runs = 10,
                                  const std::vector<std::pair<Method, FlowQuality>>& selection = {});

/// Machine-readable table, one header line then one line per row.
std::string bench_table_csv(const std::vector<BenchRow>& rows);

inline const char* bench_scene_name(BenchScene s) {
  return s == BenchScene::high_dynamics ? "high_dynamics" : "low_dynamics";
}

}  // namespace evsim
