#include "evsim/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace evsim {
namespace {

// Bilinear sample of an 8-bit frame with replicate borders.
float sample_u8(const Frame& f, float x, float y) {
  x = std::clamp(x, 0.0f, static_cast<float>(f.width - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(f.height - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, f.width - 1);
  const int y1 = std::min(y0 + 1, f.height - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);
  const float a00 = f.at(x0, y0);
  const float a10 = f.at(x1, y0);
  const float a01 = f.at(x0, y1);
  const float a11 = f.at(x1, y1);
  const float top = a00 + fx * (a10 - a00);
  const float bot = a01 + fx * (a11 - a01);
  return top + fy * (bot - top);
}

void check_pair(const Frame& prev, const Frame& curr, const char* who) {
  if (prev.width != curr.width || prev.height != curr.height) {
    throw std::invalid_argument(std::string(who) + ": incompatible input frames");
  }
}

// Events are produced per sub-frame in scan order; a sort is only needed in
// the degenerate case where sub-intervals collapse onto equal timestamps.
void finalize(EventStream& stream) {
  if (!std::is_sorted(stream.events.begin(), stream.events.end(), event_order)) {
    std::stable_sort(stream.events.begin(), stream.events.end(), event_order);
  }
}

// Difference + threshold over a chain of frames; each link's events carry the
// timestamp of its later frame.
void chain_events(const std::vector<const Frame*>& chain, const SimulatorConfig& config,
                  EventStream& out) {
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const DifferenceFrame diff = difference_frame(*chain[i - 1], *chain[i]);
    threshold_events_into(diff, config, chain[i]->timestamp, out.events);
    if (i == 1) {
      out.events.reserve(out.events.size() * chain.size());
    }
  }
}

// Shared core of the dense and sparse pipelines once the intermediate frames
// exist: run the chain with or without the input frames as endpoints.
EventStream chain_pipeline(const Frame& prev, const Frame& curr,
                           const std::vector<Frame>& intermediates,
                           const SimulatorConfig& config) {
  EventStream out{prev.width, prev.height, {}};
  std::vector<const Frame*> chain;
  chain.reserve(intermediates.size() + 2);
  if (config.include_endpoints) chain.push_back(&prev);
  for (const auto& f : intermediates) chain.push_back(&f);
  if (config.include_endpoints) chain.push_back(&curr);
  chain_events(chain, config, out);
  finalize(out);
  return out;
}

struct SignedPoint {
  int x;
  int y;
  std::int16_t value;
};

// Above-threshold pixels of a difference frame in scan order.
std::vector<SignedPoint> active_points(const DifferenceFrame& diff, const SimulatorConfig& config) {
  std::vector<SignedPoint> pts;
  for (int y = 0; y < diff.height; ++y) {
    for (int x = 0; x < diff.width; ++x) {
      const int v = diff.at(x, y);
      if (v > config.c_pos || v < config.c_neg) pts.push_back({x, y, static_cast<std::int16_t>(v)});
    }
  }
  return pts;
}

}  // namespace

std::vector<Frame> interpolate_frames(const Frame& prev, const Frame& curr, const FlowField& flow,
                                      int n) {
  check_pair(prev, curr, "interpolate_frames");
  if (flow.width != prev.width || flow.height != prev.height) {
    throw std::invalid_argument("interpolate_frames: flow dimensions do not match the frames");
  }
  if (n < 0) throw std::invalid_argument("interpolate_frames: n must be >= 0");

  std::vector<Frame> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    const double alpha = static_cast<double>(k) / static_cast<double>(n + 1);
    const float fwd = static_cast<float>(alpha);
    const float bwd = static_cast<float>(1.0 - alpha);
    Frame f(prev.width, prev.height,
            sub_interval_end(prev.timestamp, curr.timestamp, k, n + 1));
    std::size_t i = 0;
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x, ++i) {
        const float u = flow.du[i];
        const float v = flow.dv[i];
        const float from_prev = sample_u8(prev, x - fwd * u, y - fwd * v);
        const float from_curr = sample_u8(curr, x + bwd * u, y + bwd * v);
        f.pixels[i] = static_cast<std::uint8_t>(
            std::lround((1.0 - alpha) * from_prev + alpha * from_curr));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

EventStream dense_events_with_flow(const Frame& prev, const Frame& curr, const FlowField& flow,
                                   const SimulatorConfig& config) {
  config.validate();
  const std::vector<Frame> intermediates = interpolate_frames(prev, curr, flow, config.n_interp);
  return chain_pipeline(prev, curr, intermediates, config);
}

EventStream simulate_dense(const Frame& prev, const Frame& curr, const SimulatorConfig& config,
                           const DenseFlowEstimator& estimator) {
  config.validate();
  check_pair(prev, curr, "simulate_dense");
  if (config.n_interp == 0) {
    // Degenerate chain; skip the flow solve entirely.
    return chain_pipeline(prev, curr, {}, config);
  }
  return dense_events_with_flow(prev, curr, estimator.estimate(prev, curr), config);
}

EventStream simulate_dense(const Frame& prev, const Frame& curr, const SimulatorConfig& config) {
  return simulate_dense(prev, curr, config, PyramidalPatchFlow(flow_preset(config.flow_preset)));
}

EventStream simulate_sparse(const Frame& prev, const Frame& curr, const SimulatorConfig& config,
                            const SparseFlowEstimator& estimator) {
  config.validate();
  check_pair(prev, curr, "simulate_sparse");
  const int select = config.effective_selection_threshold();
  if (select <= 0) throw std::invalid_argument("simulate_sparse: selection threshold must be > 0");

  // Pixels that changed enough are the only ones worth tracking.
  std::vector<PixelPoint> points;
  for (int y = 0; y < prev.height; ++y) {
    for (int x = 0; x < prev.width; ++x) {
      const int d = std::abs(static_cast<int>(curr.at(x, y)) - static_cast<int>(prev.at(x, y)));
      if (d > select) points.push_back({x, y});
    }
  }

  if (points.empty() || config.n_interp == 0) {
    return chain_pipeline(prev, curr, {}, config);
  }

  const SparseFlow flow = estimator.estimate(prev, curr, points);

  // Move each selected pixel along its track, writing its intensity into a
  // copy of prev. Collisions keep the write with the larger absolute change.
  const int w = prev.width;
  const int h = prev.height;
  std::vector<Frame> intermediates;
  intermediates.reserve(config.n_interp);
  std::vector<int> claim_mark(prev.pixel_count(), -1);
  std::vector<int> claim_change(prev.pixel_count(), 0);
  for (int k = 1; k <= config.n_interp; ++k) {
    const float alpha = static_cast<float>(k) / static_cast<float>(config.n_interp + 1);
    Frame inter = prev;
    inter.timestamp = sub_interval_end(prev.timestamp, curr.timestamp, k, config.n_interp + 1);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (!flow.status[j]) continue;  // lost tracks take no part in interpolation
      const int tx = static_cast<int>(
          std::lround(static_cast<float>(points[j].x) + alpha * flow.displacements[j].du));
      const int ty = static_cast<int>(
          std::lround(static_cast<float>(points[j].y) + alpha * flow.displacements[j].dv));
      if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
      const std::size_t idx = static_cast<std::size_t>(ty) * w + tx;
      const std::uint8_t value = prev.at(points[j].x, points[j].y);
      const int change = std::abs(static_cast<int>(value) - static_cast<int>(prev.pixels[idx]));
      if (claim_mark[idx] != k) {
        claim_mark[idx] = k;
        claim_change[idx] = change;
        inter.pixels[idx] = value;
      } else if (change > claim_change[idx]) {
        claim_change[idx] = change;
        inter.pixels[idx] = value;
      }
    }
    intermediates.push_back(std::move(inter));
  }
  return chain_pipeline(prev, curr, intermediates, config);
}

EventStream simulate_sparse(const Frame& prev, const Frame& curr, const SimulatorConfig& config) {
  return simulate_sparse(prev, curr, config,
                         PyramidalLucasKanade(flow_preset(config.flow_preset)));
}

namespace {

// Core of the difference-interpolation method: d1 is the previous interval's
// difference frame, d2 the newly completed one. Events cover (d2.t_start,
// d2.t_end].
EventStream difference_interp_events(const DifferenceFrame& d1, const DifferenceFrame& d2,
                                     const SimulatorConfig& config,
                                     const SparseFlowEstimator& estimator) {
  const int w = d1.width;
  const int h = d1.height;

  EventStream out{w, h, {}};
  const std::vector<SignedPoint> pts = active_points(d1, config);

  if (!pts.empty() && config.n_interp > 0) {
    // Flow runs on magnitude images; polarity rides along from d1's values.
    Frame m1(w, h, d1.t_end);
    Frame m2(w, h, d2.t_end);
    for (std::size_t i = 0; i < m1.pixel_count(); ++i) {
      m1.pixels[i] = static_cast<std::uint8_t>(std::min(255, std::abs(static_cast<int>(d1.values[i]))));
      m2.pixels[i] = static_cast<std::uint8_t>(std::min(255, std::abs(static_cast<int>(d2.values[i]))));
    }
    std::vector<PixelPoint> track_points;
    track_points.reserve(pts.size());
    for (const auto& p : pts) track_points.push_back({p.x, p.y});
    const SparseFlow flow = estimator.estimate(m1, m2, track_points);

    DifferenceFrame inter(w, h, d2.t_start, d2.t_end);
    std::vector<int> claim_mark(inter.values.size(), -1);
    std::vector<std::size_t> touched;
    for (int k = 1; k <= config.n_interp; ++k) {
      const float alpha = static_cast<float>(k) / static_cast<float>(config.n_interp + 1);
      const time_us t = sub_interval_end(d2.t_start, d2.t_end, k, config.n_interp + 1);
      touched.clear();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (!flow.status[j]) continue;
        const int tx = static_cast<int>(
            std::lround(static_cast<float>(pts[j].x) + alpha * flow.displacements[j].du));
        const int ty = static_cast<int>(
            std::lround(static_cast<float>(pts[j].y) + alpha * flow.displacements[j].dv));
        if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
        const std::size_t idx = static_cast<std::size_t>(ty) * w + tx;
        if (claim_mark[idx] != k) {
          claim_mark[idx] = k;
          inter.values[idx] = pts[j].value;
          touched.push_back(idx);
        } else if (std::abs(static_cast<int>(pts[j].value)) >
                   std::abs(static_cast<int>(inter.values[idx]))) {
          inter.values[idx] = pts[j].value;
        }
      }
      // The warped difference frame is sparse; threshold just its support.
      std::sort(touched.begin(), touched.end());
      for (const std::size_t idx : touched) {
        const int v = inter.values[idx];
        const std::uint16_t ex = static_cast<std::uint16_t>(idx % w);
        const std::uint16_t ey = static_cast<std::uint16_t>(idx / w);
        const bool magnitude = config.events_per_crossing == EventsPerCrossing::magnitude;
        if (v > config.c_pos) {
          int count = magnitude ? v / config.c_pos : 1;
          while (count-- > 0) out.events.push_back({ex, ey, t, 1});
        } else if (v < config.c_neg) {
          int count = magnitude ? v / config.c_neg : 1;
          while (count-- > 0) out.events.push_back({ex, ey, t, -1});
        }
      }
    }
  }

  if (config.include_endpoints) {
    // The newest difference frame emits directly at the interval end.
    threshold_events_into(d2, config, d2.t_end, out.events);
  }
  finalize(out);
  return out;
}

}  // namespace

EventStream simulate_difference(const Frame& f0, const Frame& f1, const Frame& f2,
                                const SimulatorConfig& config,
                                const SparseFlowEstimator& estimator) {
  config.validate();
  check_pair(f0, f1, "simulate_difference");
  check_pair(f1, f2, "simulate_difference");
  if (!(f0.timestamp < f1.timestamp && f1.timestamp < f2.timestamp)) {
    throw std::invalid_argument("simulate_difference: timestamps must be strictly increasing");
  }
  return difference_interp_events(difference_frame(f0, f1), difference_frame(f1, f2), config,
                                  estimator);
}

EventStream simulate_difference(const Frame& f0, const Frame& f1, const Frame& f2,
                                const SimulatorConfig& config) {
  return simulate_difference(f0, f1, f2, config,
                             PyramidalLucasKanade(flow_preset(config.flow_preset)));
}

EventStream Simulator::push_frame(const Frame& frame) {
  if (frame.width <= 0 || frame.height <= 0 ||
      frame.pixels.size() != frame.pixel_count()) {
    throw std::invalid_argument("push_frame: malformed frame");
  }
  if (prev_) {
    if (frame.width != prev_->width || frame.height != prev_->height) {
      throw std::invalid_argument("push_frame: frame dimensions changed mid-stream");
    }
    if (frame.timestamp <= prev_->timestamp) {
      throw std::invalid_argument("push_frame: timestamps must be strictly increasing");
    }
  }

  EventStream out{frame.width, frame.height, {}};
  switch (config_.method) {
    case Method::difference_only:
      if (prev_) {
        const DifferenceFrame diff = difference_frame(*prev_, frame);
        threshold_events_into(diff, config_, frame.timestamp, out.events);
      }
      break;
    case Method::dense:
      if (prev_) out = simulate_dense(*prev_, frame, config_, *dense_flow_);
      break;
    case Method::sparse:
      if (prev_) out = simulate_sparse(*prev_, frame, config_, *sparse_flow_);
      break;
    case Method::difference_interp:
      if (prev_) {
        DifferenceFrame diff = difference_frame(*prev_, frame);
        if (prev_diff_) {
          out = difference_interp_events(*prev_diff_, diff, config_, *sparse_flow_);
        }
        prev_diff_ = std::move(diff);
      }
      break;
  }

  prev_ = frame;
  return out;
}

}  // namespace evsim
