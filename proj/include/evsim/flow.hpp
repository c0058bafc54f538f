#pragma once

#include "evsim/types.hpp"

namespace evsim {

/// Dense per-pixel 2D displacement mapping the earlier frame toward the later
/// one, in pixels per frame interval. Fractional values allowed.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> du;
  std::vector<float> dv;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h),
        du(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0f),
        dv(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0f) {}

  float u_at(int x, int y) const { return du[static_cast<std::size_t>(y) * width + x]; }
  float v_at(int x, int y) const { return dv[static_cast<std::size_t>(y) * width + x]; }
};

struct PixelPoint {
  int x = 0;
  int y = 0;
};

struct Displacement {
  float du = 0.0f;
  float dv = 0.0f;
};

/// Point-set displacements. Points whose solve failed carry status 0 (lost)
/// and must be skipped by consumers.
struct SparseFlow {
  std::vector<PixelPoint> points;
  std::vector<Displacement> displacements;
  std::vector<std::uint8_t> status;  // 1 = tracked, 0 = lost
};

/// Estimator knobs. Both estimators share the same pyramid/patch machinery,
/// so one preset drives the speed/quality trade-off for either.
struct FlowPreset {
  int pyramid_levels = 3;
  int iterations_per_level = 2;
  int patch_radius = 4;

  void validate() const {
    if (pyramid_levels < 1 || iterations_per_level < 1 || patch_radius < 1) {
      throw std::invalid_argument("FlowPreset: all fields must be >= 1");
    }
  }
};

inline FlowPreset flow_preset(FlowQuality q) {
  return q == FlowQuality::low_quality ? FlowPreset{3, 2, 4} : FlowPreset{5, 16, 6};
}

/// Coarse-to-fine dense estimator: per-patch gradient solves on a grid at
/// every pyramid level, densified by bilinear interpolation between patch
/// centers. Uniform inputs yield exactly zero flow. Deterministic.
FlowField estimate_dense_flow(const Frame& prev, const Frame& curr, const FlowPreset& preset);

/// Pyramidal Lucas-Kanade at the given points. Points in flat regions
/// (singular normal matrix), diverging solves, and tracks leaving the frame
/// are flagged lost. An empty point set returns an empty result.
SparseFlow estimate_sparse_flow(const Frame& prev, const Frame& curr,
                                const std::vector<PixelPoint>& points, const FlowPreset& preset);

/// Estimator interfaces so other flow backends can be plugged into the
/// simulation pipelines.
class DenseFlowEstimator {
 public:
  virtual ~DenseFlowEstimator() = default;
  virtual FlowField estimate(const Frame& prev, const Frame& curr) const = 0;
};

class SparseFlowEstimator {
 public:
  virtual ~SparseFlowEstimator() = default;
  virtual SparseFlow estimate(const Frame& prev, const Frame& curr,
                              const std::vector<PixelPoint>& points) const = 0;
};

/// Default dense backend: the pyramid/patch-grid estimator above.
class PyramidalPatchFlow final : public DenseFlowEstimator {
 public:
  explicit PyramidalPatchFlow(FlowPreset preset) : preset_(preset) { preset_.validate(); }
  FlowField estimate(const Frame& prev, const Frame& curr) const override {
    return estimate_dense_flow(prev, curr, preset_);
  }

 private:
  FlowPreset preset_;
};

/// Default sparse backend.
class PyramidalLucasKanade final : public SparseFlowEstimator {
 public:
  explicit PyramidalLucasKanade(FlowPreset preset) : preset_(preset) { preset_.validate(); }
  SparseFlow estimate(const Frame& prev, const Frame& curr,
                      const std::vector<PixelPoint>& points) const override {
    return estimate_sparse_flow(prev, curr, points, preset_);
  }

 private:
  FlowPreset preset_;
};

}  // namespace evsim
