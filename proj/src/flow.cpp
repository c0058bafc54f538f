#include "evsim/flow.hpp"

#include <algorithm>
#include <cmath>

namespace evsim {
namespace {

constexpr double kMinEigPerPixel = 1e-4;  // below this the normal matrix counts as singular
constexpr int kMinPyramidExtent = 8;

struct Image {
  int w = 0;
  int h = 0;
  std::vector<float> v;

  Image() = default;
  Image(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, 0.0f) {}
  float at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  float& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
};

Image to_float(const Frame& f) {
  Image im(f.width, f.height);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) im.v[i] = static_cast<float>(f.pixels[i]);
  return im;
}

// 2x2 box average; odd edges replicate the last row/column.
Image downsample(const Image& src) {
  Image dst((src.w + 1) / 2, (src.h + 1) / 2);
  for (int y = 0; y < dst.h; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, src.h - 1);
    for (int x = 0; x < dst.w; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, src.w - 1);
      dst.at(x, y) = 0.25f * (src.at(x0, y0) + src.at(x1, y0) + src.at(x0, y1) + src.at(x1, y1));
    }
  }
  return dst;
}

// Bilinear sample with replicate borders.
float sample(const Image& im, float x, float y) {
  x = std::clamp(x, 0.0f, static_cast<float>(im.w - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(im.h - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, im.w - 1);
  const int y1 = std::min(y0 + 1, im.h - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);
  const float top = im.at(x0, y0) + fx * (im.at(x1, y0) - im.at(x0, y0));
  const float bot = im.at(x0, y1) + fx * (im.at(x1, y1) - im.at(x0, y1));
  return top + fy * (bot - top);
}

// Central differences with replicate padding.
void gradients(const Image& im, Image& gx, Image& gy) {
  gx = Image(im.w, im.h);
  gy = Image(im.w, im.h);
  for (int y = 0; y < im.h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, im.h - 1);
    for (int x = 0; x < im.w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, im.w - 1);
      gx.at(x, y) = 0.5f * (im.at(xp, y) - im.at(xm, y));
      gy.at(x, y) = 0.5f * (im.at(x, yp) - im.at(x, ym));
    }
  }
}

int effective_levels(int requested, int w, int h) {
  int levels = std::max(1, requested);
  while (levels > 1 && (std::min(w, h) >> (levels - 1)) < kMinPyramidExtent) --levels;
  return levels;
}

std::vector<Image> build_pyramid(const Frame& f, int levels) {
  std::vector<Image> pyr;
  pyr.reserve(levels);
  pyr.push_back(to_float(f));
  for (int l = 1; l < levels; ++l) pyr.push_back(downsample(pyr.back()));
  return pyr;
}

double min_eigenvalue(double gxx, double gxy, double gyy) {
  const double trace = gxx + gyy;
  const double disc = std::sqrt(std::max(0.0, (gxx - gyy) * (gxx - gyy) + 4.0 * gxy * gxy));
  return 0.5 * (trace - disc);
}

// Patch centers covering [0, extent): regular stride, last center pulled in
// so the border is covered; degenerates to one center on tiny images.
std::vector<int> patch_centers(int extent, int radius, int stride) {
  std::vector<int> centers;
  if (extent <= 2 * radius + 1) {
    centers.push_back((extent - 1) / 2);
    return centers;
  }
  const int last = extent - 1 - radius;
  for (int c = radius; c <= last; c += stride) centers.push_back(c);
  if (centers.back() != last) centers.push_back(last);
  return centers;
}

// For each coordinate, the grid cell index and interpolation weight so that
// value(x) = (1 - w) * grid[i] + w * grid[i + 1] (clamped at the grid ends).
void interp_table(const std::vector<int>& centers, int extent, std::vector<int>& idx,
                  std::vector<float>& wgt) {
  idx.assign(extent, 0);
  wgt.assign(extent, 0.0f);
  if (centers.size() < 2) return;
  int j = 0;
  for (int x = 0; x < extent; ++x) {
    if (x <= centers.front()) continue;  // idx 0, weight 0
    if (x >= centers.back()) {
      idx[x] = static_cast<int>(centers.size()) - 2;
      wgt[x] = 1.0f;
      continue;
    }
    while (j + 2 < static_cast<int>(centers.size()) && centers[j + 1] <= x) ++j;
    idx[x] = j;
    wgt[x] = static_cast<float>(x - centers[j]) / static_cast<float>(centers[j + 1] - centers[j]);
  }
}

FlowField upsample_flow(const FlowField& coarse, int w, int h) {
  FlowField fine(w, h);
  Image cu(coarse.width, coarse.height), cv(coarse.width, coarse.height);
  cu.v = coarse.du;
  cv.v = coarse.dv;
  const float rx = static_cast<float>(coarse.width) / static_cast<float>(w);
  const float ry = static_cast<float>(coarse.height) / static_cast<float>(h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    const float sy = (static_cast<float>(y) + 0.5f) * ry - 0.5f;
    for (int x = 0; x < w; ++x, ++i) {
      const float sx = (static_cast<float>(x) + 0.5f) * rx - 0.5f;
      fine.du[i] = sample(cu, sx, sy) / rx;
      fine.dv[i] = sample(cv, sx, sy) / ry;
    }
  }
  return fine;
}

// One pyramid level: LK solves on the patch grid (seeded from the incoming
// flow), then bilinear densification between patch centers. Patches with a
// singular normal matrix keep the seeded estimate.
FlowField solve_level(const Image& prev, const Image& gx, const Image& gy, const Image& curr,
                      const FlowField& init, const FlowPreset& preset) {
  const int w = prev.w;
  const int h = prev.h;
  const int r = preset.patch_radius;
  const int stride = std::max(1, r);
  const auto cxs = patch_centers(w, r, stride);
  const auto cys = patch_centers(h, r, stride);
  const int ncx = static_cast<int>(cxs.size());
  const int ncy = static_cast<int>(cys.size());
  const int patch_pixels = (2 * r + 1) * (2 * r + 1);
  const float max_step = static_cast<float>(r);

  std::vector<float> pu(static_cast<std::size_t>(ncx) * ncy);
  std::vector<float> pv(static_cast<std::size_t>(ncx) * ncy);
  std::vector<float> tgx(patch_pixels), tgy(patch_pixels), tval(patch_pixels);
  std::vector<int> txs(patch_pixels), tys(patch_pixels);

  for (int j = 0; j < ncy; ++j) {
    const int cy = cys[j];
    for (int i = 0; i < ncx; ++i) {
      const int cx = cxs[i];
      float u = init.u_at(cx, cy);
      float v = init.v_at(cx, cy);

      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      int n = 0;
      for (int oy = -r; oy <= r; ++oy) {
        const int py = std::clamp(cy + oy, 0, h - 1);
        for (int ox = -r; ox <= r; ++ox, ++n) {
          const int px = std::clamp(cx + ox, 0, w - 1);
          const float a = gx.at(px, py);
          const float b = gy.at(px, py);
          tgx[n] = a;
          tgy[n] = b;
          tval[n] = prev.at(px, py);
          txs[n] = px;
          tys[n] = py;
          gxx += a * a;
          gxy += a * b;
          gyy += b * b;
        }
      }

      if (min_eigenvalue(gxx, gxy, gyy) > kMinEigPerPixel * patch_pixels) {
        const double inv_det = 1.0 / (gxx * gyy - gxy * gxy);
        // Fixed iteration budget per preset; the budget is the knob that
        // separates the quality presets.
        for (int it = 0; it < preset.iterations_per_level; ++it) {
          double b1 = 0.0, b2 = 0.0;
          for (int k = 0; k < patch_pixels; ++k) {
            const float residual = sample(curr, txs[k] + u, tys[k] + v) - tval[k];
            b1 += tgx[k] * residual;
            b2 += tgy[k] * residual;
          }
          float du = static_cast<float>(-(gyy * b1 - gxy * b2) * inv_det);
          float dv = static_cast<float>(-(gxx * b2 - gxy * b1) * inv_det);
          du = std::clamp(du, -max_step, max_step);
          dv = std::clamp(dv, -max_step, max_step);
          u += du;
          v += dv;
        }
      }
      pu[static_cast<std::size_t>(j) * ncx + i] = u;
      pv[static_cast<std::size_t>(j) * ncx + i] = v;
    }
  }

  std::vector<int> ix, iy;
  std::vector<float> wx, wy;
  interp_table(cxs, w, ix, wx);
  interp_table(cys, h, iy, wy);
  const auto grid = [&](const std::vector<float>& g, int i, int j) {
    i = std::min(i, ncx - 1);
    j = std::min(j, ncy - 1);
    return g[static_cast<std::size_t>(j) * ncx + i];
  };

  FlowField out(w, h);
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    const int j = iy[y];
    const float fy = wy[y];
    for (int x = 0; x < w; ++x, ++idx) {
      const int i = ix[x];
      const float fx = wx[x];
      const float u_top = grid(pu, i, j) + fx * (grid(pu, i + 1, j) - grid(pu, i, j));
      const float u_bot = grid(pu, i, j + 1) + fx * (grid(pu, i + 1, j + 1) - grid(pu, i, j + 1));
      const float v_top = grid(pv, i, j) + fx * (grid(pv, i + 1, j) - grid(pv, i, j));
      const float v_bot = grid(pv, i, j + 1) + fx * (grid(pv, i + 1, j + 1) - grid(pv, i, j + 1));
      out.du[idx] = u_top + fy * (u_bot - u_top);
      out.dv[idx] = v_top + fy * (v_bot - v_top);
    }
  }
  return out;
}

void check_pair(const Frame& prev, const Frame& curr, const char* who) {
  if (prev.width <= 0 || prev.height <= 0 || curr.width <= 0 || curr.height <= 0) {
    throw std::invalid_argument(std::string(who) + ": empty frame");
  }
  if (prev.width != curr.width || prev.height != curr.height) {
    throw std::invalid_argument(std::string(who) + ": incompatible input frames");
  }
}

}  // namespace

FlowField estimate_dense_flow(const Frame& prev, const Frame& curr, const FlowPreset& preset) {
  preset.validate();
  check_pair(prev, curr, "estimate_dense_flow");

  const int levels = effective_levels(preset.pyramid_levels, prev.width, prev.height);
  const auto pyr_prev = build_pyramid(prev, levels);
  const auto pyr_curr = build_pyramid(curr, levels);

  FlowField flow(pyr_prev.back().w, pyr_prev.back().h);
  for (int l = levels - 1; l >= 0; --l) {
    if (l != levels - 1) flow = upsample_flow(flow, pyr_prev[l].w, pyr_prev[l].h);
    Image gx, gy;
    gradients(pyr_prev[l], gx, gy);
    flow = solve_level(pyr_prev[l], gx, gy, pyr_curr[l], flow, preset);
  }
  return flow;
}

SparseFlow estimate_sparse_flow(const Frame& prev, const Frame& curr,
                                const std::vector<PixelPoint>& points, const FlowPreset& preset) {
  preset.validate();
  check_pair(prev, curr, "estimate_sparse_flow");
  for (const auto& p : points) {
    if (p.x < 0 || p.x >= prev.width || p.y < 0 || p.y >= prev.height) {
      throw std::invalid_argument("estimate_sparse_flow: point outside frame bounds");
    }
  }

  SparseFlow out;
  out.points = points;
  out.displacements.assign(points.size(), Displacement{});
  out.status.assign(points.size(), 0);
  if (points.empty()) return out;

  const int levels = effective_levels(preset.pyramid_levels, prev.width, prev.height);
  const auto pyr_prev = build_pyramid(prev, levels);
  const auto pyr_curr = build_pyramid(curr, levels);
  std::vector<Image> pgx(levels), pgy(levels);
  for (int l = 0; l < levels; ++l) gradients(pyr_prev[l], pgx[l], pgy[l]);

  const int r = preset.patch_radius;
  const int patch_pixels = (2 * r + 1) * (2 * r + 1);
  const float max_step = static_cast<float>(r);
  const float diverge_limit = 2.0f * static_cast<float>(std::max(prev.width, prev.height));
  std::vector<float> tgx(patch_pixels), tgy(patch_pixels), tval(patch_pixels);

  const float w0 = static_cast<float>(prev.width);
  const float h0 = static_cast<float>(prev.height);

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    float u = 0.0f, v = 0.0f;
    bool lost = false;
    bool solved_any = false;

    for (int l = levels - 1; l >= 0 && !lost; --l) {
      const Image& P = pyr_prev[l];
      const Image& C = pyr_curr[l];
      const float px = (static_cast<float>(points[pi].x) + 0.5f) * (P.w / w0) - 0.5f;
      const float py = (static_cast<float>(points[pi].y) + 0.5f) * (P.h / h0) - 0.5f;
      if (l != levels - 1) {
        u *= static_cast<float>(P.w) / static_cast<float>(pyr_prev[l + 1].w);
        v *= static_cast<float>(P.h) / static_cast<float>(pyr_prev[l + 1].h);
      }

      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      int n = 0;
      for (int oy = -r; oy <= r; ++oy) {
        for (int ox = -r; ox <= r; ++ox, ++n) {
          const float sx = px + static_cast<float>(ox);
          const float sy = py + static_cast<float>(oy);
          const float a = sample(pgx[l], sx, sy);
          const float b = sample(pgy[l], sx, sy);
          tgx[n] = a;
          tgy[n] = b;
          tval[n] = sample(P, sx, sy);
          gxx += a * a;
          gxy += a * b;
          gyy += b * b;
        }
      }
      if (min_eigenvalue(gxx, gxy, gyy) <= kMinEigPerPixel * patch_pixels) {
        continue;  // no information at this level; a point flat at every level is lost below
      }
      solved_any = true;
      const double inv_det = 1.0 / (gxx * gyy - gxy * gxy);

      for (int it = 0; it < preset.iterations_per_level; ++it) {
        double b1 = 0.0, b2 = 0.0;
        int k = 0;
        for (int oy = -r; oy <= r; ++oy) {
          for (int ox = -r; ox <= r; ++ox, ++k) {
            const float residual =
                sample(C, px + static_cast<float>(ox) + u, py + static_cast<float>(oy) + v) -
                tval[k];
            b1 += tgx[k] * residual;
            b2 += tgy[k] * residual;
          }
        }
        float du = static_cast<float>(-(gyy * b1 - gxy * b2) * inv_det);
        float dv = static_cast<float>(-(gxx * b2 - gxy * b1) * inv_det);
        du = std::clamp(du, -max_step, max_step);
        dv = std::clamp(dv, -max_step, max_step);
        u += du;
        v += dv;
        if (std::abs(u) > diverge_limit || std::abs(v) > diverge_limit) {
          lost = true;
          break;
        }
        if (du * du + dv * dv < 1e-6f) break;
      }
    }

    const float fx = static_cast<float>(points[pi].x) + u;
    const float fy = static_cast<float>(points[pi].y) + v;
    if (!solved_any || fx < 0.0f || fx > w0 - 1.0f || fy < 0.0f || fy > h0 - 1.0f) {
      lost = true;
    }
    out.displacements[pi] = Displacement{u, v};
    out.status[pi] = lost ? 0 : 1;
  }
  return out;
}

}  // namespace evsim
