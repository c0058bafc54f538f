#pragma once

#include <optional>
#include <string>

#include "evsim/metrics.hpp"
#include "evsim/types.hpp"

namespace evsim {

/// An ordered image sequence plus the sampling rate it was captured at.
struct FrameSource {
  std::vector<std::string> paths;
  double fps = 0.0;
  /// When set, frames are bilinearly resized to (width, height) on load.
  std::optional<std::pair<int, int>> target_resolution;
};

/// Loads the sequence: decodes each image, converts color inputs to
/// grayscale with integer BT.601 luma, optionally resizes, and stamps frame k
/// with round(k * 1e6 / fps) microseconds. Mixed input resolutions are an
/// error unless a resize target is set.
std::vector<Frame> load_frames(const FrameSource& source);

/// Grayscale conversion and resize, exposed for reuse and tests.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);
Frame resize_bilinear(const Frame& src, int width, int height);

/// Text format: one "x,y,t,p" line per event, p in {1,-1}.
void write_events_text(const EventStream& stream, const std::string& path);
EventStream read_events_text(const std::string& path, int width, int height);

/// Binary format: magic "EVS1", u16 width, u16 height, u64 event count, then
/// packed little-endian records (u16 x, u16 y, u64 t, i8 p).
void write_events_binary(const EventStream& stream, const std::string& path);
EventStream read_events_binary(const std::string& path);

/// Accumulation image with the fixed palette: none = white, positive = blue,
/// negative = red, both = green. PNG or PPM chosen by extension.
void render_accumulated(const AccumulatedFrame& frame, const std::string& path);

/// Writes one grayscale frame as .pgm or .png (by extension).
void write_frame(const Frame& frame, const std::string& path);

}  // namespace evsim
