#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evsim {

/// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct ImageU8 {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;
};

/// Reads a PNG or PNM (P2/P3/P5/P6) file, detected by magic bytes.
/// Throws std::runtime_error naming the path on missing or corrupt input.
ImageU8 read_image(const std::string& path);

/// Writes PNG or PNM depending on the file extension (.png, .pgm, .ppm).
void write_image(const ImageU8& img, const std::string& path);

}  // namespace evsim
