#include "evsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "evsim/image.hpp"

namespace evsim {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("'" + path + "': " + what);
}

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 8;
constexpr std::size_t kRecordSize = 2 + 2 + 8 + 1;

}  // namespace

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

Frame resize_bilinear(const Frame& src, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("resize_bilinear: target must be positive");
  }
  Frame dst(width, height, src.timestamp);
  const float sx_ratio = static_cast<float>(src.width) / static_cast<float>(width);
  const float sy_ratio = static_cast<float>(src.height) / static_cast<float>(height);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    float sy = (static_cast<float>(y) + 0.5f) * sy_ratio - 0.5f;
    sy = std::clamp(sy, 0.0f, static_cast<float>(src.height - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const float fy = sy - static_cast<float>(y0);
    for (int x = 0; x < width; ++x, ++i) {
      float sx = (static_cast<float>(x) + 0.5f) * sx_ratio - 0.5f;
      sx = std::clamp(sx, 0.0f, static_cast<float>(src.width - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const float fx = sx - static_cast<float>(x0);
      const float top = src.at(x0, y0) + fx * (static_cast<float>(src.at(x1, y0)) - src.at(x0, y0));
      const float bot = src.at(x0, y1) + fx * (static_cast<float>(src.at(x1, y1)) - src.at(x0, y1));
      dst.pixels[i] = static_cast<std::uint8_t>(std::lround(top + fy * (bot - top)));
    }
  }
  return dst;
}

std::vector<Frame> load_frames(const FrameSource& source) {
  if (source.fps <= 0.0) throw std::invalid_argument("load_frames: fps must be > 0");
  if (source.paths.empty()) throw std::invalid_argument("load_frames: no input paths");

  std::vector<Frame> frames;
  frames.reserve(source.paths.size());
  for (std::size_t k = 0; k < source.paths.size(); ++k) {
    const std::string& path = source.paths[k];
    const ImageU8 img = read_image(path);

    Frame f(img.width, img.height,
            static_cast<time_us>(std::llround(static_cast<double>(k) * 1e6 / source.fps)));
    if (img.channels == 1) {
      f.pixels = img.data;
    } else {
      for (std::size_t i = 0; i < f.pixel_count(); ++i) {
        f.pixels[i] = luma_bt601(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);
      }
    }

    if (source.target_resolution) {
      const auto [tw, th] = *source.target_resolution;
      if (f.width != tw || f.height != th) f = resize_bilinear(f, tw, th);
    } else if (!frames.empty() &&
               (f.width != frames.front().width || f.height != frames.front().height)) {
      fail(path, "resolution differs from the first frame and no resize target is set");
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_events_text(const EventStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  std::string buf;
  buf.reserve(1 << 16);
  for (const auto& e : stream.events) {
    buf += std::to_string(e.x);
    buf += ',';
    buf += std::to_string(e.y);
    buf += ',';
    buf += std::to_string(e.t);
    buf += ',';
    buf += (e.p > 0 ? "1" : "-1");
    buf += '\n';
    if (buf.size() > (1 << 16) - 64) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(path, "write failed");
}

EventStream read_events_text(const std::string& path, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  EventStream stream{width, height, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    long long x, y, t, p;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lld,%lld", &x, &y, &t, &p) != 4 ||
        (p != 1 && p != -1) || x < 0 || y < 0) {
      fail(path, "malformed event on line " + std::to_string(line_no));
    }
    stream.events.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                  static_cast<time_us>(t), static_cast<std::int8_t>(p)});
  }
  return stream;
}

void write_events_binary(const EventStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");

  std::string buf;
  buf.reserve(kHeaderSize + kRecordSize * std::min<std::size_t>(stream.events.size(), 1 << 16));
  buf += "EVS1";
  put_u16(buf, static_cast<std::uint16_t>(stream.width));
  put_u16(buf, static_cast<std::uint16_t>(stream.height));
  put_u64(buf, stream.events.size());
  for (const auto& e : stream.events) {
    put_u16(buf, e.x);
    put_u16(buf, e.y);
    put_u64(buf, static_cast<std::uint64_t>(e.t));
    buf.push_back(static_cast<char>(e.p));
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(path, "write failed");
}

EventStream read_events_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  unsigned char header[kHeaderSize];
  in.read(reinterpret_cast<char*>(header), kHeaderSize);
  if (static_cast<std::size_t>(in.gcount()) != kHeaderSize) fail(path, "truncated header");
  if (std::memcmp(header, "EVS1", 4) != 0) fail(path, "bad magic, not an event file");

  EventStream stream;
  stream.width = get_u16(header + 4);
  stream.height = get_u16(header + 6);
  const std::uint64_t count = get_u64(header + 8);

  std::vector<unsigned char> buf(kRecordSize * 4096);
  stream.events.reserve(static_cast<std::size_t>(count));
  std::uint64_t remaining = count;
  while (remaining > 0) {
    const std::size_t batch =
        static_cast<std::size_t>(std::min<std::uint64_t>(remaining, 4096));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(batch * kRecordSize));
    if (static_cast<std::size_t>(in.gcount()) != batch * kRecordSize) {
      fail(path, "truncated event data");
    }
    for (std::size_t i = 0; i < batch; ++i) {
      const unsigned char* p = buf.data() + i * kRecordSize;
      Event e;
      e.x = get_u16(p);
      e.y = get_u16(p + 2);
      e.t = static_cast<time_us>(get_u64(p + 4));
      e.p = static_cast<std::int8_t>(p[12]);
      if (e.p != 1 && e.p != -1) fail(path, "invalid polarity in event data");
      stream.events.push_back(e);
    }
    remaining -= batch;
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(path, "trailing bytes after the declared event count");
  }
  return stream;
}

void render_accumulated(const AccumulatedFrame& frame, const std::string& path) {
  ImageU8 img;
  img.width = frame.width;
  img.height = frame.height;
  img.channels = 3;
  img.data.resize(static_cast<std::size_t>(frame.width) * frame.height * 3);
  static constexpr std::uint8_t palette[4][3] = {
      {255, 255, 255},  // none: white
      {0, 0, 255},      // positive: blue
      {255, 0, 0},      // negative: red
      {0, 255, 0},      // both: green
  };
  for (std::size_t i = 0; i < frame.classes.size(); ++i) {
    const auto& color = palette[static_cast<std::uint8_t>(frame.classes[i])];
    img.data[3 * i] = color[0];
    img.data[3 * i + 1] = color[1];
    img.data[3 * i + 2] = color[2];
  }
  write_image(img, path);
}

void write_frame(const Frame& frame, const std::string& path) {
  ImageU8 img;
  img.width = frame.width;
  img.height = frame.height;
  img.channels = 1;
  img.data = frame.pixels;
  write_image(img, path);
}

}  // namespace evsim
