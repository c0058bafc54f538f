#include "evsim/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace evsim {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("image '" + path + "': " + what);
}

// --- PNM ------------------------------------------------------------------

int pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then reads one non-negative integer.
  for (;;) {
    const int c = in.peek();
    if (c == EOF) return -1;
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) return -1;
  return value;
}

ImageU8 read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char p = 0, kind = 0;
  in.get(p).get(kind);
  if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6')) {
    fail(path, "unsupported PNM type");
  }
  const bool color = kind == '3' || kind == '6';
  const bool ascii = kind == '2' || kind == '3';

  ImageU8 img;
  img.width = pnm_token(in);
  img.height = pnm_token(in);
  const int maxval = pnm_token(in);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
    fail(path, "bad PNM header");
  }
  img.channels = color ? 3 : 1;
  const std::size_t n =
      static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.data.resize(n);

  if (ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = pnm_token(in);
      if (v < 0 || v > maxval) fail(path, "truncated or invalid PNM data");
      img.data[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  } else {
    in.get();  // single whitespace after the header
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) fail(path, "truncated PNM data");
    if (maxval != 255) {
      for (auto& v : img.data) v = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return img;
}

void write_pnm(const ImageU8& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) fail(path, "write failed");
}

// --- PNG ------------------------------------------------------------------

ImageU8 read_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    fail(path, png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  ImageU8 img;
  img.width = static_cast<int>(png.width);
  img.height = static_cast<int>(png.height);
  img.channels = color ? 3 : 1;
  img.data.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, img.data.data(), 0, nullptr)) {
    fail(path, png.message);
  }
  return img;
}

void write_png(const ImageU8& img, const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.data.data(), 0, nullptr)) {
    fail(path, png.message);
  }
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ImageU8 read_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(path, "cannot open");
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();

  if (magic[0] == 0x89 && magic[1] == 'P') return read_png(path);
  if (magic[0] == 'P') return read_pnm(path);
  fail(path, "unrecognized image format");
}

void write_image(const ImageU8& img, const std::string& path) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    fail(path, "malformed image buffer");
  }
  if (has_suffix(path, ".pgm") || has_suffix(path, ".ppm")) {
    write_pnm(img, path);
  } else {
    write_png(img, path);
  }
}

}  // namespace evsim
