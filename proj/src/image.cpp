// Copyright 2026 The SwitchHit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "switchhit/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "image has zero width or height");
  }
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::kInvalidArgument, "pixel count does not match width x height");
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "pixel value outside [0,1]");
    }
  }
}

GrayImage GrayImage::filled(std::size_t width, std::size_t height, double value) {
  return GrayImage(width, height, std::vector<double>(width * height, value));
}

namespace {

GrayImage read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw Error(ErrorCode::kDataset, "cannot decode PNG " + path.string() + ": " + img.message);
  }
  img.format = PNG_FORMAT_GRAY;  // 8-bit, gamma-encoded luminance
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::kDataset, "cannot decode PNG " + path.string() + ": " + img.message);
  }
  std::vector<double> pixels(buffer.size());
  std::transform(buffer.begin(), buffer.end(), pixels.begin(),
                 [](png_byte v) { return v / 255.0; });
  return GrayImage(img.width, img.height, std::move(pixels));
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const auto fail = [&](const char* why) {
    return Error(ErrorCode::kDataset, "cannot decode PGM " + path.string() + ": " + why);
  };
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw fail("bad magic");
  std::size_t width = 0, height = 0;
  unsigned long maxval = 0;
  try {
    width = std::stoul(pgm_token(in));
    height = std::stoul(pgm_token(in));
    maxval = std::stoul(pgm_token(in));
  } catch (const std::exception&) {
    throw fail("bad header");
  }
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) throw fail("bad header");

  std::vector<double> pixels(width * height);
  if (magic == "P5") {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(pixels.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw fail("truncated data");
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const unsigned v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
      if (v > maxval) throw fail("sample exceeds maxval");
      pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    for (double& p : pixels) {
      const std::string tok = pgm_token(in);
      if (tok.empty()) throw fail("truncated data");
      unsigned long v = 0;
      try {
        v = std::stoul(tok);
      } catch (const std::exception&) {
        throw fail("bad sample");
      }
      if (v > maxval) throw fail("sample exceeds maxval");
      p = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "image not found: " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  in.close();
  static constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (std::equal(std::begin(kPngMagic), std::end(kPngMagic),
                 reinterpret_cast<unsigned char*>(magic))) {
    return read_png(path);
  }
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path);
  throw Error(ErrorCode::kDataset, "unsupported image format: " + path.string());
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  std::vector<unsigned char> raw;
  raw.reserve(image.pixels().size() * 2);
  for (double p : image.pixels()) {
    const auto v = static_cast<unsigned>(std::lround(p * 65535.0));
    raw.push_back(static_cast<unsigned char>(v >> 8));
    raw.push_back(static_cast<unsigned char>(v & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

GrayImage resample_bilinear(const GrayImage& image, std::size_t width, std::size_t height) {
  if (image.empty() || width == 0 || height == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot resample an empty image");
  }
  const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
  const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
  const double max_x = static_cast<double>(image.width() - 1);
  const double max_y = static_cast<double>(image.height() - 1);
  std::vector<double> out(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = image.at(x0, y0) * (1 - wx) + image.at(x1, y0) * wx;
      const double bottom = image.at(x0, y1) * (1 - wx) + image.at(x1, y1) * wx;
      out[y * width + x] = std::clamp(top * (1 - wy) + bottom * wy, 0.0, 1.0);
    }
  }
  return GrayImage(width, height, std::move(out));
}

}  // namespace switchhit
