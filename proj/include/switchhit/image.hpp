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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace switchhit {

/// Single-channel luminance image, row-major, values in [0,1].
class GrayImage {
 public:
  GrayImage() = default;
  /// Throws Error(kInvalidArgument) when the pixel count does not match or a
  /// value falls outside [0,1].
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

  /// Constant-valued image.
  static GrayImage filled(std::size_t width, std::size_t height, double value);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::span<const double> pixels() const noexcept { return pixels_; }
  double at(std::size_t x, std::size_t y) const noexcept {
    return pixels_[y * width_ + x];
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

/// Decodes a PNG or PGM (P2/P5, 8 or 16 bit) file. Color PNGs are converted to
/// luminance. Throws Error(kIo) for missing files and Error(kDataset) for
/// undecodable content.
GrayImage read_image(const std::filesystem::path& path);

/// Writes a binary 16-bit PGM. Output bytes depend only on the pixel values.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Bilinear resample to the given geometry (pixel-center aligned).
GrayImage resample_bilinear(const GrayImage& image, std::size_t width,
                            std::size_t height);

}  // namespace switchhit
