// Copyright 2026 The radar_enhance Authors
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

#ifndef RADAR_ENHANCE__IMAGE_HPP_
#define RADAR_ENHANCE__IMAGE_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radar_enhance
{

/// 8-bit grayscale raster, row-major; rows index image height.
using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real-valued working buffer for filtering and metrics.
using ImageXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Metric raster layout. The ego sits at the image center, +x (forward) points
/// to the top of the image and +y (left) to the image left.
struct BevGridSpec
{
  int width_px{256};
  int height_px{256};
  double span_m{200.0};  // full side length

  double resolution() const {return span_m / static_cast<double>(width_px);}
  bool operator==(const BevGridSpec &) const = default;
};

void validate_grid(const BevGridSpec & grid);

struct BevImage
{
  BevGridSpec grid;
  GrayImage pixels;

  BevImage() = default;
  explicit BevImage(const BevGridSpec & spec)
  : grid(spec), pixels(GrayImage::Zero(spec.height_px, spec.width_px)) {}
  BevImage(const BevGridSpec & spec, GrayImage data);
};

/// round(255 * value) with half away from zero, clamped to [0, 255].
std::uint8_t to_gray(double value);

/// Quantizes a real buffer to 8 bits: round half away from zero, then clamp.
GrayImage quantize(const ImageXd & image);

/// Binary PGM (P5) with maxval 255. The golden on-disk format.
void write_pgm(const std::filesystem::path & path, const GrayImage & image);
std::string encode_pgm(const GrayImage & image);
GrayImage read_pgm(const std::filesystem::path & path);
GrayImage decode_pgm(const std::string & bytes);

/// 8-bit grayscale PNG.
void write_png(const std::filesystem::path & path, const GrayImage & image);
GrayImage read_png(const std::filesystem::path & path);

/// Reads PGM or PNG, detected from the file signature. Colour PNGs are
/// converted to gray. Throws IngestionError on anything else.
GrayImage read_gray_image(const std::filesystem::path & path);

/// Writes PNG for a ".png" extension, PGM otherwise.
void write_gray_image(const std::filesystem::path & path, const GrayImage & image);

/// Bilinear resampling with pixel-center alignment and edge clamping.
GrayImage resize_bilinear(const GrayImage & image, int rows, int cols);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__IMAGE_HPP_
