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

#ifndef RADAR_ENHANCE__AUGMENT_HPP_
#define RADAR_ENHANCE__AUGMENT_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radar_enhance/image.hpp"

namespace radar_enhance
{

/// Augmentation ops in application order.
enum class AugmentOp : int
{
  kHShift = 0,
  kVShift,
  kHFlip,
  kVFlip,
  kZoom,
  kRotation,
  kBrightness,
  kContrast,
  kShadow,
};

inline constexpr std::size_t kAugmentOpCount = 9;

std::string_view op_name(AugmentOp op);

/// Geometric ops move both images of a pair; photometric ops touch the input only.
bool is_geometric(AugmentOp op);

enum class Interpolation
{
  kBilinear,
  kNearest,
};

struct AugmentConfig
{
  double probability{0.30};  // per op
  std::uint64_t seed{0};
  double shift_fraction{0.10};  // of the image side, integer pixels
  double zoom_min{0.9};
  double zoom_max{1.1};
  double rotation_deg{5.0};
  double brightness_delta{0.20};  // of full scale
  double contrast_min{0.8};
  double contrast_max{1.2};
  double shadow_multiplier{0.5};
  Interpolation target_interpolation{Interpolation::kBilinear};
  std::array<bool, kAugmentOpCount> enabled{true, true, true, true, true, true, true, true, true};
};

void validate_augment_config(const AugmentConfig & cfg);

std::string augment_config_to_json(const AugmentConfig & cfg);
AugmentConfig augment_config_from_json(const std::string & text);

struct AppliedOp
{
  AugmentOp op{AugmentOp::kHShift};
  std::vector<std::pair<std::string, double>> params;

  bool operator==(const AppliedOp &) const = default;
};

/// The ops that fire for one pair and their sampled parameters. Pure in
/// (cfg.seed, pair_index); each op draws from its own substream keyed by
/// (seed, pair_index, op index).
std::vector<AppliedOp> sample_plan(
  const AugmentConfig & cfg, std::uint64_t pair_index, int rows, int cols);

struct AugmentedPair
{
  GrayImage input;
  GrayImage target;
  std::vector<AppliedOp> applied_ops;
};

/// Deterministic per-pair augmentation. Resampling is bilinear with zero
/// fill outside the canvas; outputs are clamped to [0, 255].
AugmentedPair augment_pair(
  const GrayImage & input, const GrayImage & target, const AugmentConfig & cfg,
  std::uint64_t pair_index);

/// One JSON line: {"pair_index": i, "ops": [{"op": name, params...}, ...]}.
std::string applied_ops_to_json(std::uint64_t pair_index, const std::vector<AppliedOp> & ops);

// Individual transforms, exposed for reuse and tests.
GrayImage shift_image(const GrayImage & image, int dx, int dy);
GrayImage flip_horizontal(const GrayImage & image);
GrayImage flip_vertical(const GrayImage & image);
GrayImage zoom_image(const GrayImage & image, double factor, Interpolation interp);
GrayImage rotate_image(const GrayImage & image, double degrees, Interpolation interp);
GrayImage adjust_brightness(const GrayImage & image, double delta);
GrayImage adjust_contrast(const GrayImage & image, double factor);
/// Multiplies pixels whose centers fall inside the quadrilateral.
GrayImage apply_shadow(
  const GrayImage & image, const std::array<Eigen::Vector2d, 4> & quad, double multiplier);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__AUGMENT_HPP_
