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

#include "radar_enhance/augment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radar_enhance/errors.hpp"
#include "radar_enhance/rng.hpp"

namespace radar_enhance
{
namespace
{

constexpr std::array<std::string_view, kAugmentOpCount> kOpNames{
  "hshift", "vshift", "hflip", "vflip", "zoom", "rotation", "brightness", "contrast", "shadow"};

double param(const AppliedOp & op, std::string_view key)
{
  for (const auto & [name, value] : op.params) {
    if (name == key) {
      return value;
    }
  }
  throw InvalidSpecError("augment op " + std::string(op_name(op.op)) + " lacks " +
          std::string(key));
}

double sample_bilinear(const GrayImage & image, double y, double x)
{
  const double fy = std::floor(y);
  const double fx = std::floor(x);
  const double wy = y - fy;
  const double wx = x - fx;
  const auto r0 = static_cast<Eigen::Index>(fy);
  const auto c0 = static_cast<Eigen::Index>(fx);
  auto at = [&image](Eigen::Index r, Eigen::Index c) -> double {
      if (r < 0 || c < 0 || r >= image.rows() || c >= image.cols()) {
        return 0.0;
      }
      return image(r, c);
    };
  double acc = (1.0 - wy) * (1.0 - wx) * at(r0, c0);
  // Zero weights are skipped so integer-aligned samples never read past the edge.
  if (wx > 0.0) {
    acc += (1.0 - wy) * wx * at(r0, c0 + 1);
  }
  if (wy > 0.0) {
    acc += wy * (1.0 - wx) * at(r0 + 1, c0);
  }
  if (wy > 0.0 && wx > 0.0) {
    acc += wy * wx * at(r0 + 1, c0 + 1);
  }
  return acc;
}

double sample_nearest(const GrayImage & image, double y, double x)
{
  const auto r = static_cast<Eigen::Index>(std::floor(y + 0.5));
  const auto c = static_cast<Eigen::Index>(std::floor(x + 0.5));
  if (r < 0 || c < 0 || r >= image.rows() || c >= image.cols()) {
    return 0.0;
  }
  return image(r, c);
}

// Resamples through an inverse map (output pixel -> source coordinate).
template<typename InverseMap>
GrayImage warp(const GrayImage & image, Interpolation interp, InverseMap && inverse_map)
{
  ImageXd out(image.rows(), image.cols());
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const Eigen::Vector2d src = inverse_map(static_cast<double>(r), static_cast<double>(c));
      out(r, c) = interp == Interpolation::kBilinear ?
        sample_bilinear(image, src.x(), src.y()) :
        sample_nearest(image, src.x(), src.y());
    }
  }
  return quantize(out);
}

bool inside_polygon(const std::array<Eigen::Vector2d, 4> & poly, double x, double y)
{
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto & a = poly[i];
    const auto & b = poly[j];
    if ((a.y() > y) != (b.y() > y)) {
      const double x_cross = a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

GrayImage apply_op(
  const GrayImage & image, const AppliedOp & op, Interpolation interp)
{
  switch (op.op) {
    case AugmentOp::kHShift:
      return shift_image(image, static_cast<int>(param(op, "pixels")), 0);
    case AugmentOp::kVShift:
      return shift_image(image, 0, static_cast<int>(param(op, "pixels")));
    case AugmentOp::kHFlip:
      return flip_horizontal(image);
    case AugmentOp::kVFlip:
      return flip_vertical(image);
    case AugmentOp::kZoom:
      return zoom_image(image, param(op, "factor"), interp);
    case AugmentOp::kRotation:
      return rotate_image(image, param(op, "degrees"), interp);
    case AugmentOp::kBrightness:
      return adjust_brightness(image, param(op, "delta"));
    case AugmentOp::kContrast:
      return adjust_contrast(image, param(op, "factor"));
    case AugmentOp::kShadow: {
        std::array<Eigen::Vector2d, 4> quad;
        for (int k = 0; k < 4; ++k) {
          quad[k] = Eigen::Vector2d(
            param(op, "x" + std::to_string(k)), param(op, "y" + std::to_string(k)));
        }
        return apply_shadow(image, quad, param(op, "multiplier"));
      }
  }
  return image;
}

}  // namespace

std::string_view op_name(AugmentOp op)
{
  return kOpNames[static_cast<std::size_t>(op)];
}

bool is_geometric(AugmentOp op)
{
  return op == AugmentOp::kHShift || op == AugmentOp::kVShift || op == AugmentOp::kHFlip ||
         op == AugmentOp::kVFlip || op == AugmentOp::kZoom || op == AugmentOp::kRotation;
}

void validate_augment_config(const AugmentConfig & cfg)
{
  if (!(cfg.probability >= 0.0 && cfg.probability <= 1.0)) {
    throw InvalidSpecError("augment probability must lie in [0, 1]");
  }
  if (!(cfg.zoom_min > 0.0 && cfg.zoom_min <= cfg.zoom_max)) {
    throw InvalidSpecError("zoom range must be positive and ordered");
  }
  if (!(cfg.contrast_min > 0.0 && cfg.contrast_min <= cfg.contrast_max)) {
    throw InvalidSpecError("contrast range must be positive and ordered");
  }
  if (!(cfg.shift_fraction >= 0.0 && cfg.rotation_deg >= 0.0 && cfg.brightness_delta >= 0.0 &&
    cfg.shadow_multiplier >= 0.0))
  {
    throw InvalidSpecError("augment magnitudes must be non-negative");
  }
}

std::string augment_config_to_json(const AugmentConfig & cfg)
{
  nlohmann::ordered_json j;
  j["probability"] = cfg.probability;
  j["seed"] = cfg.seed;
  j["shift_fraction"] = cfg.shift_fraction;
  j["zoom_range"] = {cfg.zoom_min, cfg.zoom_max};
  j["rotation_deg"] = cfg.rotation_deg;
  j["brightness_delta"] = cfg.brightness_delta;
  j["contrast_range"] = {cfg.contrast_min, cfg.contrast_max};
  j["shadow_multiplier"] = cfg.shadow_multiplier;
  j["target_interpolation"] =
    cfg.target_interpolation == Interpolation::kBilinear ? "bilinear" : "nearest";
  auto ops = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < kAugmentOpCount; ++k) {
    if (cfg.enabled[k]) {
      ops.push_back(std::string(kOpNames[k]));
    }
  }
  j["enabled_ops"] = ops;
  return j.dump();
}

AugmentConfig augment_config_from_json(const std::string & text)
{
  AugmentConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    cfg.probability = j.value("probability", cfg.probability);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.shift_fraction = j.value("shift_fraction", cfg.shift_fraction);
    if (j.contains("zoom_range")) {
      cfg.zoom_min = j.at("zoom_range").at(0).get<double>();
      cfg.zoom_max = j.at("zoom_range").at(1).get<double>();
    }
    cfg.rotation_deg = j.value("rotation_deg", cfg.rotation_deg);
    cfg.brightness_delta = j.value("brightness_delta", cfg.brightness_delta);
    if (j.contains("contrast_range")) {
      cfg.contrast_min = j.at("contrast_range").at(0).get<double>();
      cfg.contrast_max = j.at("contrast_range").at(1).get<double>();
    }
    cfg.shadow_multiplier = j.value("shadow_multiplier", cfg.shadow_multiplier);
    const std::string interp = j.value("target_interpolation", std::string("bilinear"));
    if (interp == "bilinear") {
      cfg.target_interpolation = Interpolation::kBilinear;
    } else if (interp == "nearest") {
      cfg.target_interpolation = Interpolation::kNearest;
    } else {
      throw InvalidSpecError("unknown interpolation '" + interp + "'");
    }
    if (j.contains("enabled_ops")) {
      cfg.enabled.fill(false);
      for (const auto & name : j.at("enabled_ops")) {
        const auto it = std::find(kOpNames.begin(), kOpNames.end(), name.get<std::string>());
        if (it == kOpNames.end()) {
          throw InvalidSpecError("unknown augment op '" + name.get<std::string>() + "'");
        }
        cfg.enabled[static_cast<std::size_t>(it - kOpNames.begin())] = true;
      }
    }
  } catch (const nlohmann::json::exception & e) {
    throw InvalidSpecError(std::string("bad augment config: ") + e.what());
  }
  validate_augment_config(cfg);
  return cfg;
}

std::vector<AppliedOp> sample_plan(
  const AugmentConfig & cfg, std::uint64_t pair_index, int rows, int cols)
{
  validate_augment_config(cfg);
  std::vector<AppliedOp> plan;
  for (std::size_t k = 0; k < kAugmentOpCount; ++k) {
    if (!cfg.enabled[k]) {
      continue;
    }
    SplitMix64 rng(derive_key(cfg.seed, {pair_index, static_cast<std::uint64_t>(k)}));
    if (!(rng.uniform() < cfg.probability)) {
      continue;
    }
    AppliedOp op{static_cast<AugmentOp>(k), {}};
    switch (op.op) {
      case AugmentOp::kHShift: {
          const auto limit = std::lround(cfg.shift_fraction * cols);
          op.params.emplace_back("pixels", static_cast<double>(rng.uniform_int(-limit, limit)));
          break;
        }
      case AugmentOp::kVShift: {
          const auto limit = std::lround(cfg.shift_fraction * rows);
          op.params.emplace_back("pixels", static_cast<double>(rng.uniform_int(-limit, limit)));
          break;
        }
      case AugmentOp::kHFlip:
      case AugmentOp::kVFlip:
        break;
      case AugmentOp::kZoom:
        op.params.emplace_back("factor", rng.uniform(cfg.zoom_min, cfg.zoom_max));
        break;
      case AugmentOp::kRotation:
        op.params.emplace_back("degrees", rng.uniform(-cfg.rotation_deg, cfg.rotation_deg));
        break;
      case AugmentOp::kBrightness:
        op.params.emplace_back("delta", rng.uniform(-cfg.brightness_delta, cfg.brightness_delta));
        break;
      case AugmentOp::kContrast:
        op.params.emplace_back("factor", rng.uniform(cfg.contrast_min, cfg.contrast_max));
        break;
      case AugmentOp::kShadow: {
          std::array<Eigen::Vector2d, 4> quad;
          for (auto & v : quad) {
            v = Eigen::Vector2d(rng.uniform(0.0, cols), rng.uniform(0.0, rows));
          }
          const Eigen::Vector2d centroid = (quad[0] + quad[1] + quad[2] + quad[3]) / 4.0;
          std::sort(
            quad.begin(), quad.end(), [&centroid](const auto & a, const auto & b) {
              return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
              std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
            });
          for (int v = 0; v < 4; ++v) {
            op.params.emplace_back("x" + std::to_string(v), quad[v].x());
            op.params.emplace_back("y" + std::to_string(v), quad[v].y());
          }
          op.params.emplace_back("multiplier", cfg.shadow_multiplier);
          break;
        }
    }
    plan.push_back(std::move(op));
  }
  return plan;
}

AugmentedPair augment_pair(
  const GrayImage & input, const GrayImage & target, const AugmentConfig & cfg,
  std::uint64_t pair_index)
{
  if (input.rows() != target.rows() || input.cols() != target.cols()) {
    throw ShapeError("augment_pair needs equally sized images");
  }
  AugmentedPair out{input, target, sample_plan(
      cfg, pair_index, static_cast<int>(input.rows()), static_cast<int>(input.cols()))};
  for (const auto & op : out.applied_ops) {
    out.input = apply_op(out.input, op, Interpolation::kBilinear);
    if (is_geometric(op.op)) {
      out.target = apply_op(out.target, op, cfg.target_interpolation);
    }
  }
  return out;
}

std::string applied_ops_to_json(std::uint64_t pair_index, const std::vector<AppliedOp> & ops)
{
  nlohmann::ordered_json j;
  j["pair_index"] = pair_index;
  auto list = nlohmann::ordered_json::array();
  for (const auto & op : ops) {
    nlohmann::ordered_json entry;
    entry["op"] = std::string(op_name(op.op));
    for (const auto & [name, value] : op.params) {
      entry[name] = value;
    }
    list.push_back(entry);
  }
  j["ops"] = list;
  return j.dump();
}

GrayImage shift_image(const GrayImage & image, int dx, int dy)
{
  GrayImage out = GrayImage::Zero(image.rows(), image.cols());
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    const Eigen::Index src_r = r - dy;
    if (src_r < 0 || src_r >= image.rows()) {
      continue;
    }
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const Eigen::Index src_c = c - dx;
      if (src_c >= 0 && src_c < image.cols()) {
        out(r, c) = image(src_r, src_c);
      }
    }
  }
  return out;
}

GrayImage flip_horizontal(const GrayImage & image)
{
  return image.rowwise().reverse();
}

GrayImage flip_vertical(const GrayImage & image)
{
  return image.colwise().reverse();
}

GrayImage zoom_image(const GrayImage & image, double factor, Interpolation interp)
{
  if (!(factor > 0.0)) {
    throw InvalidSpecError("zoom factor must be positive");
  }
  const double cy = (image.rows() - 1) / 2.0;
  const double cx = (image.cols() - 1) / 2.0;
  return warp(
    image, interp, [=](double r, double c) {
      return Eigen::Vector2d(cy + (r - cy) / factor, cx + (c - cx) / factor);
    });
}

GrayImage rotate_image(const GrayImage & image, double degrees, Interpolation interp)
{
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cy = (image.rows() - 1) / 2.0;
  const double cx = (image.cols() - 1) / 2.0;
  return warp(
    image, interp, [=](double r, double c) {
      const double dy = r - cy;
      const double dx = c - cx;
      return Eigen::Vector2d(cy - sn * dx + cs * dy, cx + cs * dx + sn * dy);
    });
}

GrayImage adjust_brightness(const GrayImage & image, double delta)
{
  return quantize((image.cast<double>().array() + delta * 255.0).matrix());
}

GrayImage adjust_contrast(const GrayImage & image, double factor)
{
  const ImageXd x = image.cast<double>();
  const double mean = x.size() > 0 ? x.mean() : 0.0;
  return quantize(((x.array() - mean) * factor + mean).matrix());
}

GrayImage apply_shadow(
  const GrayImage & image, const std::array<Eigen::Vector2d, 4> & quad, double multiplier)
{
  ImageXd out = image.cast<double>();
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      if (inside_polygon(quad, c + 0.5, r + 0.5)) {
        out(r, c) *= multiplier;
      }
    }
  }
  return quantize(out);
}

}  // namespace radar_enhance
