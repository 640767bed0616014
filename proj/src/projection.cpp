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

#include "radar_enhance/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace radar_enhance
{

std::optional<PixelIndex> pixel_of(const BevGridSpec & grid, double x, double y)
{
  const double half = grid.span_m / 2.0;
  // Same half-open predicate as crop_box, so every cropped point has a pixel.
  if (!(x > -half && x <= half && y > -half && y <= half)) {
    return std::nullopt;
  }
  const double res = grid.resolution();
  // Rounding in (half - x) can land exactly on the far edge; clamp it back in.
  const double row = std::min(std::floor((half - x) / res), grid.height_px - 1.0);
  const double col = std::min(std::floor((half - y) / res), grid.width_px - 1.0);
  return PixelIndex{static_cast<int>(row), static_cast<int>(col)};
}

Eigen::Vector2d pixel_center(const BevGridSpec & grid, PixelIndex px)
{
  const double half = grid.span_m / 2.0;
  const double res = grid.resolution();
  return {half - (px.row + 0.5) * res, half - (px.col + 0.5) * res};
}

PointCloud to_radar_frame(const PointCloud & cloud, const AffineMatrix4d & extrinsic)
{
  return transform_cloud(cloud, extrinsic, kRadarFrame);
}

PointCloud crop_to_grid(const PointCloud & cloud, const BevGridSpec & grid)
{
  CropSpec spec;
  spec.center = Vector3d::Zero();
  spec.half_extent_x = grid.span_m / 2.0;
  spec.half_extent_y = grid.span_m / 2.0;
  spec.z_mode = ZRange::kFull;
  return crop_box(cloud, spec);
}

BevImage project_bev(const PointCloud & cloud, const BevGridSpec & grid)
{
  validate_grid(grid);
  if (cloud.frame_id != kRadarFrame) {
    throw FrameMismatchError(
            "project_bev expects a '" + std::string(kRadarFrame) + "' cloud, got '" +
            cloud.frame_id + "'");
  }
  validate_cloud(cloud);

  struct Winner
  {
    double z;
    double intensity;
  };
  const auto n_pixels = static_cast<std::size_t>(grid.width_px) * grid.height_px;
  std::vector<Winner> best(n_pixels, Winner{-std::numeric_limits<double>::infinity(), -1.0});

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto & p = cloud.points[i];
    const auto px = pixel_of(grid, p.position.x(), p.position.y());
    if (!px) {
      std::ostringstream msg;
      msg << "point " << i << " at (" << p.position.x() << ", " << p.position.y() << ", " <<
        p.position.z() << ") lies outside the " << grid.span_m << " m grid";
      throw BoundsError(msg.str());
    }
    auto & w = best[static_cast<std::size_t>(px->row) * grid.width_px + px->col];
    // Strict comparisons keep the earlier point on a full tie.
    if (p.position.z() > w.z || (p.position.z() == w.z && p.intensity > w.intensity)) {
      w = Winner{p.position.z(), p.intensity};
    }
  }

  BevImage image(grid);
  for (std::size_t k = 0; k < n_pixels; ++k) {
    if (best[k].intensity >= 0.0) {
      image.pixels.data()[k] = to_gray(best[k].intensity);
    }
  }
  return image;
}

BevImage project_scan(
  const PointCloud & scan, const AffineMatrix4d & extrinsic, const BevGridSpec & grid)
{
  return project_bev(crop_to_grid(to_radar_frame(scan, extrinsic), grid), grid);
}

}  // namespace radar_enhance
