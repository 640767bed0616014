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

#ifndef RADAR_ENHANCE__PROJECTION_HPP_
#define RADAR_ENHANCE__PROJECTION_HPP_

#include <optional>

#include "radar_enhance/geometry.hpp"
#include "radar_enhance/image.hpp"
#include "radar_enhance/point_cloud.hpp"

namespace radar_enhance
{

struct PixelIndex
{
  int row{0};
  int col{0};

  bool operator==(const PixelIndex &) const = default;
};

/// row = floor((span/2 - x) / res), col = floor((span/2 - y) / res).
/// Returns nullopt when the point falls outside the raster.
std::optional<PixelIndex> pixel_of(const BevGridSpec & grid, double x, double y);

/// Metric (x, y) of the center of a pixel in the radar frame.
Eigen::Vector2d pixel_center(const BevGridSpec & grid, PixelIndex px);

/// Every point moved by `extrinsic`; output frame is "radar".
PointCloud to_radar_frame(const PointCloud & cloud, const AffineMatrix4d & extrinsic);

/// Keeps the points whose x and y lie in (-span/2, span/2].
PointCloud crop_to_grid(const PointCloud & cloud, const BevGridSpec & grid);

/// Top-down raster. Each pixel takes round(255 * intensity) of the highest-z
/// point landing in it; z ties go to the higher intensity, then to the earlier
/// point. Uncovered pixels are 0. The cloud must be in the radar frame and
/// inside the grid; otherwise BoundsError names the offending point.
BevImage project_bev(const PointCloud & cloud, const BevGridSpec & grid);

/// Raw-scan convenience path: to_radar_frame, crop_to_grid, project_bev.
BevImage project_scan(
  const PointCloud & scan, const AffineMatrix4d & extrinsic, const BevGridSpec & grid);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__PROJECTION_HPP_
