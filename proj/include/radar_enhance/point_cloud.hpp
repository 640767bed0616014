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

#ifndef RADAR_ENHANCE__POINT_CLOUD_HPP_
#define RADAR_ENHANCE__POINT_CLOUD_HPP_

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "radar_enhance/geometry.hpp"

namespace radar_enhance
{

inline constexpr const char * kMapFrame = "map";
inline constexpr const char * kRadarFrame = "radar";
inline constexpr const char * kLidarFrame = "lidar";

struct CloudPoint
{
  Vector3d position{Vector3d::Zero()};
  double intensity{0.0};  // normalized to [0, 1]

  bool operator==(const CloudPoint &) const = default;
};

struct PointCloud
{
  std::string frame_id{kLidarFrame};
  std::vector<CloudPoint> points;

  std::size_t size() const {return points.size();}
  bool empty() const {return points.empty();}
};

/// Throws InvalidCloudError on NaN/Inf coordinates or intensity outside [0, 1].
void validate_cloud(const PointCloud & cloud);

struct VoxelSpec
{
  double leaf_x{0.8};
  double leaf_y{0.8};
  double leaf_z{0.8};

  static VoxelSpec cube(double leaf) {return VoxelSpec{leaf, leaf, leaf};}
};

void validate_voxel_spec(const VoxelSpec & spec);

enum class ZRange
{
  kFull,     // keep every z (the map's full vertical range)
  kBounded,  // keep center.z - half_extent_z < z <= center.z + half_extent_z
};

struct CropSpec
{
  Vector3d center{Vector3d::Zero()};
  double half_extent_x{100.0};
  double half_extent_y{100.0};
  ZRange z_mode{ZRange::kFull};
  double half_extent_z{0.0};
};

/// Centroid-per-voxel downsampling. Voxel index is floor(p / leaf) per axis;
/// each output point is the centroid of its voxel with the mean intensity.
/// Output is ordered by voxel index (z, then y, then x).
PointCloud voxel_filter(const PointCloud & cloud, const VoxelSpec & spec);

struct PosedScan
{
  PointCloud cloud;
  Pose pose;
};

/// Voxel-filters each scan in its own frame, moves it into the global frame
/// with pose_to_matrix(pose) and concatenates in input order. Output frame is
/// "map".
PointCloud accumulate_map(std::span<const PosedScan> scans, const VoxelSpec & spec);

/// Keeps points with center - h < coord <= center + h on x and y. Order is
/// preserved.
PointCloud crop_box(const PointCloud & cloud, const CropSpec & spec);

/// Applies a rigid transform to every point; the result carries `frame_id`.
PointCloud transform_cloud(
  const PointCloud & cloud, const AffineMatrix4d & transform, const std::string & frame_id);

struct CloudExtent
{
  Vector3d min{Vector3d::Zero()};
  Vector3d max{Vector3d::Zero()};
};

/// Axis-aligned bounds; zero extent for an empty cloud.
CloudExtent extent(const PointCloud & cloud);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__POINT_CLOUD_HPP_
