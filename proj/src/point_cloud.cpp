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

#include "radar_enhance/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace radar_enhance
{
namespace
{

using VoxelKey = std::array<std::int64_t, 3>;  // (z, y, x)

struct VoxelKeyHash
{
  std::size_t operator()(const VoxelKey & k) const noexcept
  {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct VoxelAccumulator
{
  VoxelKey key;
  Vector3d position_sum{Vector3d::Zero()};
  double intensity_sum{0.0};
  std::size_t count{0};
};

bool in_half_open(double value, double center, double half)
{
  return value > center - half && value <= center + half;
}

}  // namespace

void validate_cloud(const PointCloud & cloud)
{
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto & p = cloud.points[i];
    if (!p.position.allFinite() || !std::isfinite(p.intensity)) {
      throw InvalidCloudError("point " + std::to_string(i) + " has a non-finite field");
    }
    if (p.intensity < 0.0 || p.intensity > 1.0) {
      throw InvalidCloudError(
              "point " + std::to_string(i) + " intensity " + std::to_string(p.intensity) +
              " outside [0, 1]");
    }
  }
}

void validate_voxel_spec(const VoxelSpec & spec)
{
  for (double leaf : {spec.leaf_x, spec.leaf_y, spec.leaf_z}) {
    if (!std::isfinite(leaf) || leaf <= 0.0) {
      throw InvalidSpecError("voxel leaf sizes must be finite and positive");
    }
  }
}

PointCloud voxel_filter(const PointCloud & cloud, const VoxelSpec & spec)
{
  validate_voxel_spec(spec);
  validate_cloud(cloud);

  std::vector<VoxelAccumulator> voxels;
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> lookup;
  lookup.reserve(cloud.size());
  for (const auto & p : cloud.points) {
    const VoxelKey key{
      static_cast<std::int64_t>(std::floor(p.position.z() / spec.leaf_z)),
      static_cast<std::int64_t>(std::floor(p.position.y() / spec.leaf_y)),
      static_cast<std::int64_t>(std::floor(p.position.x() / spec.leaf_x))};
    auto [it, inserted] = lookup.try_emplace(key, voxels.size());
    if (inserted) {
      voxels.push_back(VoxelAccumulator{key, Vector3d::Zero(), 0.0, 0});
    }
    auto & acc = voxels[it->second];
    acc.position_sum += p.position;
    acc.intensity_sum += p.intensity;
    ++acc.count;
  }

  std::vector<std::size_t> order(voxels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(
    order.begin(), order.end(),
    [&voxels](std::size_t a, std::size_t b) {return voxels[a].key < voxels[b].key;});

  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.points.reserve(voxels.size());
  for (std::size_t idx : order) {
    const auto & acc = voxels[idx];
    const double n = static_cast<double>(acc.count);
    // Mean of values in [0, 1] can drift above 1 by an ulp.
    out.points.push_back(
      CloudPoint{acc.position_sum / n, std::clamp(acc.intensity_sum / n, 0.0, 1.0)});
  }
  return out;
}

PointCloud accumulate_map(std::span<const PosedScan> scans, const VoxelSpec & spec)
{
  if (scans.empty()) {
    throw EmptyInputError("accumulate_map needs at least one scan");
  }
  const std::string & frame = scans.front().cloud.frame_id;
  for (std::size_t i = 1; i < scans.size(); ++i) {
    if (scans[i].cloud.frame_id != frame) {
      throw FrameMismatchError(
              "scan " + std::to_string(i) + " is in frame '" + scans[i].cloud.frame_id +
              "', expected '" + frame + "'");
    }
  }

  PointCloud map;
  map.frame_id = kMapFrame;
  for (const auto & scan : scans) {
    const PointCloud filtered = voxel_filter(scan.cloud, spec);
    const AffineMatrix4d to_global = pose_to_matrix(scan.pose);
    for (const auto & p : filtered.points) {
      map.points.push_back(CloudPoint{transform_point(to_global, p.position), p.intensity});
    }
  }
  return map;
}

PointCloud crop_box(const PointCloud & cloud, const CropSpec & spec)
{
  if (!(spec.half_extent_x > 0.0) || !(spec.half_extent_y > 0.0) ||
    (spec.z_mode == ZRange::kBounded && !(spec.half_extent_z > 0.0)))
  {
    throw InvalidSpecError("crop half extents must be positive");
  }
  PointCloud out;
  out.frame_id = cloud.frame_id;
  for (const auto & p : cloud.points) {
    if (!in_half_open(p.position.x(), spec.center.x(), spec.half_extent_x) ||
      !in_half_open(p.position.y(), spec.center.y(), spec.half_extent_y))
    {
      continue;
    }
    if (spec.z_mode == ZRange::kBounded &&
      !in_half_open(p.position.z(), spec.center.z(), spec.half_extent_z))
    {
      continue;
    }
    out.points.push_back(p);
  }
  return out;
}

PointCloud transform_cloud(
  const PointCloud & cloud, const AffineMatrix4d & transform, const std::string & frame_id)
{
  PointCloud out;
  out.frame_id = frame_id;
  out.points.reserve(cloud.size());
  for (const auto & p : cloud.points) {
    out.points.push_back(CloudPoint{transform_point(transform, p.position), p.intensity});
  }
  return out;
}

CloudExtent extent(const PointCloud & cloud)
{
  CloudExtent e;
  if (cloud.empty()) {
    return e;
  }
  e.min = e.max = cloud.points.front().position;
  for (const auto & p : cloud.points) {
    e.min = e.min.cwiseMin(p.position);
    e.max = e.max.cwiseMax(p.position);
  }
  return e;
}

}  // namespace radar_enhance
