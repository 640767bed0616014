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

#ifndef RADAR_ENHANCE__SYNTH_HPP_
#define RADAR_ENHANCE__SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radar_enhance/geometry.hpp"
#include "radar_enhance/image.hpp"
#include "radar_enhance/pairing.hpp"
#include "radar_enhance/point_cloud.hpp"

namespace radar_enhance
{

struct Box
{
  Vector3d min{Vector3d::Zero()};
  Vector3d max{Vector3d::Ones()};
  double reflectivity{1.0};  // (0, 1]
};

/// Procedural scene of axis-aligned reflective boxes.
struct World
{
  std::vector<Box> boxes;
  Vector3d bounds_min{Vector3d::Constant(-150.0)};
  Vector3d bounds_max{Vector3d::Constant(150.0)};
};

void validate_world(const World & world);

/// {"bounds": {"min": [x,y,z], "max": [x,y,z]},
///  "boxes": [{"min": [..], "max": [..], "reflectivity": r}, ...]}
World parse_world_json(const std::string & text);
World read_world_json(const std::filesystem::path & path);
std::string world_to_json(const World & world);

struct LidarModel
{
  int n_azimuth{1024};
  std::vector<double> elevations_rad;  // empty means 16 beams over [-15, +15] deg
  double max_range{120.0};

  std::vector<double> beams() const;
};

struct RadarModel
{
  double blur_sigma_px{2.0};
  double speckle_sigma{0.08};
  std::uint64_t seed{0};
};

/// Distance along a unit ray to the first intersection with the box, using
/// the slab method. nullopt when the ray misses or the box is behind.
std::optional<double> ray_box_intersection(
  const Vector3d & origin, const Vector3d & direction, const Box & box);

/// Ray-cast scan from `pose`. Points are in the sensor frame ("lidar"),
/// elevation-major then azimuth order, intensity = box reflectivity. Misses
/// produce no point. Throws PoseInsideObjectError when the sensor origin lies
/// in or on a box.
PointCloud raycast_scan(const World & world, const Pose & pose, const LidarModel & model);

/// Exact ground-truth raster for the planar part (x, y, yaw) of `pose`.
/// A pixel takes round(255 * reflectivity) of the tallest box whose x-y
/// footprint overlaps the pixel with positive area (ties: higher reflectivity,
/// then earlier box); otherwise 0.
BevImage analytic_bev(const World & world, const Pose & pose, const BevGridSpec & grid);

/// Radar-like degradation: Gaussian blur (truncated at 3 sigma, mirrored
/// borders), multiplicative speckle 1 + N(0, speckle_sigma), clamp, 8-bit.
BevImage render_radar(const BevImage & bev_truth, const RadarModel & model);

/// Separable Gaussian blur with half-sample symmetric borders (d c b a | a b c d).
ImageXd gaussian_blur(const ImageXd & image, double sigma);

struct SynthOptions
{
  LidarModel lidar;
  RadarModel radar;
  BevGridSpec grid;
  VoxelSpec voxel{VoxelSpec::cube(0.8)};
  PairingOptions pairing;
};

struct SynthResult
{
  PairManifest manifest;
  std::size_t skipped{0};
  std::vector<std::string> warnings;
};

/// Writes a complete dataset under out_dir:
///   scans/<t>.pcbf   raw ray-cast scans (sensor frame)
///   poses.csv        trajectory
///   map.pcbf         accumulated map
///   truth/<t>.pgm    analytic_bev per pose
///   radar/<t>.pgm    render_radar(truth)
///   gt/<t>.pgm       pipeline ground truth (map, crop, project)
///   manifest.jsonl
/// The LiDAR and radar frames coincide (identity extrinsic).
SynthResult generate_dataset(
  const World & world, const PoseTrack & trajectory, const SynthOptions & options,
  const std::filesystem::path & out_dir);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__SYNTH_HPP_
