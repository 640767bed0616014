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

#ifndef RADAR_ENHANCE__PAIRING_HPP_
#define RADAR_ENHANCE__PAIRING_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radar_enhance/geometry.hpp"
#include "radar_enhance/image.hpp"
#include "radar_enhance/point_cloud.hpp"

namespace radar_enhance
{

inline constexpr std::int64_t kDefaultMaxGapNs = 500'000'000;

/// Poses sorted strictly ascending by timestamp. Never empty.
class PoseTrack
{
public:
  explicit PoseTrack(std::vector<Pose> poses);

  const std::vector<Pose> & poses() const {return poses_;}
  std::size_t size() const {return poses_.size();}

private:
  std::vector<Pose> poses_;
};

/// Pose minimizing |timestamp - query|; an exact midpoint resolves to the
/// earlier pose. Throws GapExceededError when the best gap is > max_gap_ns.
Pose nearest_pose(const PoseTrack & track, std::int64_t query_ns, std::int64_t max_gap_ns);

enum class Split
{
  kTrain,
  kTest,
};

const char * to_string(Split split);

struct PairRecord
{
  std::string radar_path;  // relative to the manifest directory unless absolute
  std::string gt_path;
  std::int64_t timestamp_ns{0};
  Pose pose;
  Split split{Split::kTrain};
  bool empty_gt{false};  // crop held no points; the gt image is all zero

  bool operator==(const PairRecord &) const = default;
};

struct PairManifest
{
  BevGridSpec grid;
  std::vector<PairRecord> records;

  bool operator==(const PairManifest &) const = default;
};

/// Line-delimited JSON: one header line with the grid, then one record per
/// line. UTF-8, '\n' separated.
std::string serialize_manifest(const PairManifest & manifest);

/// Throws ParseError naming the 1-based line of the first bad record.
PairManifest parse_manifest(const std::string & text);

PairManifest read_manifest(const std::filesystem::path & path);
void write_manifest(const std::filesystem::path & path, const PairManifest & manifest);

/// Resolves a manifest path against the manifest directory.
std::filesystem::path resolve_manifest_path(
  const std::filesystem::path & manifest_dir, const std::string & stored);

struct RadarFrame
{
  std::filesystem::path path;
  std::int64_t timestamp_ns{0};
};

struct PairingOptions
{
  double crop_half_extent{100.0};
  std::int64_t max_gap_ns{kDefaultMaxGapNs};
  bool allow_empty_map{false};  // emit all-zero ground truth instead of failing
};

/// Ground truth for one pose: crop the map around the pose (full z range),
/// move it into the radar frame via extrinsic * pose^-1, clip to the grid and
/// rasterize.
BevImage render_ground_truth(
  const PointCloud & map, const Pose & pose, const AffineMatrix4d & lidar_to_radar,
  const BevGridSpec & grid, double crop_half_extent);

struct BuildPairsResult
{
  PairManifest manifest;
  std::size_t skipped{0};
  std::vector<std::string> warnings;
};

/// For each radar frame (in timestamp order): nearest pose, ground-truth
/// render, gt PGM written to out_dir/gt/<stem>.pgm. Frames without a pose
/// within max_gap_ns are skipped and counted. Radar images whose size differs
/// from the grid are bilinearly resampled into out_dir/radar/. All records are
/// marked train; see split_manifest.
BuildPairsResult build_pairs(
  std::span<const RadarFrame> radar_frames, const PoseTrack & track, const PointCloud & map,
  const AffineMatrix4d & lidar_to_radar, const BevGridSpec & grid,
  const std::filesystem::path & out_dir, const PairingOptions & options = {});

enum class SplitMode
{
  kRandom,      // seeded shuffle
  kSequential,  // first records train, rest test
};

/// floor(fraction * n + 0.5)
std::size_t train_count(std::size_t n, double train_fraction);

/// Assigns train/test labels; record order is unchanged.
PairManifest split_manifest(
  const PairManifest & manifest, double train_fraction, std::uint64_t seed,
  SplitMode mode = SplitMode::kRandom);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__PAIRING_HPP_
