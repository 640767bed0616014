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

#ifndef RADAR_ENHANCE__DATASET_IO_HPP_
#define RADAR_ENHANCE__DATASET_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radar_enhance/geometry.hpp"
#include "radar_enhance/point_cloud.hpp"

namespace radar_enhance
{

// Pose CSV: header "timestamp_ns,x,y,z,roll,pitch,yaw", radians, one row per pose.
inline constexpr const char * kPoseCsvHeader = "timestamp_ns,x,y,z,roll,pitch,yaw";

std::vector<Pose> parse_pose_csv(const std::string & text);
std::vector<Pose> read_pose_csv(const std::filesystem::path & path);
std::string format_pose_csv(const std::vector<Pose> & poses);
void write_pose_csv(const std::filesystem::path & path, const std::vector<Pose> & poses);

// PCBF point cloud file, little-endian:
//   "PCBF" | u32 version (1) | u64 count | count x {f32 x, f32 y, f32 z, f32 intensity}
inline constexpr std::uint32_t kPcbfVersion = 1;

/// Decodes a PCBF payload. NaN/Inf anywhere is an IngestionError. When any
/// intensity falls outside [0, 1] the file's intensities are min-max
/// normalized; a constant out-of-range intensity maps to 1.
PointCloud decode_pcbf(const std::string & bytes, const std::string & frame_id);
PointCloud read_pcbf(const std::filesystem::path & path, const std::string & frame_id);

/// Coordinates and intensities are narrowed to 32-bit floats.
std::string encode_pcbf(const PointCloud & cloud);
void write_pcbf(const std::filesystem::path & path, const PointCloud & cloud);

/// Integer timestamp carried by a file stem ("1630580...123.pcbf"), if any.
std::optional<std::int64_t> timestamp_from_stem(const std::filesystem::path & path);

struct TimestampedFile
{
  std::filesystem::path path;
  std::int64_t timestamp_ns{0};
};

/// Regular files in `dir` whose extension is one of `extensions` (lower-case,
/// with dot) and whose stem is an integer timestamp, sorted by timestamp then
/// path. Files with non-numeric stems are reported in `ignored` when given.
std::vector<TimestampedFile> list_timestamped_files(
  const std::filesystem::path & dir, const std::vector<std::string> & extensions,
  std::vector<std::filesystem::path> * ignored = nullptr);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path & path, const std::string & bytes);

std::string read_file(const std::filesystem::path & path);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__DATASET_IO_HPP_
