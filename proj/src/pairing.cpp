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

#include "radar_enhance/pairing.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "radar_enhance/dataset_io.hpp"
#include "radar_enhance/projection.hpp"
#include "radar_enhance/rng.hpp"

namespace radar_enhance
{
namespace
{

using nlohmann::json;

constexpr std::uint64_t kSplitStream = 0x5350'4c49'54ULL;  // "SPLIT"

json pose_to_json(const Pose & p)
{
  return json{{"timestamp_ns", p.timestamp_ns}, {"x", p.x}, {"y", p.y}, {"z", p.z},
    {"roll", p.roll}, {"pitch", p.pitch}, {"yaw", p.yaw}};
}

Pose pose_from_json(const json & j)
{
  Pose p;
  p.timestamp_ns = j.at("timestamp_ns").get<std::int64_t>();
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.z = j.at("z").get<double>();
  p.roll = j.at("roll").get<double>();
  p.pitch = j.at("pitch").get<double>();
  p.yaw = j.at("yaw").get<double>();
  validate_pose(p);
  return p;
}

Split split_from_string(const std::string & s)
{
  if (s == "train") {
    return Split::kTrain;
  }
  if (s == "test") {
    return Split::kTest;
  }
  throw std::invalid_argument("split must be 'train' or 'test', got '" + s + "'");
}

__int128 abs_gap(std::int64_t a, std::int64_t b)
{
  const __int128 d = static_cast<__int128>(a) - static_cast<__int128>(b);
  return d < 0 ? -d : d;
}

}  // namespace

PoseTrack::PoseTrack(std::vector<Pose> poses)
: poses_(std::move(poses))
{
  if (poses_.empty()) {
    throw EmptyInputError("pose track is empty");
  }
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    validate_pose(poses_[i]);
    if (i > 0 && poses_[i].timestamp_ns <= poses_[i - 1].timestamp_ns) {
      throw InvalidPoseError(
              "pose timestamps must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

Pose nearest_pose(const PoseTrack & track, std::int64_t query_ns, std::int64_t max_gap_ns)
{
  if (max_gap_ns <= 0) {
    throw InvalidSpecError("max_gap_ns must be positive");
  }
  const auto & poses = track.poses();
  const auto it = std::lower_bound(
    poses.begin(), poses.end(), query_ns,
    [](const Pose & p, std::int64_t t) {return p.timestamp_ns < t;});

  auto best = it;
  if (it == poses.end()) {
    best = std::prev(it);
  } else if (it != poses.begin()) {
    const auto before = std::prev(it);
    // Midpoint ties go to the earlier pose.
    if (abs_gap(before->timestamp_ns, query_ns) <= abs_gap(it->timestamp_ns, query_ns)) {
      best = before;
    }
  }
  const __int128 gap = abs_gap(best->timestamp_ns, query_ns);
  if (gap > max_gap_ns) {
    throw GapExceededError(
            "no pose within " + std::to_string(max_gap_ns) + " ns of t=" +
            std::to_string(query_ns));
  }
  return *best;
}

const char * to_string(Split split)
{
  return split == Split::kTrain ? "train" : "test";
}

std::string serialize_manifest(const PairManifest & manifest)
{
  std::string out;
  const json header{{"type", "header"}, {"format", "radar_enhance.manifest"}, {"version", 1},
    {"grid", {{"width_px", manifest.grid.width_px}, {"height_px", manifest.grid.height_px},
      {"span_m", manifest.grid.span_m}}}};
  out += header.dump() + "\n";
  for (const auto & r : manifest.records) {
    const json line{{"radar_path", r.radar_path}, {"gt_path", r.gt_path},
      {"timestamp_ns", r.timestamp_ns}, {"pose", pose_to_json(r.pose)},
      {"split", to_string(r.split)}, {"empty_gt", r.empty_gt}};
    out += line.dump() + "\n";
  }
  return out;
}

PairManifest parse_manifest(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  PairManifest manifest;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      const json j = json::parse(line);
      if (!saw_header) {
        if (j.value("type", "") != "header") {
          throw std::invalid_argument("first line must be the manifest header");
        }
        const auto & g = j.at("grid");
        manifest.grid.width_px = g.at("width_px").get<int>();
        manifest.grid.height_px = g.at("height_px").get<int>();
        manifest.grid.span_m = g.at("span_m").get<double>();
        validate_grid(manifest.grid);
        saw_header = true;
        continue;
      }
      PairRecord r;
      r.radar_path = j.at("radar_path").get<std::string>();
      r.gt_path = j.at("gt_path").get<std::string>();
      r.timestamp_ns = j.at("timestamp_ns").get<std::int64_t>();
      r.pose = pose_from_json(j.at("pose"));
      r.split = split_from_string(j.at("split").get<std::string>());
      r.empty_gt = j.value("empty_gt", false);
      if (r.radar_path.empty() || r.gt_path.empty()) {
        throw std::invalid_argument("record paths must be non-empty");
      }
      if (!manifest.records.empty() && r.timestamp_ns < manifest.records.back().timestamp_ns) {
        throw std::invalid_argument("record timestamps must be non-decreasing");
      }
      manifest.records.push_back(std::move(r));
    } catch (const ParseError &) {
      throw;
    } catch (const std::exception & e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!saw_header) {
    throw ParseError(std::max<std::size_t>(line_no, 1), "manifest has no header line");
  }
  return manifest;
}

PairManifest read_manifest(const std::filesystem::path & path)
{
  try {
    return parse_manifest(read_file(path));
  } catch (const ParseError & e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path & path, const PairManifest & manifest)
{
  write_file_atomic(path, serialize_manifest(manifest));
}

std::filesystem::path resolve_manifest_path(
  const std::filesystem::path & manifest_dir, const std::string & stored)
{
  const std::filesystem::path p(stored);
  return p.is_absolute() ? p : manifest_dir / p;
}

BevImage render_ground_truth(
  const PointCloud & map, const Pose & pose, const AffineMatrix4d & lidar_to_radar,
  const BevGridSpec & grid, double crop_half_extent)
{
  CropSpec crop;
  crop.center = Vector3d(pose.x, pose.y, pose.z);
  crop.half_extent_x = crop_half_extent;
  crop.half_extent_y = crop_half_extent;
  crop.z_mode = ZRange::kFull;
  const PointCloud instance = crop_box(map, crop);
  const AffineMatrix4d map_to_radar = compose(lidar_to_radar, inverse(pose_to_matrix(pose)));
  return project_bev(crop_to_grid(to_radar_frame(instance, map_to_radar), grid), grid);
}

BuildPairsResult build_pairs(
  std::span<const RadarFrame> radar_frames, const PoseTrack & track, const PointCloud & map,
  const AffineMatrix4d & lidar_to_radar, const BevGridSpec & grid,
  const std::filesystem::path & out_dir, const PairingOptions & options)
{
  namespace fs = std::filesystem;
  validate_grid(grid);
  if (map.empty() && !options.allow_empty_map) {
    throw EmptyInputError("point cloud map is empty");
  }
  if (map.frame_id != kMapFrame) {
    throw FrameMismatchError("expected a '" + std::string(kMapFrame) + "' cloud");
  }

  BuildPairsResult result;
  result.manifest.grid = grid;

  std::vector<RadarFrame> frames(radar_frames.begin(), radar_frames.end());
  std::stable_sort(
    frames.begin(), frames.end(),
    [](const RadarFrame & a, const RadarFrame & b) {return a.timestamp_ns < b.timestamp_ns;});

  const fs::path gt_dir = out_dir / "gt";
  fs::create_directories(gt_dir);
  const fs::path out_abs = fs::absolute(out_dir);

  std::set<std::string> used_stems;
  for (const auto & frame : frames) {
    const std::string stem = frame.path.stem().string();
    if (!used_stems.insert(stem).second) {
      result.warnings.push_back("duplicate radar frame name '" + stem + "', skipped");
      ++result.skipped;
      continue;
    }

    GrayImage radar;
    try {
      radar = read_gray_image(frame.path);
    } catch (const IngestionError & e) {
      throw IngestionError(std::string("unreadable radar image: ") + e.what());
    }

    Pose pose;
    try {
      pose = nearest_pose(track, frame.timestamp_ns, options.max_gap_ns);
    } catch (const GapExceededError & e) {
      result.warnings.push_back(frame.path.filename().string() + ": " + e.what() + ", skipped");
      ++result.skipped;
      continue;
    }

    fs::path radar_path = frame.path;
    if (radar.rows() != grid.height_px || radar.cols() != grid.width_px) {
      const fs::path resampled_dir = out_dir / "radar";
      fs::create_directories(resampled_dir);
      radar_path = resampled_dir / (stem + ".pgm");
      result.warnings.push_back(
        frame.path.filename().string() + ": resampled " + std::to_string(radar.cols()) + "x" +
        std::to_string(radar.rows()) + " radar image to the grid");
      write_pgm(radar_path, resize_bilinear(radar, grid.height_px, grid.width_px));
    }

    const BevImage gt = render_ground_truth(
      map, pose, lidar_to_radar, grid, options.crop_half_extent);
    const fs::path gt_path = gt_dir / (stem + ".pgm");
    write_pgm(gt_path, gt.pixels);

    PairRecord record;
    record.radar_path = fs::proximate(fs::absolute(radar_path), out_abs).generic_string();
    record.gt_path = fs::path("gt/" + stem + ".pgm").generic_string();
    record.timestamp_ns = frame.timestamp_ns;
    record.pose = pose;
    record.split = Split::kTrain;
    record.empty_gt = (gt.pixels.array() == 0).all();
    if (record.empty_gt) {
      result.warnings.push_back(frame.path.filename().string() + ": empty crop, gt is all zero");
    }
    result.manifest.records.push_back(std::move(record));
  }
  return result;
}

std::size_t train_count(std::size_t n, double train_fraction)
{
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
}

PairManifest split_manifest(
  const PairManifest & manifest, double train_fraction, std::uint64_t seed, SplitMode mode)
{
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidSpecError("train_fraction must lie in (0, 1)");
  }
  const std::size_t n = manifest.records.size();
  const std::size_t n_train = std::min(train_count(n, train_fraction), n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::kRandom && n > 1) {
    SplitMix64 rng(derive_key(seed, {kSplitStream}));
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }
  }

  PairManifest out = manifest;
  for (auto & r : out.records) {
    r.split = Split::kTest;
  }
  for (std::size_t k = 0; k < n_train; ++k) {
    out.records[order[k]].split = Split::kTrain;
  }
  return out;
}

}  // namespace radar_enhance
