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

#include "radar_enhance/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "radar_enhance/dataset_io.hpp"
#include "radar_enhance/errors.hpp"
#include "radar_enhance/rng.hpp"

namespace radar_enhance
{
namespace
{

constexpr std::uint64_t kSpeckleStream = 0x5350'4543'4bULL;

Vector3d vec_from_json(const nlohmann::json & j)
{
  if (!j.is_array() || j.size() != 3) {
    throw InvalidSpecError("expected a 3-element array");
  }
  return Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

nlohmann::ordered_json vec_to_json(const Vector3d & v)
{
  return nlohmann::ordered_json::array({v.x(), v.y(), v.z()});
}

// Half-sample symmetric index into [0, n).
Eigen::Index mirror_index(Eigen::Index i, Eigen::Index n)
{
  const Eigen::Index period = 2 * n;
  Eigen::Index m = i % period;
  if (m < 0) {
    m += period;
  }
  return m < n ? m : period - 1 - m;
}

struct Interval
{
  double lo;
  double hi;
};

template<std::size_t N>
Interval project(const std::array<Eigen::Vector2d, N> & pts, const Eigen::Vector2d & axis)
{
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto & p : pts) {
    const double v = p.dot(axis);
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  }
  return out;
}

// Positive-area overlap of two convex quadrilaterals by separating axes.
bool interiors_overlap(
  const std::array<Eigen::Vector2d, 4> & a, const std::array<Eigen::Vector2d, 4> & b,
  const std::array<Eigen::Vector2d, 4> & axes)
{
  for (const auto & axis : axes) {
    const Interval ia = project(a, axis);
    const Interval ib = project(b, axis);
    if (!(ia.hi > ib.lo && ib.hi > ia.lo)) {
      return false;
    }
  }
  return true;
}

}  // namespace

void validate_world(const World & world)
{
  for (std::size_t i = 0; i < world.boxes.size(); ++i) {
    const Box & b = world.boxes[i];
    if (!b.min.allFinite() || !b.max.allFinite() || !(b.max.array() > b.min.array()).all()) {
      throw InvalidSpecError("box " + std::to_string(i) + " has non-positive volume");
    }
    if (!(b.reflectivity > 0.0 && b.reflectivity <= 1.0)) {
      throw InvalidSpecError("box " + std::to_string(i) + " reflectivity outside (0, 1]");
    }
  }
  if (!(world.bounds_max.array() > world.bounds_min.array()).all()) {
    throw InvalidSpecError("world bounds are empty");
  }
}

World parse_world_json(const std::string & text)
{
  World world;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("bounds")) {
      world.bounds_min = vec_from_json(j.at("bounds").at("min"));
      world.bounds_max = vec_from_json(j.at("bounds").at("max"));
    }
    for (const auto & jb : j.value("boxes", nlohmann::json::array())) {
      Box b;
      b.min = vec_from_json(jb.at("min"));
      b.max = vec_from_json(jb.at("max"));
      b.reflectivity = jb.at("reflectivity").get<double>();
      world.boxes.push_back(b);
    }
  } catch (const nlohmann::json::exception & e) {
    throw InvalidSpecError(std::string("bad world description: ") + e.what());
  }
  validate_world(world);
  return world;
}

World read_world_json(const std::filesystem::path & path)
{
  return parse_world_json(read_file(path));
}

std::string world_to_json(const World & world)
{
  nlohmann::ordered_json j;
  j["bounds"]["min"] = vec_to_json(world.bounds_min);
  j["bounds"]["max"] = vec_to_json(world.bounds_max);
  j["boxes"] = nlohmann::ordered_json::array();
  for (const auto & b : world.boxes) {
    nlohmann::ordered_json jb;
    jb["min"] = vec_to_json(b.min);
    jb["max"] = vec_to_json(b.max);
    jb["reflectivity"] = b.reflectivity;
    j["boxes"].push_back(jb);
  }
  return j.dump(2);
}

std::vector<double> LidarModel::beams() const
{
  if (!elevations_rad.empty()) {
    return elevations_rad;
  }
  constexpr int kBeams = 16;
  std::vector<double> out(kBeams);
  for (int i = 0; i < kBeams; ++i) {
    const double deg = -15.0 + 30.0 * i / (kBeams - 1);
    out[i] = deg * std::numbers::pi / 180.0;
  }
  return out;
}

std::optional<double> ray_box_intersection(
  const Vector3d & origin, const Vector3d & direction, const Box & box)
{
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double o = origin[axis];
    const double d = direction[axis];
    if (d == 0.0) {
      if (o < box.min[axis] || o > box.max[axis]) {
        return std::nullopt;
      }
      continue;
    }
    double t1 = (box.min[axis] - o) / d;
    double t2 = (box.max[axis] - o) / d;
    if (t1 > t2) {
      std::swap(t1, t2);
    }
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_far < t_near || t_near < 0.0) {
    return std::nullopt;
  }
  return t_near;
}

PointCloud raycast_scan(const World & world, const Pose & pose, const LidarModel & model)
{
  validate_world(world);
  if (model.n_azimuth < 4 || !(model.max_range > 0.0)) {
    throw InvalidSpecError("lidar model needs n_azimuth >= 4 and a positive range");
  }
  const AffineMatrix4d to_world = pose_to_matrix(pose);
  const Vector3d origin = to_world.topRightCorner<3, 1>();
  for (std::size_t i = 0; i < world.boxes.size(); ++i) {
    const Box & b = world.boxes[i];
    if ((origin.array() >= b.min.array()).all() && (origin.array() <= b.max.array()).all()) {
      throw PoseInsideObjectError(
              "sensor origin at t=" + std::to_string(pose.timestamp_ns) + " lies in box " +
              std::to_string(i));
    }
  }
  const Eigen::Matrix3d rotation = to_world.topLeftCorner<3, 3>();

  PointCloud scan;
  scan.frame_id = kLidarFrame;
  for (double elevation : model.beams()) {
    const double ce = std::cos(elevation);
    const double se = std::sin(elevation);
    for (int k = 0; k < model.n_azimuth; ++k) {
      const double azimuth = 2.0 * std::numbers::pi * k / model.n_azimuth;
      const Vector3d local(ce * std::cos(azimuth), ce * std::sin(azimuth), se);
      const Vector3d dir = rotation * local;
      double best = std::numeric_limits<double>::infinity();
      double reflectivity = 0.0;
      for (const auto & box : world.boxes) {
        const auto t = ray_box_intersection(origin, dir, box);
        if (t && *t < best) {
          best = *t;
          reflectivity = box.reflectivity;
        }
      }
      if (best <= model.max_range) {
        scan.points.push_back(CloudPoint{best * local, reflectivity});
      }
    }
  }
  return scan;
}

BevImage analytic_bev(const World & world, const Pose & pose, const BevGridSpec & grid)
{
  validate_world(world);
  validate_grid(grid);
  validate_pose(pose);

  const double half = grid.span_m / 2.0;
  const double res = grid.resolution();
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  // World x-y into the ego frame: R(yaw)^T (w - t).
  auto to_ego = [&](double wx, double wy) {
      const double dx = wx - pose.x;
      const double dy = wy - pose.y;
      return Eigen::Vector2d(c * dx + s * dy, -s * dx + c * dy);
    };
  const std::array<Eigen::Vector2d, 4> axes{
    Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(c, -s),
    Eigen::Vector2d(s, c)};

  const auto n_pixels = static_cast<std::size_t>(grid.width_px) * grid.height_px;
  std::vector<double> top(n_pixels, -std::numeric_limits<double>::infinity());
  std::vector<double> value(n_pixels, -1.0);

  for (const auto & box : world.boxes) {
    const std::array<Eigen::Vector2d, 4> footprint{
      to_ego(box.min.x(), box.min.y()), to_ego(box.max.x(), box.min.y()),
      to_ego(box.max.x(), box.max.y()), to_ego(box.min.x(), box.max.y())};
    const Interval ex = project(footprint, axes[0]);
    const Interval ey = project(footprint, axes[1]);
    auto index_range = [&](const Interval & iv, int n) {
        const double lo = std::clamp(std::floor((half - iv.hi) / res), 0.0, n - 1.0);
        const double hi = std::clamp(std::floor((half - iv.lo) / res), -1.0, n - 1.0);
        return std::pair<int, int>(static_cast<int>(lo), static_cast<int>(hi));
      };
    // Candidate range is conservative; the overlap test below is exact.
    const auto [row_lo, row_hi] = index_range(ex, grid.height_px);
    const auto [col_lo, col_hi] = index_range(ey, grid.width_px);
    for (int row = row_lo; row <= row_hi; ++row) {
      const double x_hi = half - row * res;
      const double x_lo = half - (row + 1) * res;
      for (int col = col_lo; col <= col_hi; ++col) {
        const double y_hi = half - col * res;
        const double y_lo = half - (col + 1) * res;
        const std::array<Eigen::Vector2d, 4> pixel{
          Eigen::Vector2d(x_lo, y_lo), Eigen::Vector2d(x_hi, y_lo), Eigen::Vector2d(x_hi, y_hi),
          Eigen::Vector2d(x_lo, y_hi)};
        if (!interiors_overlap(pixel, footprint, axes)) {
          continue;
        }
        const std::size_t k = static_cast<std::size_t>(row) * grid.width_px + col;
        if (box.max.z() > top[k] || (box.max.z() == top[k] && box.reflectivity > value[k])) {
          top[k] = box.max.z();
          value[k] = box.reflectivity;
        }
      }
    }
  }

  BevImage image(grid);
  for (std::size_t k = 0; k < n_pixels; ++k) {
    if (value[k] >= 0.0) {
      image.pixels.data()[k] = to_gray(value[k]);
    }
  }
  return image;
}

ImageXd gaussian_blur(const ImageXd & image, double sigma)
{
  if (!(sigma > 0.0) || image.size() == 0) {
    return image;
  }
  const auto radius = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
  Eigen::VectorXd kernel(2 * radius + 1);
  for (Eigen::Index i = -radius; i <= radius; ++i) {
    kernel(i + radius) = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
  }
  kernel /= kernel.sum();

  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  ImageXd horizontal(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Eigen::Index k = -radius; k <= radius; ++k) {
        acc += kernel(k + radius) * image(r, mirror_index(c + k, cols));
      }
      horizontal(r, c) = acc;
    }
  }
  ImageXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Eigen::Index k = -radius; k <= radius; ++k) {
        acc += kernel(k + radius) * horizontal(mirror_index(r + k, rows), c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

BevImage render_radar(const BevImage & bev_truth, const RadarModel & model)
{
  if (!(model.blur_sigma_px >= 0.0) || !(model.speckle_sigma >= 0.0)) {
    throw InvalidSpecError("radar model sigmas must be non-negative");
  }
  ImageXd x = gaussian_blur(bev_truth.pixels.cast<double>(), model.blur_sigma_px);
  if (model.speckle_sigma > 0.0) {
    SplitMix64 rng(derive_key(model.seed, {kSpeckleStream}));
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      x.data()[k] *= 1.0 + model.speckle_sigma * rng.normal();
    }
  }
  return BevImage(bev_truth.grid, quantize(x));
}

SynthResult generate_dataset(
  const World & world, const PoseTrack & trajectory, const SynthOptions & options,
  const std::filesystem::path & out_dir)
{
  namespace fs = std::filesystem;
  validate_world(world);
  validate_grid(options.grid);
  for (const char * sub : {"scans", "truth", "radar", "gt"}) {
    fs::create_directories(out_dir / sub);
  }

  const auto & poses = trajectory.poses();
  std::vector<PosedScan> scans;
  scans.reserve(poses.size());
  for (const auto & pose : poses) {
    // Continue from the stored float32 values so that rebuilding from the
    // written files reproduces every product exactly.
    const std::string bytes = encode_pcbf(raycast_scan(world, pose, options.lidar));
    write_file_atomic(out_dir / "scans" / (std::to_string(pose.timestamp_ns) + ".pcbf"), bytes);
    scans.push_back(PosedScan{decode_pcbf(bytes, kLidarFrame), pose});
  }
  write_pose_csv(out_dir / "poses.csv", poses);

  const std::string map_bytes = encode_pcbf(accumulate_map(scans, options.voxel));
  write_file_atomic(out_dir / "map.pcbf", map_bytes);
  const PointCloud map = decode_pcbf(map_bytes, kMapFrame);

  std::vector<RadarFrame> frames;
  frames.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::string name = std::to_string(poses[i].timestamp_ns) + ".pgm";
    const BevImage truth = analytic_bev(world, poses[i], options.grid);
    RadarModel radar = options.radar;
    radar.seed = derive_key(options.radar.seed, {static_cast<std::uint64_t>(i)});
    write_pgm(out_dir / "truth" / name, truth.pixels);
    write_pgm(out_dir / "radar" / name, render_radar(truth, radar).pixels);
    frames.push_back(RadarFrame{out_dir / "radar" / name, poses[i].timestamp_ns});
  }

  PairingOptions pairing = options.pairing;
  pairing.allow_empty_map = true;
  BuildPairsResult built = build_pairs(
    frames, trajectory, map, AffineMatrix4d::Identity(), options.grid, out_dir, pairing);
  write_manifest(out_dir / "manifest.jsonl", built.manifest);
  return SynthResult{std::move(built.manifest), built.skipped, std::move(built.warnings)};
}

}  // namespace radar_enhance
