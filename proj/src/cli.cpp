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

#include "radar_enhance/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "radar_enhance/dataset_io.hpp"
#include "radar_enhance/errors.hpp"
#include "radar_enhance/metrics.hpp"
#include "radar_enhance/pairing.hpp"
#include "radar_enhance/point_cloud.hpp"
#include "radar_enhance/projection.hpp"
#include "radar_enhance/synth.hpp"

namespace radar_enhance::cli
{
namespace
{

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kTileSeparatorPx = 2;
constexpr std::uint8_t kTileSeparatorValue = 255;

struct Streams
{
  std::ostream & out;
  std::ostream & err;
};

fs::path resolve(const RunConfig & cfg, const fs::path & p)
{
  if (p.empty() || p.is_absolute() || cfg.dataset_root.empty()) {
    return p;
  }
  return cfg.dataset_root / p;
}

void require_existing(const std::vector<fs::path> & paths)
{
  std::string missing;
  for (const auto & p : paths) {
    if (!fs::exists(p)) {
      missing += " " + p.string();
    }
  }
  if (!missing.empty()) {
    throw MissingFilesError("missing input files:" + missing);
  }
}

BevGridSpec grid_from(const RunConfig & cfg)
{
  BevGridSpec grid;
  grid.span_m = cfg.grid_span;
  validate_grid(grid);
  return grid;
}

std::int64_t max_gap_ns(const RunConfig & cfg)
{
  if (!(cfg.max_gap_ms > 0.0)) {
    throw InvalidSpecError("--max-gap-ms must be positive");
  }
  return static_cast<std::int64_t>(std::llround(cfg.max_gap_ms * 1e6));
}

AffineMatrix4d parse_extrinsic(const std::string & text)
{
  if (text.empty()) {
    return AffineMatrix4d::Identity();
  }
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception &) {
      throw InvalidSpecError("bad --extrinsic component '" + item + "'");
    }
  }
  if (v.size() != 6) {
    throw InvalidSpecError("--extrinsic expects x,y,z,roll,pitch,yaw");
  }
  Pose p;
  p.x = v[0];
  p.y = v[1];
  p.z = v[2];
  p.roll = v[3];
  p.pitch = v[4];
  p.yaw = v[5];
  return pose_to_matrix(p);
}

void print_warnings(const std::vector<std::string> & warnings, std::ostream & err)
{
  for (const auto & w : warnings) {
    err << "warning: " << w << "\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_build_map(
  const RunConfig & cfg, const fs::path & scans_dir_arg, const fs::path & poses_arg,
  const fs::path & out_map_arg, bool refilter, Streams io)
{
  const fs::path scans_dir = resolve(cfg, scans_dir_arg);
  const fs::path poses_csv = resolve(cfg, poses_arg);
  const fs::path out_map = resolve(cfg, out_map_arg);
  require_existing({scans_dir, poses_csv});

  const auto files = list_timestamped_files(scans_dir, {".pcbf"});
  if (files.empty()) {
    throw EmptyInputError("no scans found in " + scans_dir.string());
  }
  const PoseTrack track(read_pose_csv(poses_csv));
  const std::int64_t gap = max_gap_ns(cfg);

  std::vector<PosedScan> scans;
  std::vector<std::string> warnings;
  for (const auto & f : files) {
    Pose pose;
    try {
      pose = nearest_pose(track, f.timestamp_ns, gap);
    } catch (const GapExceededError & e) {
      warnings.push_back(f.path.filename().string() + ": " + e.what() + ", skipped");
      continue;
    }
    scans.push_back(PosedScan{read_pcbf(f.path, kLidarFrame), pose});
  }
  print_warnings(warnings, io.err);

  const VoxelSpec voxel = VoxelSpec::cube(cfg.voxel_leaf);
  PointCloud map = accumulate_map(scans, voxel);
  if (refilter) {
    map = voxel_filter(map, voxel);
  }
  if (out_map.has_parent_path()) {
    fs::create_directories(out_map.parent_path());
  }
  write_pcbf(out_map, map);

  const CloudExtent e = extent(map);
  ordered_json stats;
  stats["map"] = out_map.string();
  stats["scans"] = scans.size();
  stats["skipped"] = files.size() - scans.size();
  stats["points"] = map.size();
  stats["extent"]["min"] = {e.min.x(), e.min.y(), e.min.z()};
  stats["extent"]["max"] = {e.max.x(), e.max.y(), e.max.z()};
  io.out << stats.dump() << "\n";
  return kExitOk;
}

int cmd_make_pairs(
  const RunConfig & cfg, const fs::path & map_arg, const fs::path & poses_arg,
  const fs::path & radar_dir_arg, const fs::path & out_dir_arg, const std::string & extrinsic,
  const std::string & split_mode, Streams io)
{
  const fs::path map_path = resolve(cfg, map_arg);
  const fs::path poses_csv = resolve(cfg, poses_arg);
  const fs::path radar_dir = resolve(cfg, radar_dir_arg);
  const fs::path out_dir = resolve(cfg, out_dir_arg);
  require_existing({map_path, poses_csv, radar_dir});

  const PointCloud map = read_pcbf(map_path, kMapFrame);
  const PoseTrack track(read_pose_csv(poses_csv));
  std::vector<fs::path> ignored;
  const auto files = list_timestamped_files(radar_dir, {".pgm", ".png"}, &ignored);
  for (const auto & p : ignored) {
    io.err << "warning: " << p.filename().string() << " has no timestamp stem, ignored\n";
  }
  std::vector<RadarFrame> frames;
  for (const auto & f : files) {
    frames.push_back(RadarFrame{f.path, f.timestamp_ns});
  }
  if (frames.empty()) {
    io.err << "warning: no radar images found in " << radar_dir.string() << "\n";
  }

  PairingOptions options;
  options.crop_half_extent = cfg.crop_half;
  options.max_gap_ns = max_gap_ns(cfg);
  options.allow_empty_map = frames.empty();
  fs::create_directories(out_dir);
  BuildPairsResult built = build_pairs(
    frames, track, map, parse_extrinsic(extrinsic), grid_from(cfg), out_dir, options);
  print_warnings(built.warnings, io.err);

  const SplitMode mode = split_mode == "sequential" ? SplitMode::kSequential : SplitMode::kRandom;
  const PairManifest manifest = split_manifest(built.manifest, cfg.train_fraction, cfg.seed, mode);
  const fs::path manifest_path = out_dir / "manifest.jsonl";
  write_manifest(manifest_path, manifest);

  const auto n_train = static_cast<std::size_t>(std::count_if(
      manifest.records.begin(), manifest.records.end(),
      [](const PairRecord & r) {return r.split == Split::kTrain;}));
  ordered_json summary;
  summary["manifest"] = manifest_path.string();
  summary["records"] = manifest.records.size();
  summary["skipped"] = built.skipped;
  summary["train"] = n_train;
  summary["test"] = manifest.records.size() - n_train;
  io.out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_metrics(
  const RunConfig & cfg, const fs::path & manifest_arg, const fs::path & candidate_arg,
  const std::string & split, const std::string & label, Streams io)
{
  const fs::path manifest_path = resolve(cfg, manifest_arg);
  const fs::path candidate_dir = resolve(cfg, candidate_arg);
  require_existing({manifest_path, candidate_dir});

  const PairManifest manifest = read_manifest(manifest_path);
  std::optional<Split> filter;
  if (split == "train") {
    filter = Split::kTrain;
  } else if (split == "test") {
    filter = Split::kTest;
  }
  const MetricReport report = evaluate_pairs(
    manifest, manifest_path.parent_path(), candidate_dir, filter);
  io.out << report_to_json(report) << "\n";
  const std::string row =
    label.empty() ? fs::absolute(candidate_dir).lexically_normal().filename().string() : label;
  io.err << report_to_table(row, report);
  if (report.psnr_infinite_count > 0) {
    io.err << report.psnr_infinite_count << " of " << report.n_images <<
      " pairs are identical (infinite PSNR) and excluded from the PSNR mean\n";
  }
  return kExitOk;
}

int cmd_synth(
  const RunConfig & cfg, const fs::path & world_arg, const fs::path & trajectory_arg,
  const fs::path & out_dir_arg, double blur_sigma, double speckle_sigma, Streams io)
{
  const fs::path world_path = resolve(cfg, world_arg);
  const fs::path trajectory_csv = resolve(cfg, trajectory_arg);
  const fs::path out_dir = resolve(cfg, out_dir_arg);
  require_existing({world_path, trajectory_csv});

  const World world = read_world_json(world_path);
  const PoseTrack trajectory(read_pose_csv(trajectory_csv));
  SynthOptions options;
  options.grid = grid_from(cfg);
  options.voxel = VoxelSpec::cube(cfg.voxel_leaf);
  options.radar.seed = cfg.seed;
  options.radar.blur_sigma_px = blur_sigma;
  options.radar.speckle_sigma = speckle_sigma;
  options.pairing.crop_half_extent = cfg.crop_half;
  options.pairing.max_gap_ns = max_gap_ns(cfg);

  const SynthResult result = generate_dataset(world, trajectory, options, out_dir);
  print_warnings(result.warnings, io.err);
  ordered_json summary;
  summary["manifest"] = (out_dir / "manifest.jsonl").string();
  summary["frames"] = result.manifest.records.size();
  summary["skipped"] = result.skipped;
  summary["boxes"] = world.boxes.size();
  io.out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_grid(
  const RunConfig & cfg, const fs::path & manifest_arg, const fs::path & out_arg,
  const fs::path & enhanced_arg, int count, Streams io)
{
  const fs::path manifest_path = resolve(cfg, manifest_arg);
  const fs::path out_path = resolve(cfg, out_arg);
  require_existing({manifest_path});
  const PairManifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  fs::path enhanced_dir;
  if (!enhanced_arg.empty()) {
    enhanced_dir = resolve(cfg, enhanced_arg);
    if (!fs::is_directory(enhanced_dir)) {
      io.err << "warning: enhanced dir " << enhanced_dir.string() << " not found, omitting row\n";
      enhanced_dir.clear();
    }
  }

  const int n = std::min<int>(std::max(count, 0), static_cast<int>(manifest.records.size()));
  const int rows = enhanced_dir.empty() ? 2 : 3;
  const int tile_h = manifest.grid.height_px;
  const int tile_w = manifest.grid.width_px;
  if (n == 0) {
    throw EmptyInputError("manifest has no records to tile");
  }
  const int height = rows * tile_h + (rows - 1) * kTileSeparatorPx;
  const int width = n * tile_w + (n - 1) * kTileSeparatorPx;
  GrayImage canvas = GrayImage::Constant(height, width, kTileSeparatorValue);

  auto place = [&](int row, int col, const fs::path & path) {
      GrayImage tile = GrayImage::Zero(tile_h, tile_w);
      try {
        GrayImage img = read_gray_image(path);
        if (img.rows() == tile_h && img.cols() == tile_w) {
          tile = std::move(img);
        } else {
          io.err << "warning: " << path.string() << " is not " << tile_w << "x" << tile_h <<
            ", tile left blank\n";
        }
      } catch (const Error & e) {
        io.err << "warning: " << e.what() << ", tile left blank\n";
      }
      canvas.block(row * (tile_h + kTileSeparatorPx), col * (tile_w + kTileSeparatorPx),
        tile_h, tile_w) = tile;
    };

  for (int c = 0; c < n; ++c) {
    const PairRecord & r = manifest.records[static_cast<std::size_t>(c)];
    const fs::path gt = resolve_manifest_path(base, r.gt_path);
    place(0, c, resolve_manifest_path(base, r.radar_path));
    if (!enhanced_dir.empty()) {
      fs::path candidate;
      for (const char * ext : {".pgm", ".png"}) {
        if (fs::exists(enhanced_dir / (gt.stem().string() + ext))) {
          candidate = enhanced_dir / (gt.stem().string() + ext);
          break;
        }
      }
      place(1, c, candidate.empty() ? enhanced_dir / (gt.stem().string() + ".pgm") : candidate);
    }
    place(rows - 1, c, gt);
  }
  if (out_path.has_parent_path()) {
    fs::create_directories(out_path.parent_path());
  }
  write_gray_image(out_path, canvas);

  ordered_json summary;
  summary["image"] = out_path.string();
  summary["rows"] = rows;
  summary["columns"] = n;
  summary["width"] = width;
  summary["height"] = height;
  io.out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_augment(
  const RunConfig & cfg, const fs::path & manifest_arg, const fs::path & out_arg, Streams io)
{
  const fs::path manifest_path = resolve(cfg, manifest_arg);
  const fs::path out_dir = resolve(cfg, out_arg);
  require_existing({manifest_path});
  const PairManifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  AugmentConfig aug = cfg.augment;
  aug.seed = cfg.seed;
  validate_augment_config(aug);
  fs::create_directories(out_dir / "input");
  fs::create_directories(out_dir / "target");

  std::string ops_log;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const PairRecord & r = manifest.records[i];
    const fs::path gt = resolve_manifest_path(base, r.gt_path);
    const AugmentedPair pair = augment_pair(
      read_gray_image(resolve_manifest_path(base, r.radar_path)), read_gray_image(gt), aug, i);
    const std::string name = gt.stem().string() + ".pgm";
    write_pgm(out_dir / "input" / name, pair.input);
    write_pgm(out_dir / "target" / name, pair.target);
    ops_log += applied_ops_to_json(i, pair.applied_ops) + "\n";
  }
  write_file_atomic(out_dir / "applied_ops.jsonl", ops_log);

  ordered_json summary;
  summary["pairs"] = manifest.records.size();
  summary["ops_log"] = (out_dir / "applied_ops.jsonl").string();
  summary["config"] = ordered_json::parse(augment_config_to_json(aug));
  io.out << summary.dump() << "\n";
  return kExitOk;
}

std::optional<std::string> find_config_arg(const std::vector<std::string> & args)
{
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) {
      return args[i].substr(9);
    }
  }
  return std::nullopt;
}

}  // namespace

RunConfig parse_run_config(const std::string & json_text)
{
  RunConfig cfg;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.contains("dataset_root")) {
      cfg.dataset_root = j.at("dataset_root").get<std::string>();
    }
    cfg.grid_span = j.value("grid_span", cfg.grid_span);
    cfg.voxel_leaf = j.value("voxel_leaf", cfg.voxel_leaf);
    cfg.crop_half = j.value("crop_half", cfg.crop_half);
    cfg.max_gap_ms = j.value("max_gap_ms", cfg.max_gap_ms);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    if (j.contains("augment")) {
      cfg.augment = augment_config_from_json(j.at("augment").dump());
    }
  } catch (const nlohmann::json::exception & e) {
    throw InvalidSpecError(std::string("bad config file: ") + e.what());
  }
  return cfg;
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  Streams io{out, err};
  RunConfig cfg;
  try {
    if (const auto config_path = find_config_arg(args)) {
      cfg = parse_run_config(read_file(*config_path));
    }
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }

  CLI::App app{"LiDAR-assisted radar image enhancement: map building, ground-truth pairing, "
    "synthetic data and metrics", "radar_enhance"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string dataset_root = cfg.dataset_root.string();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--dataset-root", dataset_root, "Root for relative input/output paths");
  app.add_option("--grid-span", cfg.grid_span, "BEV image side length in meters")
  ->check(CLI::PositiveNumber);
  app.add_option("--voxel-leaf", cfg.voxel_leaf, "Voxel leaf size in meters")
  ->check(CLI::PositiveNumber);
  app.add_option("--crop-half", cfg.crop_half, "Crop box half extent in meters")
  ->check(CLI::PositiveNumber);
  app.add_option("--max-gap-ms", cfg.max_gap_ms, "Largest radar-to-pose time gap")
  ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for every random choice");
  app.add_option("--train-fraction", cfg.train_fraction, "Train share of the split")
  ->check(CLI::Range(0.0, 1.0));

  fs::path a;
  fs::path b;
  fs::path c;
  fs::path d;

  auto * build = app.add_subcommand("build-map", "Accumulate posed LiDAR scans into a map");
  bool refilter = false;
  build->add_option("scans_dir", a, "Directory of <timestamp_ns>.pcbf scans")->required();
  build->add_option("poses_csv", b, "Pose CSV")->required();
  build->add_option("out_map", c, "Output PCBF map")->required();
  build->add_flag("--refilter", refilter, "Voxel-filter the accumulated map once more");

  auto * pairs = app.add_subcommand("make-pairs", "Render ground truth for each radar frame");
  std::string extrinsic;
  std::string split_mode = "random";
  pairs->add_option("map", a, "PCBF map")->required();
  pairs->add_option("poses_csv", b, "Pose CSV")->required();
  pairs->add_option("radar_dir", c, "Directory of <timestamp_ns>.pgm/.png radar images")
  ->required();
  pairs->add_option("out_dir", d, "Output directory")->required();
  pairs->add_option("--extrinsic", extrinsic, "LiDAR-to-radar transform x,y,z,roll,pitch,yaw");
  pairs->add_option("--split-mode", split_mode, "random or sequential")
  ->check(CLI::IsMember({"random", "sequential"}));

  auto * metrics = app.add_subcommand("metrics", "PSNR / SSIM / RMI of candidates against gt");
  std::string split_filter = "all";
  std::string label;
  metrics->add_option("manifest", a, "Manifest file")->required();
  metrics->add_option("candidate_dir", b, "Directory of candidate images")->required();
  metrics->add_option("--split", split_filter, "all, train or test")
  ->check(CLI::IsMember({"all", "train", "test"}));
  metrics->add_option("--label", label, "Row label of the printed table");

  auto * synth = app.add_subcommand("synth", "Generate a synthetic paired dataset");
  double blur_sigma = 2.0;
  double speckle_sigma = 0.08;
  synth->add_option("world_json", a, "World description")->required();
  synth->add_option("trajectory_csv", b, "Trajectory in pose CSV format")->required();
  synth->add_option("out_dir", c, "Output directory")->required();
  synth->add_option("--blur-sigma", blur_sigma, "Radar blur sigma in pixels")
  ->check(CLI::NonNegativeNumber);
  synth->add_option("--speckle-sigma", speckle_sigma, "Radar speckle sigma")
  ->check(CLI::NonNegativeNumber);

  auto * grid = app.add_subcommand("grid", "Tile input / enhanced / gt images side by side");
  int count = 4;
  grid->add_option("manifest", a, "Manifest file")->required();
  grid->add_option("out_image", b, "Output .png or .pgm")->required();
  grid->add_option("--enhanced-dir", c, "Directory of enhanced images");
  grid->add_option("--count", count, "Number of pairs")->check(CLI::PositiveNumber);

  auto * augment = app.add_subcommand("augment", "Write augmented pairs and an op log");
  augment->add_option("manifest", a, "Manifest file")->required();
  augment->add_option("out_dir", b, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.dataset_root = dataset_root;

  try {
    if (build->parsed()) {
      return cmd_build_map(cfg, a, b, c, refilter, io);
    }
    if (pairs->parsed()) {
      return cmd_make_pairs(cfg, a, b, c, d, extrinsic, split_mode, io);
    }
    if (metrics->parsed()) {
      return cmd_metrics(cfg, a, b, split_filter, label, io);
    }
    if (synth->parsed()) {
      return cmd_synth(cfg, a, b, c, blur_sigma, speckle_sigma, io);
    }
    if (grid->parsed()) {
      return cmd_grid(cfg, a, b, c, count, io);
    }
    if (augment->parsed()) {
      return cmd_augment(cfg, a, b, io);
    }
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error & e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace radar_enhance::cli
