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

// Acceptance runner: one [PASS]/[FAIL] line per criterion with the measured
// value, the pinned tolerance and the wall time. Exits nonzero on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "radar_enhance/augment.hpp"
#include "radar_enhance/cli.hpp"
#include "radar_enhance/dataset_io.hpp"
#include "radar_enhance/metrics.hpp"
#include "radar_enhance/pairing.hpp"
#include "radar_enhance/projection.hpp"
#include "radar_enhance/synth.hpp"
#include "support/test_support.hpp"

namespace
{

using namespace radar_enhance;  // NOLINT
namespace fs = std::filesystem;
using test_support::Rng;
using test_support::TempDir;
using test_support::uniform;
using test_support::uniform_int;

struct Outcome
{
  bool pass{false};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char * format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  std::array<char, 256> buf{};
  std::snprintf(buf.data(), buf.size(), format, a, b, c, d);
  return buf.data();
}

Outcome voxel_filter_equivalence()
{
  Rng rng(1001);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 2000));
    const PointCloud cloud = test_support::random_cloud(rng, n, -50.0, 50.0, kLidarFrame);
    const VoxelSpec spec{uniform(rng, 0.05, 5.0), uniform(rng, 0.05, 5.0), uniform(rng, 0.05, 5.0)};
    const PointCloud out = voxel_filter(cloud, spec);
    const auto bins = oracles::voxel_bins(cloud, spec.leaf_x, spec.leaf_y, spec.leaf_z);
    if (out.size() != bins.size()) {
      return {false, fmt("trial %.0f: %.0f voxels, oracle %.0f", trial,
          static_cast<double>(out.size()), static_cast<double>(bins.size()))};
    }
    std::size_t i = 0;
    for (const auto & entry : bins) {
      const auto & bin = entry.second;
      const auto & p = out.points[i++];
      const double count = static_cast<double>(bin.count);
      const Vector3d centroid = bin.sum / count;
      const Vector3d pf = p.position;
      const double err = std::max((pf - centroid).cwiseAbs().maxCoeff(),
          std::abs(p.intensity - bin.intensity_sum / count));
      worst = std::max(worst, err);
      if (err > 1e-9) {
        return {false, fmt("trial %.0f: centroid error %.3g", trial, err)};
      }
    }
  }
  const double t = seconds_since(start);
  return {t < 5.0, fmt("100 clouds, max centroid error %.2e (tol 1e-9), %.2f s (limit 5 s)",
      worst, t)};
}

Outcome projection_equivalence()
{
  Rng rng(1002);
  const BevGridSpec grid;
  const auto start = Clock::now();
  std::size_t total_points = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 5000));
    PointCloud cloud = test_support::random_cloud(rng, n, -99.99, 99.99, kRadarFrame);
    // coarse z values force ties so the tie-break rules are exercised
    for (std::size_t k = 0; k < cloud.points.size(); k += 3) {
      cloud.points[k].position.z() = std::round(cloud.points[k].position.z());
    }
    total_points += n;
    const GrayImage got = project_bev(cloud, grid).pixels;
    const GrayImage expected = oracles::max_z_image(cloud, grid);
    if (got != expected) {
      const auto diff = (got.cast<int>() - expected.cast<int>()).array().abs();
      return {false, fmt("trial %.0f: %.0f pixels differ", trial,
          static_cast<double>((diff > 0).count()))};
    }
  }
  const double t = seconds_since(start);
  return {t < 5.0, fmt("100 clouds (%.0f points) bit-identical, %.2f s (limit 5 s)",
      static_cast<double>(total_points), t)};
}

Outcome map_scan_consistency()
{
  Rng rng(1003);
  const BevGridSpec grid;
  const VoxelSpec voxel;
  const AffineMatrix4d identity = AffineMatrix4d::Identity();
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 100, 3000));
    PointCloud scan = test_support::random_cloud(rng, n, -60.0, 60.0, kLidarFrame);
    for (auto & p : scan.points) {
      p.position.z() *= 0.1;
    }
    const std::vector<PosedScan> posed{PosedScan{scan, Pose{}}};
    const PointCloud map = accumulate_map(posed, voxel);
    const GrayImage via_map =
      render_ground_truth(map, Pose{}, identity, grid, grid.span_m / 2.0).pixels;
    const GrayImage via_scan = project_scan(voxel_filter(scan, voxel), identity, grid).pixels;
    if (via_map != via_scan) {
      return {false, fmt("scan %.0f differs", trial)};
    }
  }
  return {true, "20 scans bit-identical"};
}

double agreement(const GrayImage & a, const GrayImage & b)
{
  const auto diff = (a.cast<int>() - b.cast<int>()).array().abs();
  return static_cast<double>((diff <= 1).count()) / static_cast<double>(a.size());
}

Outcome synthetic_end_to_end()
{
  Rng rng(1004);
  const auto start = Clock::now();
  double worst = 1.0;
  std::size_t frames = 0;
  for (int w = 0; w < 5; ++w) {
    const World world = test_support::random_world(rng, 12);
    std::vector<Pose> poses;
    const double x0 = uniform(rng, -40.0, -20.0);
    for (int i = 0; i < 20; ++i) {
      Pose p;
      p.timestamp_ns = 1'000'000'000 + i * 100'000'000LL;
      p.x = x0 + 2.5 * i;
      p.y = uniform(rng, -2.0, 2.0);
      poses.push_back(p);
    }
    TempDir dir;
    SynthOptions options;
    options.radar.seed = static_cast<std::uint64_t>(w);
    const SynthResult r = generate_dataset(world, PoseTrack(poses), options, dir.path());
    if (r.manifest.records.size() != 20) {
      return {false, fmt("world %.0f: %.0f frames", w,
          static_cast<double>(r.manifest.records.size()))};
    }
    for (const auto & rec : r.manifest.records) {
      const GrayImage gt = read_pgm(resolve_manifest_path(dir.path(), rec.gt_path));
      const GrayImage truth = analytic_bev(world, rec.pose, options.grid).pixels;
      worst = std::min(worst, agreement(gt, truth));
      ++frames;
    }
  }
  const double t = seconds_since(start);
  return {worst >= 0.99 && t < 60.0,
    fmt("%.0f frames, worst agreement %.4f (min 0.99), %.1f s (limit 60 s)",
    static_cast<double>(frames), worst, t)};
}

GrayImage noisy_copy(Rng & rng, const GrayImage & img, int amplitude)
{
  GrayImage out = img;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const int v = out.data()[i] + uniform_int(rng, -amplitude, amplitude);
    out.data()[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
  return out;
}

Outcome metric_oracles()
{
  Rng rng(1005);
  double psnr_err = 0.0;
  double ssim_err = 0.0;
  double self_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const GrayImage a = test_support::random_image(rng, 64, 64);
    const GrayImage b = i % 4 == 0 ? test_support::random_image(rng, 64, 64) :
      noisy_copy(rng, a, 10 * i);
    psnr_err = std::max(psnr_err, std::abs(psnr(a, b) - oracles::psnr(a, b)));
    ssim_err = std::max(ssim_err, std::abs(ssim(a, b) - oracles::ssim(a, b)));
    self_err = std::max(self_err, std::abs(ssim(a, a) - 1.0));
  }
  const double extreme = psnr(GrayImage::Zero(8, 8), GrayImage::Constant(8, 8, 255));

  // weakly dependent two-level images, where the Gaussian estimate tracks the
  // discrete mutual information
  double rmi_rel = 0.0;
  for (int i = 0; i < 10; ++i) {
    GrayImage a(64, 64);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      a.data()[k] = uniform(rng, 0.0, 1.0) < 0.5 ? 255 : 0;
    }
    GrayImage b = a;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      if (uniform(rng, 0.0, 1.0) < 0.4) {
        b.data()[k] = static_cast<std::uint8_t>(255 - b.data()[k]);
      }
    }
    const double hist = oracles::histogram_mi(a, b);
    rmi_rel = std::max(rmi_rel, std::abs(rmi(a, b, 0) - hist) / hist);
  }
  const bool pass = psnr_err <= 1e-9 && ssim_err <= 1e-6 && self_err <= 1e-12 &&
    extreme == 0.0 && rmi_rel <= 0.05;
  std::ostringstream os;
  os << "psnr err " << fmt("%.2e", psnr_err) << " (tol 1e-9), ssim err "
     << fmt("%.2e", ssim_err) << " (tol 1e-6), ssim(a,a)-1 " << fmt("%.1e", self_err)
     << ", psnr(0,255) " << extreme << ", rmi rel err " << fmt("%.4f", rmi_rel)
     << " (tol 0.05)";
  return {pass, os.str()};
}

int run_quiet(const std::vector<std::string> & args)
{
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(args, out, err);
}

Outcome determinism()
{
  TempDir dir;
  Rng rng(1006);
  test_support::write_text(dir / "world.json", world_to_json(test_support::random_world(rng, 8)));
  std::vector<Pose> poses;
  for (int i = 0; i < 6; ++i) {
    Pose p;
    p.timestamp_ns = 2'000'000'000 + i * 100'000'000LL;
    p.x = -5.0 + 2.0 * i;
    poses.push_back(p);
  }
  write_pose_csv(dir / "traj.csv", poses);

  std::vector<std::string> failures;
  auto twice = [&](const std::string & name,
      const std::function<std::vector<std::string>(const std::string &)> & args,
      const std::string & result) {
      const std::string a = name + "_a";
      const std::string b = name + "_b";
      if (run_quiet(args(a)) != 0 || run_quiet(args(b)) != 0) {
        failures.push_back(name + " failed to run");
        return;
      }
      const bool same = fs::is_directory(dir / (a + "/" + result)) ?
        test_support::snapshot_tree(dir / (a + "/" + result)) ==
        test_support::snapshot_tree(dir / (b + "/" + result)) :
        read_file(dir / (a + "/" + result)) == read_file(dir / (b + "/" + result));
      if (!same) {
        failures.push_back(name);
      }
    };
  const std::string root = dir.path().string();
  twice("synth", [&](const std::string & o) {
      return std::vector<std::string>{"--seed", "11", "synth", root + "/world.json",
        root + "/traj.csv", root + "/" + o + "/ds"};
    }, "ds");
  const std::string ds = root + "/synth_a/ds";
  twice("build_map", [&](const std::string & o) {
      fs::create_directories(dir / o);
      return std::vector<std::string>{"build-map", ds + "/scans", ds + "/poses.csv",
        root + "/" + o + "/map.pcbf"};
    }, "map.pcbf");
  twice("make_pairs", [&](const std::string & o) {
      return std::vector<std::string>{"--seed", "12", "make-pairs", root + "/build_map_a/map.pcbf",
        ds + "/poses.csv", ds + "/radar", root + "/" + o + "/pairs"};
    }, "pairs");
  twice("augment", [&](const std::string & o) {
      return std::vector<std::string>{"--seed", "13", "augment", ds + "/manifest.jsonl",
        root + "/" + o + "/aug"};
    }, "aug");

  AugmentConfig cfg;
  cfg.seed = 14;
  cfg.probability = 0.5;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const GrayImage in = test_support::random_image(rng, 32, 32);
    const GrayImage tg = test_support::random_image(rng, 32, 32);
    const AugmentedPair x = augment_pair(in, tg, cfg, i);
    const AugmentedPair y = augment_pair(in, tg, cfg, i);
    if (x.input != y.input || x.target != y.target || x.applied_ops != y.applied_ops) {
      failures.push_back("augment_pair");
      break;
    }
  }
  if (!failures.empty()) {
    std::string names;
    for (const auto & f : failures) {
      names += " " + f;
    }
    return {false, "not reproducible:" + names};
  }
  return {true, "build-map, make-pairs, synth, augment and augment_pair reruns byte-identical"};
}

Outcome augmentation_fire_rate()
{
  AugmentConfig cfg;
  cfg.seed = 15;
  cfg.probability = 0.30;
  const GrayImage img = GrayImage::Constant(8, 8, 100);
  std::array<int, kAugmentOpCount> fired{};
  constexpr int kPairs = 10'000;
  for (std::uint64_t i = 0; i < kPairs; ++i) {
    for (const auto & op : augment_pair(img, img, cfg, i).applied_ops) {
      ++fired[static_cast<std::size_t>(op.op)];
    }
  }
  bool pass = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < fired.size(); ++k) {
    const double rate = fired[k] / static_cast<double>(kPairs);
    pass = pass && rate >= 0.27 && rate <= 0.33;
    os << (k ? ", " : "") << op_name(static_cast<AugmentOp>(k)) << " " << fmt("%.4f", rate);
  }
  os << " (allowed [0.27, 0.33])";
  return {pass, os.str()};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"voxel filter equivalence", voxel_filter_equivalence},
    {"projection equivalence", projection_equivalence},
    {"map/scan consistency", map_scan_consistency},
    {"synthetic end-to-end", synthetic_end_to_end},
    {"metric oracles", metric_oracles},
    {"determinism", determinism},
    {"augmentation fire-rate", augmentation_fire_rate},
  };
  int failed = 0;
  for (const auto & [name, check] : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(start);
    std::printf("[%s] %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(),
      o.detail.c_str(), t);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
