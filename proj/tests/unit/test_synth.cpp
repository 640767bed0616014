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

#include <gtest/gtest.h>

#include <numbers>

#include "oracles/oracles.hpp"
#include "radar_enhance/dataset_io.hpp"
#include "radar_enhance/errors.hpp"
#include "radar_enhance/synth.hpp"
#include "support/test_support.hpp"

namespace radar_enhance
{
namespace
{

namespace fs = std::filesystem;
using test_support::Rng;
using test_support::TempDir;

Box box(Vector3d lo, Vector3d hi, double refl = 1.0)
{
  return Box{lo, hi, refl};
}

Pose pose_xy(std::int64_t t, double x, double y, double yaw = 0.0)
{
  Pose p;
  p.timestamp_ns = t;
  p.x = x;
  p.y = y;
  p.yaw = yaw;
  return p;
}

double agreement(const GrayImage & a, const GrayImage & b)
{
  const auto close =
    ((a.cast<int>() - b.cast<int>()).array().abs() <= 1).count();
  return static_cast<double>(close) / static_cast<double>(a.size());
}

TEST(RayBox, ClosedFormHit)
{
  const Box b = box({9.5, -0.5, -0.5}, {10.5, 0.5, 0.5});
  const auto t = ray_box_intersection(Vector3d::Zero(), Vector3d::UnitX(), b);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(*t, 9.5);
  EXPECT_FALSE(ray_box_intersection(Vector3d::Zero(), -Vector3d::UnitX(), b).has_value());
  EXPECT_FALSE(ray_box_intersection(Vector3d::Zero(), Vector3d::UnitY(), b).has_value());
}

TEST(RayBox, ObliqueMatchesClosedForm)
{
  Rng rng(91);
  for (int i = 0; i < 200; ++i) {
    // slab x in [a, a+w]; ray aimed at a point on the near face
    const double a = test_support::uniform(rng, 2.0, 50.0);
    const Box b = box({a, -20, -20}, {a + 1.0, 20, 20});
    const Vector3d target(a, test_support::uniform(rng, -19, 19), test_support::uniform(rng, -19,
      19));
    const Vector3d dir = target.normalized();
    const auto t = ray_box_intersection(Vector3d::Zero(), dir, b);
    ASSERT_TRUE(t.has_value());
    ASSERT_NEAR(*t, target.norm(), 1e-9);
  }
}

TEST(Raycast, EmptyWorld)
{
  EXPECT_TRUE(raycast_scan(World{}, Pose{}, LidarModel{}).empty());
}

TEST(Raycast, StraightAhead)
{
  World w;
  w.boxes.push_back(box({9.5, -0.5, -0.5}, {10.5, 0.5, 0.5}, 0.6));
  LidarModel m;
  m.n_azimuth = 4;
  m.elevations_rad = {0.0};
  const PointCloud scan = raycast_scan(w, Pose{}, m);
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_EQ(scan.points[0].position, Vector3d(9.5, 0, 0));
  EXPECT_EQ(scan.points[0].intensity, 0.6);
  EXPECT_EQ(scan.frame_id, kLidarFrame);
}

TEST(Raycast, PointsInSensorFrame)
{
  World w;
  w.boxes.push_back(box({19.5, 9.5, -0.5}, {20.5, 10.5, 0.5}));
  LidarModel m;
  m.n_azimuth = 4;
  m.elevations_rad = {0.0};
  // pose at (10, 10) looking along +x sees the box 9.5 m ahead
  const PointCloud scan = raycast_scan(w, pose_xy(0, 10, 10), m);
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_NEAR((scan.points[0].position - Vector3d(9.5, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(Raycast, RangesWithinLimits)
{
  Rng rng(92);
  const World w = test_support::random_world(rng, 12);
  LidarModel m;
  m.max_range = 40.0;
  const PointCloud scan = raycast_scan(w, pose_xy(0, 5, 0), m);
  ASSERT_FALSE(scan.empty());
  for (const auto & p : scan.points) {
    ASSERT_GE(p.position.norm(), 0.0);
    ASSERT_LE(p.position.norm(), 40.0 + 1e-9);
  }
}

TEST(Raycast, QuarterTurnSymmetry)
{
  World w;
  for (int k = 0; k < 4; ++k) {
    const double a = k * std::numbers::pi / 2.0;
    const Vector3d c(15.0 * std::cos(a), 15.0 * std::sin(a), 0.0);
    w.boxes.push_back(box(c - Vector3d(2, 2, 1), c + Vector3d(2, 2, 3), 0.7));
  }
  LidarModel m;
  m.n_azimuth = 256;
  const PointCloud straight = raycast_scan(w, Pose{}, m);
  const PointCloud turned = raycast_scan(w, pose_xy(0, 0, 0, std::numbers::pi / 2.0), m);
  ASSERT_EQ(straight.size(), turned.size());
  ASSERT_FALSE(straight.empty());
  for (std::size_t i = 0; i < straight.size(); ++i) {
    ASSERT_LT((straight.points[i].position - turned.points[i].position).norm(), 1e-9);
  }
}

TEST(Raycast, PoseInsideBox)
{
  World w;
  w.boxes.push_back(box({-1, -1, -1}, {1, 1, 1}));
  EXPECT_THROW(raycast_scan(w, Pose{}, LidarModel{}), PoseInsideObjectError);
}

TEST(Raycast, NearestBoxOccludes)
{
  World w;
  w.boxes.push_back(box({20, -1, -1}, {21, 1, 1}, 0.2));
  w.boxes.push_back(box({10, -1, -1}, {11, 1, 1}, 0.9));
  LidarModel m;
  m.n_azimuth = 4;
  m.elevations_rad = {0.0};
  const PointCloud scan = raycast_scan(w, Pose{}, m);
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_EQ(scan.points[0].position.x(), 10.0);
  EXPECT_EQ(scan.points[0].intensity, 0.9);
}

TEST(World, JsonRoundTripAndValidation)
{
  Rng rng(93);
  const World w = test_support::random_world(rng, 5);
  const World back = parse_world_json(world_to_json(w));
  ASSERT_EQ(back.boxes.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.boxes[i].min, w.boxes[i].min);
    EXPECT_EQ(back.boxes[i].max, w.boxes[i].max);
    EXPECT_EQ(back.boxes[i].reflectivity, w.boxes[i].reflectivity);
  }
  EXPECT_THROW(parse_world_json(
      R"({"boxes":[{"min":[0,0,0],"max":[0,1,1],"reflectivity":1}]})"), InvalidSpecError);
  EXPECT_THROW(parse_world_json(
      R"({"boxes":[{"min":[0,0,0],"max":[1,1,1],"reflectivity":0}]})"), InvalidSpecError);
  EXPECT_THROW(parse_world_json(R"({"boxes":[{"min":[0,0],"max":[1,1,1]}]})"),
    InvalidSpecError);
  EXPECT_TRUE(parse_world_json("{}").boxes.empty());
}

TEST(AnalyticBev, EmptyWorld)
{
  EXPECT_EQ(analytic_bev(World{}, Pose{}, BevGridSpec{}).pixels.maxCoeff(), 0);
}

TEST(AnalyticBev, PixelAlignedBox)
{
  const double res = BevGridSpec{}.resolution();
  // rows/cols 100..110 inclusive
  const double lo = 100.0 - 111 * res;
  const double hi = 100.0 - 100 * res;
  World w;
  w.boxes.push_back(box({lo, lo, 0}, {hi, hi, 2}, 1.0));
  const GrayImage img = analytic_bev(w, Pose{}, BevGridSpec{}).pixels;
  GrayImage expected = GrayImage::Zero(256, 256);
  expected.block(100, 100, 11, 11).setConstant(255);
  EXPECT_EQ(img, expected);
}

TEST(AnalyticBev, TallestBoxWins)
{
  World w;
  w.boxes.push_back(box({0, 0, 0}, {10, 10, 2}, 1.0));
  w.boxes.push_back(box({5, 5, 0}, {15, 15, 6}, 0.5));
  const GrayImage img = analytic_bev(w, Pose{}, BevGridSpec{}).pixels;
  const double res = BevGridSpec{}.resolution();
  auto px = [&](double x, double y) {
      return img(static_cast<int>((100.0 - x) / res), static_cast<int>((100.0 - y) / res));
    };
  EXPECT_EQ(px(7.3, 7.3), 128);
  EXPECT_EQ(px(2.3, 2.3), 255);
  EXPECT_EQ(px(12.3, 12.3), 128);
  EXPECT_EQ(px(-3.0, -3.0), 0);
}

TEST(AnalyticBev, MatchesFootprintOracle)
{
  Rng rng(94);
  for (int trial = 0; trial < 5; ++trial) {
    World w = test_support::random_world(rng, 15);
    // overlapping stacks and equal heights exercise the tie rule
    w.boxes.push_back(w.boxes[0]);
    w.boxes.back().reflectivity = 0.95;
    const Pose p = pose_xy(0, test_support::uniform(rng, -30, 30),
        test_support::uniform(rng, -3, 3));
    ASSERT_EQ(analytic_bev(w, p, BevGridSpec{}).pixels,
      oracles::footprint_image(w, Vector3d(p.x, p.y, 0), BevGridSpec{}));
  }
}

TEST(AnalyticBev, QuarterTurnPose)
{
  Rng rng(95);
  const World w = test_support::random_world(rng, 10);
  World ego;  // the same world expressed in the frame of a pose yawed by +90 deg
  for (const auto & b : w.boxes) {
    ego.boxes.push_back(box({b.min.y(), -b.max.x(), b.min.z()}, {b.max.y(), -b.min.x(),
        b.max.z()}, b.reflectivity));
  }
  EXPECT_EQ(analytic_bev(w, pose_xy(0, 0, 0, std::numbers::pi / 2.0), BevGridSpec{}).pixels,
    oracles::footprint_image(ego, Vector3d::Zero(), BevGridSpec{}));
}

TEST(AnalyticBev, Deterministic)
{
  Rng rng(96);
  const World w = test_support::random_world(rng, 20);
  const Pose p = pose_xy(0, 3, 1, 0.4);
  EXPECT_EQ(analytic_bev(w, p, BevGridSpec{}).pixels, analytic_bev(w, p, BevGridSpec{}).pixels);
}

TEST(RenderRadar, NoDegradationIsIdentity)
{
  Rng rng(97);
  const BevImage img(BevGridSpec{}, test_support::random_image(rng, 256, 256));
  RadarModel m;
  m.blur_sigma_px = 0.0;
  m.speckle_sigma = 0.0;
  EXPECT_EQ(render_radar(img, m).pixels, img.pixels);
}

TEST(RenderRadar, BlurKeepsConstant)
{
  const BevImage img(BevGridSpec{}, GrayImage::Constant(256, 256, 173));
  RadarModel m;
  m.speckle_sigma = 0.0;
  EXPECT_EQ(render_radar(img, m).pixels, img.pixels);
}

TEST(RenderRadar, ImpulseMatchesDirectConvolution)
{
  GrayImage impulse = GrayImage::Zero(256, 256);
  impulse(128, 77) = 255;
  impulse(3, 250) = 255;  // near a corner so reflection matters
  const BevImage img(BevGridSpec{}, impulse);
  RadarModel m;
  m.speckle_sigma = 0.0;
  const GrayImage got = render_radar(img, m).pixels;
  const GrayImage expected = oracles::convolve_reflect(impulse, 2.0);
  EXPECT_LE((got.cast<int>() - expected.cast<int>()).cwiseAbs().maxCoeff(), 1);
}

TEST(RenderRadar, RandomImageMatchesDirectConvolution)
{
  Rng rng(98);
  const GrayImage src = test_support::random_image(rng, 40, 40);
  for (double sigma : {0.7, 1.5, 3.0}) {
    const GrayImage got = quantize(gaussian_blur(src.cast<double>(), sigma));
    const GrayImage expected = oracles::convolve_reflect(src, sigma);
    EXPECT_LE((got.cast<int>() - expected.cast<int>()).cwiseAbs().maxCoeff(), 1) << sigma;
  }
}

TEST(RenderRadar, SpeckleSeeded)
{
  Rng rng(99);
  const BevImage img(BevGridSpec{}, test_support::random_image(rng, 256, 256));
  RadarModel m;
  m.seed = 5;
  EXPECT_EQ(render_radar(img, m).pixels, render_radar(img, m).pixels);
  RadarModel other = m;
  other.seed = 6;
  EXPECT_NE(render_radar(img, m).pixels, render_radar(img, other).pixels);
  m.blur_sigma_px = -1.0;
  EXPECT_THROW(render_radar(img, m), InvalidSpecError);
}

TEST(GenerateDataset, EmptyWorldSinglePose)
{
  TempDir dir;
  const SynthResult r = generate_dataset(
    World{}, PoseTrack({pose_xy(1'000, 0, 0)}), SynthOptions{}, dir.path());
  ASSERT_EQ(r.manifest.records.size(), 1u);
  const auto & rec = r.manifest.records[0];
  EXPECT_TRUE(rec.empty_gt);
  EXPECT_EQ(read_pgm(resolve_manifest_path(dir.path(), rec.gt_path)).maxCoeff(), 0);
  EXPECT_EQ(read_pgm(resolve_manifest_path(dir.path(), rec.radar_path)).maxCoeff(), 0);
  EXPECT_EQ(read_manifest(dir / "manifest.jsonl"), r.manifest);
}

TEST(GenerateDataset, CorridorAgreesWithAnalyticTruth)
{
  World w;
  for (int k = 0; k < 8; ++k) {
    const double x = -40.0 + 12.0 * k;
    w.boxes.push_back(box({x, 6.0, -2.0}, {x + 3.0, 8.5, 3.0 + 0.5 * k}, 0.3 + 0.08 * k));
    w.boxes.push_back(box({x + 4.0, -9.0, -2.0}, {x + 6.5, -6.0, 2.0}, 0.9 - 0.07 * k));
  }
  std::vector<Pose> poses;
  for (int i = 0; i < 20; ++i) {
    poses.push_back(pose_xy(1'000'000'000 + i * 100'000'000LL, -30.0 + 3.0 * i, 0.0));
  }
  TempDir dir;
  const SynthResult r = generate_dataset(w, PoseTrack(poses), SynthOptions{}, dir.path());
  ASSERT_EQ(r.manifest.records.size(), 20u);
  EXPECT_EQ(r.skipped, 0u);
  for (const auto & rec : r.manifest.records) {
    const GrayImage gt = read_pgm(resolve_manifest_path(dir.path(), rec.gt_path));
    const GrayImage truth = read_pgm(dir / "truth" / (std::to_string(rec.timestamp_ns) + ".pgm"));
    EXPECT_GE(agreement(gt, truth), 0.99) << rec.timestamp_ns;
    EXPECT_GT(gt.maxCoeff(), 0);
  }
  const PointCloud scan0 = read_pcbf(
    dir / "scans" / (std::to_string(poses[0].timestamp_ns) + ".pcbf"), kLidarFrame);
  EXPECT_FALSE(scan0.empty());
  EXPECT_EQ(read_pose_csv(dir / "poses.csv"), poses);
}

TEST(GenerateDataset, ByteIdenticalReplay)
{
  Rng rng(100);
  const World w = test_support::random_world(rng, 6);
  std::vector<Pose> poses;
  for (int i = 0; i < 3; ++i) {
    poses.push_back(pose_xy(5'000 + i * 1'000, 2.0 * i, 0.0));
  }
  SynthOptions options;
  options.radar.seed = 31;
  TempDir a;
  TempDir b;
  generate_dataset(w, PoseTrack(poses), options, a.path());
  generate_dataset(w, PoseTrack(poses), options, b.path());
  EXPECT_EQ(test_support::snapshot_tree(a.path()), test_support::snapshot_tree(b.path()));
}

}  // namespace
}  // namespace radar_enhance
