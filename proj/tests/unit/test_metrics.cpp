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

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "oracles/oracles.hpp"
#include "radar_enhance/errors.hpp"
#include "radar_enhance/metrics.hpp"
#include "support/test_support.hpp"

namespace radar_enhance
{
namespace
{

namespace fs = std::filesystem;
using test_support::Rng;
using test_support::TempDir;

GrayImage add_noise(Rng & rng, const GrayImage & img, int amplitude)
{
  GrayImage out = img;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const int v = img.data()[i] + test_support::uniform_int(rng, -amplitude, amplitude);
    out.data()[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
  return out;
}

GrayImage binary_image(Rng & rng, int side, double p_one)
{
  GrayImage img(side, side);
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    img.data()[i] = test_support::uniform(rng, 0.0, 1.0) < p_one ? 255 : 0;
  }
  return img;
}

GrayImage flip_some(Rng & rng, const GrayImage & img, double p_flip)
{
  GrayImage out = img;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (test_support::uniform(rng, 0.0, 1.0) < p_flip) {
      out.data()[i] = static_cast<std::uint8_t>(255 - out.data()[i]);
    }
  }
  return out;
}

TEST(Psnr, IdenticalIsInfinite)
{
  Rng rng(61);
  const GrayImage a = test_support::random_image(rng, 32, 32);
  EXPECT_EQ(psnr(a, a), kPsnrInfinity);
}

TEST(Psnr, BlackVsWhiteIsZero)
{
  EXPECT_EQ(psnr(GrayImage::Zero(64, 64), GrayImage::Constant(64, 64, 255)), 0.0);
}

TEST(Psnr, MatchesScalarOracle)
{
  Rng rng(62);
  for (int i = 0; i < 50; ++i) {
    const GrayImage a = test_support::random_image(rng, 64, 64);
    const GrayImage b = add_noise(rng, a, test_support::uniform_int(rng, 1, 120));
    ASSERT_NEAR(psnr(a, b), oracles::psnr(a, b), 1e-9);
    ASSERT_EQ(psnr(a, b), psnr(b, a));
  }
}

TEST(Psnr, DecreasesWithNoise)
{
  Rng rng(63);
  const GrayImage a = GrayImage::Constant(128, 128, 128);
  double previous = kPsnrInfinity;
  for (int amp : {2, 8, 20, 50, 100}) {
    const double v = psnr(a, add_noise(rng, a, amp));
    EXPECT_LT(v, previous) << "amplitude " << amp;
    previous = v;
  }
}

TEST(Psnr, ShapeMismatch)
{
  EXPECT_THROW(psnr(GrayImage::Zero(4, 4), GrayImage::Zero(4, 5)), ShapeError);
}

TEST(Ssim, SelfSimilarity)
{
  Rng rng(64);
  for (int i = 0; i < 10; ++i) {
    const GrayImage a = test_support::random_image(rng, 40, 57);
    EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  }
  const GrayImage flat = GrayImage::Constant(20, 20, 9);
  EXPECT_NEAR(ssim(flat, flat), 1.0, 1e-12);
}

TEST(Ssim, ConstantBlackVsWhite)
{
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  EXPECT_NEAR(ssim(GrayImage::Zero(32, 32), GrayImage::Constant(32, 32, 255)),
    c1 / (255.0 * 255.0 + c1), 1e-12);
}

TEST(Ssim, MatchesSlidingWindowOracle)
{
  Rng rng(65);
  for (int i = 0; i < 10; ++i) {
    const GrayImage a = test_support::random_image(rng, 64, 64);
    const GrayImage b = i % 2 ? test_support::random_image(rng, 64, 64) : add_noise(rng, a, 40);
    const double v = ssim(a, b);
    ASSERT_NEAR(v, oracles::ssim(a, b), 1e-6);
    ASSERT_NEAR(v, ssim(b, a), 1e-12);
    ASSERT_LE(std::abs(v), 1.0);
  }
}

TEST(Ssim, NonSquareMatchesOracle)
{
  Rng rng(66);
  const GrayImage a = test_support::random_image(rng, 11, 30);
  const GrayImage b = add_noise(rng, a, 60);
  EXPECT_NEAR(ssim(a, b), oracles::ssim(a, b), 1e-6);
}

TEST(Ssim, Errors)
{
  EXPECT_THROW(ssim(GrayImage::Zero(10, 64), GrayImage::Zero(10, 64)), TooSmallError);
  EXPECT_THROW(ssim(GrayImage::Zero(20, 20), GrayImage::Zero(21, 20)), ShapeError);
}

TEST(Rmi, RadiusZeroSelfInformationClosedForm)
{
  Rng rng(67);
  const double eps = 1e-8;
  for (int i = 0; i < 5; ++i) {
    const GrayImage a = test_support::random_image(rng, 48, 48);
    const Eigen::ArrayXd x = a.cast<double>().reshaped().array() / 255.0;
    const double var = (x - x.mean()).square().mean();
    // Gaussian MI of (X, X) with eps on the diagonal
    const double expected =
      0.5 * std::log((var + eps) * (var + eps) / (eps * (2.0 * var + eps)));
    EXPECT_NEAR(rmi(a, a, 0, eps), expected, 1e-6 * expected);
  }
}

TEST(Rmi, SelfIsMaximal)
{
  Rng rng(68);
  const GrayImage a = test_support::random_image(rng, 40, 40);
  for (int radius : {0, 1, 3}) {
    const double self = rmi(a, a, radius);
    for (int i = 0; i < 5; ++i) {
      const GrayImage b = add_noise(rng, a, 10 + 30 * i);
      EXPECT_GE(self, rmi(a, b, radius)) << "radius " << radius;
    }
  }
}

TEST(Rmi, ConstantVsRandomIsZero)
{
  Rng rng(69);
  const GrayImage flat = GrayImage::Constant(40, 40, 100);
  const GrayImage b = test_support::random_image(rng, 40, 40);
  EXPECT_LE(rmi(flat, b), 1e-6);
  EXPECT_LE(rmi(flat, b, 0), 1e-6);
}

TEST(Rmi, TwoLevelAgreesWithHistogramMi)
{
  Rng rng(70);
  for (int i = 0; i < 10; ++i) {
    const GrayImage a = binary_image(rng, 64, 0.5);
    const GrayImage b = flip_some(rng, a, 0.4);
    const double hist = oracles::histogram_mi(a, b);
    if (hist < 1e-4) {
      continue;  // independent by chance, relative error meaningless
    }
    EXPECT_NEAR(rmi(a, b, 0), hist, 0.05 * hist) << "trial " << i;
  }
}

TEST(Rmi, NonNegativeAndSymmetric)
{
  Rng rng(71);
  for (int i = 0; i < 10; ++i) {
    const GrayImage a = test_support::random_image(rng, 32, 32);
    const GrayImage b = i % 2 ? test_support::random_image(rng, 32, 32) : add_noise(rng, a, 50);
    const double ab = rmi(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, rmi(b, a), 1e-9);
  }
}

TEST(Rmi, ShuffledPartnerCarriesLessInformation)
{
  Rng rng(72);
  int wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage a(32, 32);
    // smooth-ish content so neighbourhoods are structured
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        a(r, c) = static_cast<std::uint8_t>(
          127.0 + 100.0 * std::sin(0.3 * r + trial) * std::cos(0.2 * c));
      }
    }
    a = add_noise(rng, a, 10);
    const GrayImage b = add_noise(rng, a, 15);
    GrayImage shuffled = b;
    std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
    wins += rmi(a, shuffled) < rmi(a, b) ? 1 : 0;
  }
  EXPECT_GT(wins, 10);
}

TEST(Rmi, Errors)
{
  EXPECT_THROW(rmi(GrayImage::Zero(8, 8), GrayImage::Zero(8, 9)), ShapeError);
  EXPECT_THROW(rmi(GrayImage::Zero(8, 8), GrayImage::Zero(8, 8), -1), InvalidSpecError);
  EXPECT_THROW(rmi(GrayImage::Zero(5, 5), GrayImage::Zero(5, 5), 3), TooSmallError);
}

class EvaluatePairsTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    Rng rng(73);
    fs::create_directories(dir_ / "gt");
    fs::create_directories(dir_ / "cand");
    for (int i = 0; i < 5; ++i) {
      const std::string stem = std::to_string(1000 + i);
      const GrayImage gt = test_support::random_image(rng, 32, 32);
      const GrayImage cand = add_noise(rng, gt, 20 + 10 * i);
      write_pgm(dir_ / "gt" / (stem + ".pgm"), gt);
      if (i == 2) {
        write_png(dir_ / "cand" / (stem + ".png"), cand);
      } else {
        write_pgm(dir_ / "cand" / (stem + ".pgm"), cand);
      }
      gts_.push_back(gt);
      cands_.push_back(cand);
      PairRecord r;
      r.radar_path = "radar/" + stem + ".pgm";
      r.gt_path = "gt/" + stem + ".pgm";
      r.timestamp_ns = 1000 + i;
      r.split = i < 3 ? Split::kTrain : Split::kTest;
      manifest_.records.push_back(r);
    }
    manifest_.grid = BevGridSpec{32, 32, 25.0};
  }

  TempDir dir_;
  PairManifest manifest_;
  std::vector<GrayImage> gts_;
  std::vector<GrayImage> cands_;
};

TEST_F(EvaluatePairsTest, ArithmeticMean)
{
  const MetricReport report = evaluate_pairs(manifest_, dir_.path(), dir_ / "cand");
  double p = 0.0, s = 0.0, m = 0.0;
  for (int i = 0; i < 5; ++i) {
    p += oracles::psnr(cands_[i], gts_[i]);
    s += oracles::ssim(cands_[i], gts_[i]);
    m += rmi(cands_[i], gts_[i]);
  }
  EXPECT_EQ(report.n_images, 5u);
  EXPECT_EQ(report.psnr_infinite_count, 0u);
  EXPECT_NEAR(report.psnr_db, p / 5.0, 1e-9);
  EXPECT_NEAR(report.ssim, s / 5.0, 1e-6);
  EXPECT_NEAR(report.rmi, m / 5.0, 1e-12);
}

TEST_F(EvaluatePairsTest, GtAsCandidate)
{
  const MetricReport report = evaluate_pairs(manifest_, dir_.path(), dir_ / "gt");
  EXPECT_NEAR(report.ssim, 1.0, 1e-12);
  EXPECT_EQ(report.psnr_infinite_count, 5u);
  EXPECT_EQ(report.psnr_db, kPsnrInfinity);
  const MetricReport noisy = evaluate_pairs(manifest_, dir_.path(), dir_ / "cand");
  EXPECT_GT(report.rmi, noisy.rmi);
  const auto j = nlohmann::json::parse(report_to_json(report));
  EXPECT_EQ(j.at("psnr_db"), "inf");
  EXPECT_EQ(j.at("psnr_infinite_count"), 5);
  EXPECT_EQ(j.at("rmi_variant"), kRmiVariant);
}

TEST_F(EvaluatePairsTest, SplitFilter)
{
  const MetricReport train = evaluate_pairs(manifest_, dir_.path(), dir_ / "cand", Split::kTrain);
  const MetricReport test = evaluate_pairs(manifest_, dir_.path(), dir_ / "cand", Split::kTest);
  EXPECT_EQ(train.n_images, 3u);
  EXPECT_EQ(test.n_images, 2u);
  EXPECT_NEAR(test.psnr_db,
    (oracles::psnr(cands_[3], gts_[3]) + oracles::psnr(cands_[4], gts_[4])) / 2.0, 1e-9);
}

TEST_F(EvaluatePairsTest, MissingCandidatesListed)
{
  fs::remove(dir_ / "cand" / "1001.pgm");
  fs::remove(dir_ / "cand" / "1004.pgm");
  try {
    evaluate_pairs(manifest_, dir_.path(), dir_ / "cand");
    FAIL();
  } catch (const MissingFilesError & e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("1001"), std::string::npos);
    EXPECT_NE(what.find("1004"), std::string::npos);
    EXPECT_EQ(what.find("1000"), std::string::npos);
  }
}

TEST_F(EvaluatePairsTest, EmptyManifest)
{
  EXPECT_THROW(evaluate_pairs(PairManifest{}, dir_.path(), dir_ / "cand"), EmptyInputError);
}

TEST(Report, TableLayout)
{
  MetricReport r;
  r.psnr_db = 28.6377;
  r.ssim = 0.0942;
  r.rmi = 0.0099;
  r.n_images = 1;
  const std::string table = report_to_table("Input Radar", r);
  EXPECT_NE(table.find("Data Type"), std::string::npos);
  EXPECT_NE(table.find("Input Radar"), std::string::npos);
  EXPECT_NE(table.find("28.6377"), std::string::npos);
  EXPECT_NE(table.find("0.0942"), std::string::npos);
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j.at("psnr_db").get<double>(), 28.6377);
}

}  // namespace
}  // namespace radar_enhance
