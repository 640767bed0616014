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

#ifndef RADAR_ENHANCE__METRICS_HPP_
#define RADAR_ENHANCE__METRICS_HPP_

#include <filesystem>
#include <limits>
#include <optional>
#include <string>

#include "radar_enhance/image.hpp"
#include "radar_enhance/pairing.hpp"

namespace radar_enhance
{

/// Identifies the regional MI estimator so reports are only compared within
/// the same variant.
inline constexpr const char * kRmiVariant = "gaussian-logdet-v1";

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE) in dB; kPsnrInfinity for identical images.
double psnr(const GrayImage & a, const GrayImage & b);

struct SsimParams
{
  int window{11};
  double sigma{1.5};
  double k1{0.01};
  double k2{0.03};
  double dynamic_range{255.0};
};

/// Mean SSIM over all valid (unpadded) placements of a Gaussian window.
double ssim(const GrayImage & a, const GrayImage & b, const SsimParams & params = {});

/// Regional mutual information in nats.
///
/// Every pixel whose (2r+1)^2 neighbourhood fits inside the image contributes
/// one neighbourhood vector from each image (gray levels scaled to [0, 1]).
/// Under a Gaussian model
///
///   RMI = 1/2 [ log det(S_a + eps I) + log det(S_b + eps I) - log det(S_ab + eps I) ]
///
/// where S_a, S_b are the (biased) covariances of the vectors and S_ab the
/// covariance of the stacked vectors. Clamped at 0.
double rmi(const GrayImage & a, const GrayImage & b, int radius = 3, double epsilon = 1e-8);

struct MetricReport
{
  double psnr_db{0.0};  // mean over finite-PSNR pairs; +inf when none are finite
  double ssim{0.0};
  double rmi{0.0};
  std::size_t n_images{0};
  std::size_t psnr_infinite_count{0};
};

std::string report_to_json(const MetricReport & report);

/// Aligned "Data Type | PSNR | SSIM | RMI" table.
std::string report_to_table(const std::string & label, const MetricReport & report);

/// Averages per-pair metrics between each record's ground truth and the
/// candidate image with the same stem (.pgm or .png) in candidate_dir.
/// Throws MissingFilesError listing every missing candidate.
MetricReport evaluate_pairs(
  const PairManifest & manifest, const std::filesystem::path & manifest_dir,
  const std::filesystem::path & candidate_dir, std::optional<Split> split = std::nullopt);

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__METRICS_HPP_
