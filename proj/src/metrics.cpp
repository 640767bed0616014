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

#include "radar_enhance/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "radar_enhance/errors.hpp"

namespace radar_enhance
{
namespace
{

constexpr int kRmiDefaultRadius = 3;
constexpr double kRmiDefaultEpsilon = 1e-8;
constexpr Eigen::Index kRmiChunkRows = 4096;

void require_same_shape(const GrayImage & a, const GrayImage & b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(
            "image shapes differ: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
            " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Eigen::VectorXd gaussian_kernel(int size, double sigma)
{
  Eigen::VectorXd g(size);
  const double center = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    g(i) = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  return g / g.sum();
}

// Separable correlation keeping only placements fully inside the image.
ImageXd filter_valid(const ImageXd & x, const Eigen::VectorXd & g)
{
  const Eigen::Index w = g.size();
  const Eigen::Index out_rows = x.rows() - w + 1;
  const Eigen::Index out_cols = x.cols() - w + 1;
  ImageXd horizontal = ImageXd::Zero(x.rows(), out_cols);
  for (Eigen::Index k = 0; k < w; ++k) {
    horizontal += g(k) * x.middleCols(k, out_cols);
  }
  ImageXd out = ImageXd::Zero(out_rows, out_cols);
  for (Eigen::Index k = 0; k < w; ++k) {
    out += g(k) * horizontal.middleRows(k, out_rows);
  }
  return out;
}

double log_det_spd(const Eigen::MatrixXd & m)
{
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }
  // Rounding can leave a regularized covariance marginally indefinite.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double floor = std::numeric_limits<double>::min();
  return eig.eigenvalues().array().max(floor).log().sum();
}

std::filesystem::path find_candidate(
  const std::filesystem::path & candidate_dir, const std::string & stem)
{
  for (const char * ext : {".pgm", ".png", ".PGM", ".PNG"}) {
    const auto p = candidate_dir / (stem + ext);
    if (std::filesystem::is_regular_file(p)) {
      return p;
    }
  }
  return {};
}

}  // namespace

double psnr(const GrayImage & a, const GrayImage & b)
{
  require_same_shape(a, b);
  if (a.size() == 0) {
    throw ShapeError("psnr of empty images");
  }
  const double mse =
    (a.cast<double>() - b.cast<double>()).array().square().sum() / static_cast<double>(a.size());
  if (mse == 0.0) {
    return kPsnrInfinity;
  }
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const GrayImage & a, const GrayImage & b, const SsimParams & params)
{
  require_same_shape(a, b);
  if (a.rows() < params.window || a.cols() < params.window) {
    throw TooSmallError(
            "ssim needs images of at least " + std::to_string(params.window) + " px per side");
  }
  const Eigen::VectorXd g = gaussian_kernel(params.window, params.sigma);
  const ImageXd x = a.cast<double>();
  const ImageXd y = b.cast<double>();

  const ImageXd mu_x = filter_valid(x, g);
  const ImageXd mu_y = filter_valid(y, g);
  const ImageXd xx = filter_valid(x.cwiseProduct(x), g);
  const ImageXd yy = filter_valid(y.cwiseProduct(y), g);
  const ImageXd xy = filter_valid(x.cwiseProduct(y), g);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);

  const auto mx = mu_x.array();
  const auto my = mu_y.array();
  const auto var_x = xx.array() - mx.square();
  const auto var_y = yy.array() - my.square();
  const auto cov = xy.array() - mx * my;
  const auto map = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
    ((mx.square() + my.square() + c1) * (var_x + var_y + c2));
  return map.mean();
}

double rmi(const GrayImage & a, const GrayImage & b, int radius, double epsilon)
{
  require_same_shape(a, b);
  if (radius < 0) {
    throw InvalidSpecError("rmi radius must be non-negative");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidSpecError("rmi epsilon must be positive");
  }
  const Eigen::Index side = 2 * radius + 1;
  const Eigen::Index valid_rows = a.rows() - side + 1;
  const Eigen::Index valid_cols = a.cols() - side + 1;
  if (valid_rows <= 0 || valid_cols <= 0) {
    throw TooSmallError("image smaller than the rmi neighbourhood");
  }
  const Eigen::Index d = side * side;
  const Eigen::Index n = valid_rows * valid_cols;

  const ImageXd x = a.cast<double>() / 255.0;
  const ImageXd y = b.cast<double>() / 255.0;

  // Column k of the sample matrix is the image shifted by offset k.
  Eigen::VectorXd mean(2 * d);
  for (Eigen::Index dy = 0; dy < side; ++dy) {
    for (Eigen::Index dx = 0; dx < side; ++dx) {
      const Eigen::Index k = dy * side + dx;
      mean(k) = x.block(dy, dx, valid_rows, valid_cols).mean();
      mean(d + k) = y.block(dy, dx, valid_rows, valid_cols).mean();
    }
  }

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  Eigen::MatrixXd chunk(std::min(kRmiChunkRows, n), 2 * d);
  Eigen::Index filled = 0;
  auto flush = [&]() {
      if (filled > 0) {
        scatter.selfadjointView<Eigen::Lower>().rankUpdate(chunk.topRows(filled).transpose());
        filled = 0;
      }
    };
  for (Eigen::Index r = 0; r < valid_rows; ++r) {
    for (Eigen::Index c = 0; c < valid_cols; ++c) {
      for (Eigen::Index dy = 0; dy < side; ++dy) {
        for (Eigen::Index dx = 0; dx < side; ++dx) {
          const Eigen::Index k = dy * side + dx;
          chunk(filled, k) = x(r + dy, c + dx) - mean(k);
          chunk(filled, d + k) = y(r + dy, c + dx) - mean(d + k);
        }
      }
      if (++filled == chunk.rows()) {
        flush();
      }
    }
  }
  flush();

  Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n);
  cov.diagonal().array() += epsilon;

  const double log_det_a = log_det_spd(cov.topLeftCorner(d, d));
  const double log_det_b = log_det_spd(cov.bottomRightCorner(d, d));
  const double log_det_ab = log_det_spd(cov);
  return std::max(0.0, 0.5 * (log_det_a + log_det_b - log_det_ab));
}

std::string report_to_json(const MetricReport & report)
{
  nlohmann::ordered_json j;
  if (std::isinf(report.psnr_db)) {
    j["psnr_db"] = "inf";
  } else {
    j["psnr_db"] = report.psnr_db;
  }
  j["ssim"] = report.ssim;
  j["rmi"] = report.rmi;
  j["n_images"] = report.n_images;
  j["psnr_infinite_count"] = report.psnr_infinite_count;
  j["rmi_variant"] = kRmiVariant;
  j["rmi_radius"] = kRmiDefaultRadius;
  j["rmi_epsilon"] = kRmiDefaultEpsilon;
  return j.dump();
}

std::string report_to_table(const std::string & label, const MetricReport & report)
{
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-24s | %10s | %8s | %8s\n", "Data Type", "PSNR", "SSIM", "RMI");
  out += buf;
  out += std::string(24, '-') + "-+-" + std::string(10, '-') + "-+-" + std::string(8, '-') +
    "-+-" + std::string(8, '-') + "\n";
  char psnr_text[32];
  if (std::isinf(report.psnr_db)) {
    std::snprintf(psnr_text, sizeof(psnr_text), "inf");
  } else {
    std::snprintf(psnr_text, sizeof(psnr_text), "%.4f", report.psnr_db);
  }
  std::snprintf(
    buf, sizeof(buf), "%-24s | %10s | %8.4f | %8.4f\n", label.c_str(), psnr_text, report.ssim,
    report.rmi);
  out += buf;
  return out;
}

MetricReport evaluate_pairs(
  const PairManifest & manifest, const std::filesystem::path & manifest_dir,
  const std::filesystem::path & candidate_dir, std::optional<Split> split)
{
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> jobs;
  std::vector<std::string> missing;
  for (const auto & r : manifest.records) {
    if (split && r.split != *split) {
      continue;
    }
    const auto gt = resolve_manifest_path(manifest_dir, r.gt_path);
    const std::string stem = gt.stem().string();
    const auto candidate = find_candidate(candidate_dir, stem);
    if (candidate.empty()) {
      missing.push_back(stem);
    } else {
      jobs.emplace_back(gt, candidate);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing candidate images in " + candidate_dir.string() + ":";
    for (const auto & m : missing) {
      msg += " " + m;
    }
    throw MissingFilesError(msg);
  }
  if (jobs.empty()) {
    throw EmptyInputError("no manifest records to evaluate");
  }

  std::vector<double> psnrs(jobs.size());
  std::vector<double> ssims(jobs.size());
  std::vector<double> rmis(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const GrayImage gt = read_gray_image(jobs[i].first);
    const GrayImage candidate = read_gray_image(jobs[i].second);
    require_same_shape(gt, candidate);
    psnrs[i] = psnr(candidate, gt);
    ssims[i] = ssim(candidate, gt);
    rmis[i] = rmi(candidate, gt);
  }

  // Sums run in index order so the report is independent of scheduling.
  MetricReport report;
  report.n_images = jobs.size();
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  double rmi_sum = 0.0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (std::isinf(psnrs[i])) {
      ++report.psnr_infinite_count;
    } else {
      psnr_sum += psnrs[i];
      ++finite;
    }
    ssim_sum += ssims[i];
    rmi_sum += rmis[i];
  }
  report.psnr_db = finite > 0 ? psnr_sum / static_cast<double>(finite) : kPsnrInfinity;
  report.ssim = ssim_sum / static_cast<double>(jobs.size());
  report.rmi = rmi_sum / static_cast<double>(jobs.size());
  return report;
}

}  // namespace radar_enhance
