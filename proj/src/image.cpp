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

#include "radar_enhance/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "radar_enhance/errors.hpp"

namespace radar_enhance
{
namespace
{

std::string read_file_bytes(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestionError("cannot open " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct FileCloser
{
  void operator()(std::FILE * f) const
  {
    if (f) {
      std::fclose(f);
    }
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_pgm_token(const std::string & bytes, std::size_t & pos)
{
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') {
        ++pos;
      }
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    ++pos;
  }
  return bytes.substr(start, pos - start);
}

int parse_positive(const std::string & token, const char * what)
{
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) {
      throw std::invalid_argument(token);
    }
    return v;
  } catch (const std::logic_error &) {
    throw IngestionError(std::string("bad PGM ") + what + ": '" + token + "'");
  }
}

}  // namespace

void validate_grid(const BevGridSpec & grid)
{
  if (grid.width_px <= 0 || grid.width_px != grid.height_px) {
    throw InvalidSpecError("BEV grid must be square with positive size");
  }
  if (!std::isfinite(grid.span_m) || grid.span_m <= 0.0) {
    throw InvalidSpecError("BEV grid span must be positive");
  }
}

BevImage::BevImage(const BevGridSpec & spec, GrayImage data)
: grid(spec), pixels(std::move(data))
{
  if (pixels.rows() != spec.height_px || pixels.cols() != spec.width_px) {
    throw ShapeError(
            "image is " + std::to_string(pixels.rows()) + "x" + std::to_string(pixels.cols()) +
            ", grid expects " + std::to_string(spec.height_px) + "x" +
            std::to_string(spec.width_px));
  }
}

std::uint8_t to_gray(double value)
{
  const double scaled = std::round(255.0 * value);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

GrayImage quantize(const ImageXd & image)
{
  return image.unaryExpr([](double v) {
             return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
           });
}

std::string encode_pgm(const GrayImage & image)
{
  std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) +
    "\n255\n";
  out.append(reinterpret_cast<const char *>(image.data()), static_cast<std::size_t>(image.size()));
  return out;
}

void write_pgm(const std::filesystem::path & path, const GrayImage & image)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IngestionError("cannot write " + path.string());
  }
  const std::string bytes = encode_pgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GrayImage decode_pgm(const std::string & bytes)
{
  std::size_t pos = 0;
  if (next_pgm_token(bytes, pos) != "P5") {
    throw IngestionError("not a binary PGM (P5)");
  }
  const int cols = parse_positive(next_pgm_token(bytes, pos), "width");
  const int rows = parse_positive(next_pgm_token(bytes, pos), "height");
  const int maxval = parse_positive(next_pgm_token(bytes, pos), "maxval");
  if (maxval > 255) {
    throw IngestionError("only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() < pos + n) {
    throw IngestionError("truncated PGM payload");
  }
  GrayImage image(rows, cols);
  std::copy_n(reinterpret_cast<const std::uint8_t *>(bytes.data() + pos), n, image.data());
  if (maxval != 255) {
    image = image.unaryExpr([maxval](std::uint8_t v) {
          return static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
        });
  }
  return image;
}

GrayImage read_pgm(const std::filesystem::path & path)
{
  try {
    return decode_pgm(read_file_bytes(path));
  } catch (const IngestionError & e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path & path, const GrayImage & image)
{
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) {
    throw IngestionError("cannot write " + path.string());
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw IngestionError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IngestionError("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(
    png, info, static_cast<png_uint_32>(image.cols()), static_cast<png_uint_32>(image.rows()), 8,
    PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
    PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    png_write_row(png, const_cast<png_bytep>(image.data() + r * image.cols()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_png(const std::filesystem::path & path)
{
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) {
    throw IngestionError("cannot open " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IngestionError("libpng initialisation failed");
  }
  GrayImage image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IngestionError("libpng failed reading " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) {
    png_set_strip_16(png);
  }
  if (color == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  }
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) {
    png_set_strip_alpha(png);
  }
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
    color == PNG_COLOR_TYPE_PALETTE)
  {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);

  const auto rows = static_cast<Eigen::Index>(png_get_image_height(png, info));
  const auto cols = static_cast<Eigen::Index>(png_get_image_width(png, info));
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(cols)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IngestionError(path.string() + ": unsupported PNG layout");
  }
  image.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    png_read_row(png, image.data() + r * cols, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

GrayImage read_gray_image(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestionError("cannot open " + path.string());
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  const auto got = static_cast<std::size_t>(in.gcount());
  in.close();
  static const unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got == 8 && std::equal(magic, magic + 8, reinterpret_cast<const char *>(kPngSignature))) {
    return read_png(path);
  }
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') {
    return read_pgm(path);
  }
  throw IngestionError(path.string() + ": not a PGM (P5) or PNG image");
}

void write_gray_image(const std::filesystem::path & path, const GrayImage & image)
{
  std::string ext = path.extension().string();
  std::transform(
    ext.begin(), ext.end(), ext.begin(),
    [](unsigned char c) {return static_cast<char>(std::tolower(c));});
  if (ext == ".png") {
    write_png(path, image);
  } else {
    write_pgm(path, image);
  }
}

GrayImage resize_bilinear(const GrayImage & image, int rows, int cols)
{
  if (rows <= 0 || cols <= 0 || image.size() == 0) {
    throw ShapeError("resize_bilinear needs non-empty source and target sizes");
  }
  if (image.rows() == rows && image.cols() == cols) {
    return image;
  }
  const double sy = static_cast<double>(image.rows()) / rows;
  const double sx = static_cast<double>(image.cols()) / cols;
  const auto max_r = static_cast<double>(image.rows() - 1);
  const auto max_c = static_cast<double>(image.cols() - 1);

  ImageXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, max_r);
    const auto r0 = static_cast<Eigen::Index>(std::floor(fy));
    const Eigen::Index r1 = std::min<Eigen::Index>(r0 + 1, image.rows() - 1);
    const double wy = fy - static_cast<double>(r0);
    for (int c = 0; c < cols; ++c) {
      const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, max_c);
      const auto c0 = static_cast<Eigen::Index>(std::floor(fx));
      const Eigen::Index c1 = std::min<Eigen::Index>(c0 + 1, image.cols() - 1);
      const double wx = fx - static_cast<double>(c0);
      const double top = (1.0 - wx) * image(r0, c0) + wx * image(r0, c1);
      const double bottom = (1.0 - wx) * image(r1, c0) + wx * image(r1, c1);
      out(r, c) = (1.0 - wy) * top + wy * bottom;
    }
  }
  return quantize(out);
}

}  // namespace radar_enhance
