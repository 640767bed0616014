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

#include "radar_enhance/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "radar_enhance/errors.hpp"

namespace radar_enhance
{
namespace
{

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template<typename T>
bool parse_number(std::string_view s, T & out)
{
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void put_u32(std::string & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

void put_u64(std::string & out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

std::uint64_t get_le(const std::string & bytes, std::size_t offset, int width)
{
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::vector<Pose> parse_pose_csv(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Pose> poses;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) {
      continue;
    }
    if (!saw_header) {
      if (row != kPoseCsvHeader) {
        throw ParseError(line_no, std::string("expected header '") + kPoseCsvHeader + "'");
      }
      saw_header = true;
      continue;
    }
    std::array<std::string_view, 7> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      if (n == fields.size()) {
        throw ParseError(line_no, "too many fields");
      }
      fields[n++] = row.substr(start, comma == std::string_view::npos ? row.npos : comma - start);
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (n != fields.size()) {
      throw ParseError(line_no, "expected 7 fields, got " + std::to_string(n));
    }
    Pose p;
    double * targets[] = {&p.x, &p.y, &p.z, &p.roll, &p.pitch, &p.yaw};
    if (!parse_number(fields[0], p.timestamp_ns)) {
      throw ParseError(line_no, "bad timestamp '" + std::string(fields[0]) + "'");
    }
    for (std::size_t i = 0; i < 6; ++i) {
      if (!parse_number(fields[i + 1], *targets[i])) {
        throw ParseError(line_no, "bad number '" + std::string(fields[i + 1]) + "'");
      }
    }
    try {
      validate_pose(p);
    } catch (const InvalidPoseError & e) {
      throw ParseError(line_no, e.what());
    }
    poses.push_back(p);
  }
  if (!saw_header) {
    throw ParseError(1, "empty pose file");
  }
  return poses;
}

std::vector<Pose> read_pose_csv(const std::filesystem::path & path)
{
  try {
    return parse_pose_csv(read_file(path));
  } catch (const ParseError & e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string format_pose_csv(const std::vector<Pose> & poses)
{
  std::string out = std::string(kPoseCsvHeader) + "\n";
  char buf[256];
  for (const auto & p : poses) {
    std::snprintf(
      buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
      static_cast<long long>(p.timestamp_ns), p.x, p.y, p.z, p.roll, p.pitch, p.yaw);
    out += buf;
  }
  return out;
}

void write_pose_csv(const std::filesystem::path & path, const std::vector<Pose> & poses)
{
  write_file_atomic(path, format_pose_csv(poses));
}

PointCloud decode_pcbf(const std::string & bytes, const std::string & frame_id)
{
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader || bytes.compare(0, 4, "PCBF") != 0) {
    throw IngestionError("missing PCBF magic");
  }
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kPcbfVersion) {
    throw IngestionError("unsupported PCBF version " + std::to_string(version));
  }
  const std::uint64_t count = get_le(bytes, 8, 8);
  if ((bytes.size() - kHeader) / 16 < count || bytes.size() != kHeader + count * 16) {
    throw IngestionError(
            "PCBF payload size does not match count " + std::to_string(count));
  }

  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.points.resize(count);
  double lo = 0.0;
  double hi = 1.0;
  bool out_of_range = false;
  for (std::uint64_t i = 0; i < count; ++i) {
    float v[4];
    for (int k = 0; k < 4; ++k) {
      v[k] = std::bit_cast<float>(
        static_cast<std::uint32_t>(get_le(bytes, kHeader + i * 16 + 4 * k, 4)));
      if (!std::isfinite(v[k])) {
        throw IngestionError("point " + std::to_string(i) + " has a non-finite field");
      }
    }
    cloud.points[i] = CloudPoint{Vector3d(v[0], v[1], v[2]), v[3]};
    if (v[3] < 0.0f || v[3] > 1.0f) {
      out_of_range = true;
    }
  }
  if (out_of_range) {
    lo = hi = cloud.points.front().intensity;
    for (const auto & p : cloud.points) {
      lo = std::min(lo, p.intensity);
      hi = std::max(hi, p.intensity);
    }
    for (auto & p : cloud.points) {
      p.intensity = hi > lo ? std::clamp((p.intensity - lo) / (hi - lo), 0.0, 1.0) : 1.0;
    }
  }
  return cloud;
}

PointCloud read_pcbf(const std::filesystem::path & path, const std::string & frame_id)
{
  try {
    return decode_pcbf(read_file(path), frame_id);
  } catch (const IngestionError & e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

std::string encode_pcbf(const PointCloud & cloud)
{
  std::string out;
  out.reserve(16 + cloud.size() * 16);
  out += "PCBF";
  put_u32(out, kPcbfVersion);
  put_u64(out, cloud.size());
  for (const auto & p : cloud.points) {
    const float v[4] = {
      static_cast<float>(p.position.x()), static_cast<float>(p.position.y()),
      static_cast<float>(p.position.z()), static_cast<float>(p.intensity)};
    for (float f : v) {
      put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  return out;
}

void write_pcbf(const std::filesystem::path & path, const PointCloud & cloud)
{
  write_file_atomic(path, encode_pcbf(cloud));
}

std::optional<std::int64_t> timestamp_from_stem(const std::filesystem::path & path)
{
  const std::string stem = path.stem().string();
  std::int64_t ts = 0;
  if (stem.empty() || !parse_number(stem, ts) || ts < 0) {
    return std::nullopt;
  }
  return ts;
}

std::vector<TimestampedFile> list_timestamped_files(
  const std::filesystem::path & dir, const std::vector<std::string> & extensions,
  std::vector<std::filesystem::path> * ignored)
{
  namespace fs = std::filesystem;
  std::vector<TimestampedFile> files;
  if (!fs::is_directory(dir)) {
    throw IngestionError("not a directory: " + dir.string());
  }
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    std::string ext = entry.path().extension().string();
    std::transform(
      ext.begin(), ext.end(), ext.begin(),
      [](unsigned char c) {return static_cast<char>(std::tolower(c));});
    if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) {
      continue;
    }
    if (const auto ts = timestamp_from_stem(entry.path())) {
      files.push_back(TimestampedFile{entry.path(), *ts});
    } else if (ignored) {
      ignored->push_back(entry.path());
    }
  }
  std::sort(
    files.begin(), files.end(), [](const TimestampedFile & a, const TimestampedFile & b) {
      return a.timestamp_ns != b.timestamp_ns ? a.timestamp_ns < b.timestamp_ns : a.path < b.path;
    });
  return files;
}

void write_file_atomic(const std::filesystem::path & path, const std::string & bytes)
{
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IngestionError("cannot write " + tmp.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw IngestionError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestionError("cannot open " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace radar_enhance
