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

#ifndef RADAR_ENHANCE__CLI_HPP_
#define RADAR_ENHANCE__CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "radar_enhance/augment.hpp"

namespace radar_enhance::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Settings shared by every subcommand. Loaded from a JSON config file, then
/// overridden by flags.
struct RunConfig
{
  std::filesystem::path dataset_root;
  double grid_span{200.0};
  double voxel_leaf{0.8};
  double crop_half{100.0};
  double max_gap_ms{500.0};
  std::uint64_t seed{0};
  double train_fraction{0.8};
  AugmentConfig augment;
};

RunConfig parse_run_config(const std::string & json_text);

/// Entry point for the `radar_enhance` executable. Machine-readable JSON goes
/// to `out`, human-readable tables and warnings to `err`. Returns 0 on
/// success, 1 on usage errors and 2 on data errors.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace radar_enhance::cli

#endif  // RADAR_ENHANCE__CLI_HPP_
