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

#include "radar_enhance/geometry.hpp"

#include <string>

namespace radar_enhance
{

void validate_pose(const Pose & pose)
{
  const double fields[] = {pose.x, pose.y, pose.z, pose.roll, pose.pitch, pose.yaw};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      throw InvalidPoseError(
              "pose at t=" + std::to_string(pose.timestamp_ns) + " has a non-finite field");
    }
  }
  if (pose.timestamp_ns < 0) {
    throw InvalidPoseError("pose timestamp is negative: " + std::to_string(pose.timestamp_ns));
  }
}

}  // namespace radar_enhance
