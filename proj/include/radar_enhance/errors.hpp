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

#ifndef RADAR_ENHANCE__ERRORS_HPP_
#define RADAR_ENHANCE__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radar_enhance
{

/// Base class of every error raised by the library. The CLI maps all of
/// these to the "data error" exit code.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define RADAR_ENHANCE_DEFINE_ERROR(NAME) \
  class NAME : public Error              \
  {                                      \
public:                                  \
    using Error::Error;                  \
  }

RADAR_ENHANCE_DEFINE_ERROR(InvalidPoseError);
RADAR_ENHANCE_DEFINE_ERROR(InvalidCloudError);
RADAR_ENHANCE_DEFINE_ERROR(InvalidSpecError);
RADAR_ENHANCE_DEFINE_ERROR(FrameMismatchError);
RADAR_ENHANCE_DEFINE_ERROR(EmptyInputError);
RADAR_ENHANCE_DEFINE_ERROR(BoundsError);
RADAR_ENHANCE_DEFINE_ERROR(ShapeError);
RADAR_ENHANCE_DEFINE_ERROR(TooSmallError);
RADAR_ENHANCE_DEFINE_ERROR(GapExceededError);
RADAR_ENHANCE_DEFINE_ERROR(IngestionError);
RADAR_ENHANCE_DEFINE_ERROR(PoseInsideObjectError);
RADAR_ENHANCE_DEFINE_ERROR(MissingFilesError);

#undef RADAR_ENHANCE_DEFINE_ERROR

/// Parse failure in a line-oriented file; `line()` is 1-based.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string & what)
  : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const {return line_;}

private:
  std::size_t line_;
};

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__ERRORS_HPP_
