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

#ifndef RADAR_ENHANCE__GEOMETRY_HPP_
#define RADAR_ENHANCE__GEOMETRY_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>

#include "radar_enhance/errors.hpp"

namespace radar_enhance
{

/// Timestamped 6-DoF pose. Angles in radians, translation in meters.
struct Pose
{
  std::int64_t timestamp_ns{0};
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double roll{0.0};
  double pitch{0.0};
  double yaw{0.0};

  bool operator==(const Pose &) const = default;
};

/// Homogeneous 4x4 rigid transform; the last row is always (0, 0, 0, 1).
template<typename Scalar>
using AffineMatrix = Eigen::Matrix<Scalar, 4, 4>;

using AffineMatrix4d = AffineMatrix<double>;
using Vector3d = Eigen::Vector3d;

/// Throws InvalidPoseError unless every field is finite and the timestamp is
/// non-negative.
void validate_pose(const Pose & pose);

/// Rotation R = Rz(yaw) * Ry(pitch) * Rx(roll).
template<typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> rotation_from_rpy(Scalar roll, Scalar pitch, Scalar yaw)
{
  using Eigen::AngleAxis;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  return (AngleAxis<Scalar>(yaw, Vec3::UnitZ()) *
         AngleAxis<Scalar>(pitch, Vec3::UnitY()) *
         AngleAxis<Scalar>(roll, Vec3::UnitX())).toRotationMatrix();
}

/// Maps points from the pose's local frame into the global frame.
template<typename Scalar = double>
AffineMatrix<Scalar> pose_to_matrix(const Pose & pose)
{
  validate_pose(pose);
  AffineMatrix<Scalar> m = AffineMatrix<Scalar>::Identity();
  m.template topLeftCorner<3, 3>() = rotation_from_rpy<Scalar>(
    static_cast<Scalar>(pose.roll), static_cast<Scalar>(pose.pitch),
    static_cast<Scalar>(pose.yaw));
  m.template topRightCorner<3, 1>() << static_cast<Scalar>(pose.x),
    static_cast<Scalar>(pose.y), static_cast<Scalar>(pose.z);
  return m;
}

/// Applies `b` first, then `a`.
template<typename DerivedA, typename DerivedB>
auto compose(const Eigen::MatrixBase<DerivedA> & a, const Eigen::MatrixBase<DerivedB> & b)
{
  using Scalar = typename DerivedA::Scalar;
  AffineMatrix<Scalar> out = AffineMatrix<Scalar>::Identity();
  out.template topLeftCorner<3, 3>().noalias() =
    a.template topLeftCorner<3, 3>() * b.template topLeftCorner<3, 3>();
  out.template topRightCorner<3, 1>() =
    a.template topLeftCorner<3, 3>() * b.template topRightCorner<3, 1>() +
    a.template topRightCorner<3, 1>();
  return out;
}

/// Rigid inverse (R^T, -R^T t). Never falls back to general inversion.
template<typename Derived>
auto inverse(const Eigen::MatrixBase<Derived> & m)
{
  using Scalar = typename Derived::Scalar;
  AffineMatrix<Scalar> out = AffineMatrix<Scalar>::Identity();
  out.template topLeftCorner<3, 3>() = m.template topLeftCorner<3, 3>().transpose();
  out.template topRightCorner<3, 1>() =
    -(m.template topLeftCorner<3, 3>().transpose() * m.template topRightCorner<3, 1>());
  return out;
}

template<typename DerivedM, typename DerivedP>
auto transform_point(
  const Eigen::MatrixBase<DerivedM> & m, const Eigen::MatrixBase<DerivedP> & p)
{
  using Scalar = typename DerivedM::Scalar;
  Eigen::Matrix<Scalar, 3, 1> out =
    m.template topLeftCorner<3, 3>() * p + m.template topRightCorner<3, 1>();
  return out;
}

/// True when the upper-left block is orthonormal with det 1 and the last row
/// is exactly (0, 0, 0, 1).
template<typename Derived>
bool is_rigid(const Eigen::MatrixBase<Derived> & m, double tol = 1e-9)
{
  using Scalar = typename Derived::Scalar;
  if (m(3, 0) != Scalar(0) || m(3, 1) != Scalar(0) || m(3, 2) != Scalar(0) ||
    m(3, 3) != Scalar(1))
  {
    return false;
  }
  const auto r = m.template topLeftCorner<3, 3>();
  const auto gram = (r.transpose() * r).eval();
  const auto err = (gram - Eigen::Matrix<Scalar, 3, 3>::Identity()).cwiseAbs().maxCoeff();
  return static_cast<double>(err) <= tol &&
         std::abs(static_cast<double>(r.determinant()) - 1.0) <= tol;
}

}  // namespace radar_enhance

#endif  // RADAR_ENHANCE__GEOMETRY_HPP_
