#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace tubeparam {

template <typename Scalar>
constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

template <typename Scalar>
Scalar triangle_area(const Eigen::Matrix<Scalar, 3, 1>& a, const Eigen::Matrix<Scalar, 3, 1>& b,
                     const Eigen::Matrix<Scalar, 3, 1>& c)
{
    return Scalar(0.5) * (b - a).cross(c - a).norm();
}

/// Signed area of a planar triangle (positive when counterclockwise).
template <typename Scalar>
Scalar signed_area(const Eigen::Matrix<Scalar, 2, 1>& a, const Eigen::Matrix<Scalar, 2, 1>& b,
                   const Eigen::Matrix<Scalar, 2, 1>& c)
{
    const Eigen::Matrix<Scalar, 2, 1> e1 = b - a;
    const Eigen::Matrix<Scalar, 2, 1> e2 = c - a;
    return Scalar(0.5) * (e1.x() * e2.y() - e1.y() * e2.x());
}

/// Cotangent of the angle at `o` in triangle (o, i, j).
template <typename Scalar, int Dim>
Scalar corner_cotangent(const Eigen::Matrix<Scalar, Dim, 1>& o, const Eigen::Matrix<Scalar, Dim, 1>& i,
                        const Eigen::Matrix<Scalar, Dim, 1>& j)
{
    const Eigen::Matrix<Scalar, Dim, 1> a = i - o;
    const Eigen::Matrix<Scalar, Dim, 1> b = j - o;
    if constexpr (Dim == 2) {
        return a.dot(b) / std::abs(a.x() * b.y() - a.y() * b.x());
    } else {
        return a.dot(b) / a.cross(b).norm();
    }
}

/// Interior angle at `o` in triangle (o, i, j), in radians.
template <typename Derived>
typename Derived::Scalar corner_angle(const Eigen::MatrixBase<Derived>& o, const Eigen::MatrixBase<Derived>& i,
                                      const Eigen::MatrixBase<Derived>& j)
{
    using Scalar = typename Derived::Scalar;
    const auto a = (i - o).eval();
    const auto b = (j - o).eval();
    Scalar cross_norm;
    if constexpr (Derived::RowsAtCompileTime == 2) {
        cross_norm = std::abs(a.x() * b.y() - a.y() * b.x());
    } else {
        cross_norm = a.cross(b).norm();
    }
    return std::atan2(cross_norm, a.dot(b));
}

/// Isometric flattening of a 3D triangle: first vertex at the origin,
/// second on the positive x axis, third in the upper half plane.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 2> flatten_triangle(const Eigen::Matrix<Scalar, 3, 1>& a, const Eigen::Matrix<Scalar, 3, 1>& b,
                                             const Eigen::Matrix<Scalar, 3, 1>& c)
{
    const Eigen::Matrix<Scalar, 3, 1> e1 = b - a;
    const Eigen::Matrix<Scalar, 3, 1> e2 = c - a;
    const Scalar l1 = e1.norm();
    const Scalar x2 = e1.dot(e2) / l1;
    const Scalar y2 = e1.cross(e2).norm() / l1;
    Eigen::Matrix<Scalar, 3, 2> frame;
    frame << Scalar(0), Scalar(0), l1, Scalar(0), x2, y2;
    return frame;
}

/// Wrap an angle into [0, 2 pi).
template <typename Scalar>
Scalar wrap_two_pi(Scalar angle)
{
    Scalar r = std::fmod(angle, two_pi<Scalar>);
    if (r < Scalar(0)) {
        r += two_pi<Scalar>;
    }
    if (r >= two_pi<Scalar>) {
        r = Scalar(0);
    }
    return r;
}

}  // namespace tubeparam
