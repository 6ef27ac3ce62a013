#pragma once

#include "tubeparam/geometry.hpp"
#include "tubeparam/tube_param.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tubeparam {

enum class BendMode { major, minor };

BendMode bend_mode_from_string(const std::string& name);
std::string to_string(BendMode mode);

/// Radius from the dimensionless control: rho in (0, 1) for the major mode,
/// rho > 1 for the minor mode.
double admissible_radius(BendMode mode, double delta_z, double rho);

/// Strict no-overlap bound on R (upper for major, lower for minor).
double radius_bound(BendMode mode, double delta_z);
bool radius_admissible(BendMode mode, double delta_z, double R);

/// Continuous branch of 2 atan(k tan(a)), k = sqrt((R+1)/(R-1)).
template <typename Scalar>
Scalar half_angle_branch(Scalar a, Scalar R)
{
    using std::atan2;
    using std::cos;
    using std::round;
    using std::sin;
    using std::sqrt;
    const Scalar k = sqrt((R + Scalar(1)) / (R - Scalar(1)));
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar m = round(a / pi);
    const Scalar r = a - m * pi;
    return Scalar(2) * (atan2(k * sin(r), cos(r)) + m * pi);
}

/// Major mode angle; solves theta' = R + cos(theta), theta(0) = 0.
template <typename Scalar>
Scalar theta_major(Scalar z_hat, Scalar R)
{
    using std::sqrt;
    return half_angle_branch(sqrt(R * R - Scalar(1)) * z_hat / Scalar(2), R);
}

/// Minor mode angle; solves theta' = (R + cos(theta)) / sqrt(R^2 - 1).
template <typename Scalar>
Scalar theta_minor(Scalar u, Scalar R)
{
    return half_angle_branch(u / Scalar(2), R);
}

/// Smooth bending map of a tube point (u, z_hat).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> bend_point(BendMode mode, Scalar u, Scalar z_hat, Scalar R)
{
    using std::cos;
    using std::sin;
    using std::sqrt;
    Scalar theta, phi;
    if (mode == BendMode::major) {
        theta = theta_major(z_hat, R);
        phi = u;
    } else {
        theta = theta_minor(u, R);
        phi = z_hat / sqrt(R * R - Scalar(1));
    }
    const Scalar ring = R + cos(theta);
    return {ring * cos(phi), ring * sin(phi), sin(theta)};
}

/// Conformal factor lambda with pulled-back metric lambda^2 (du^2 + dz^2).
template <typename Scalar>
Scalar conformal_factor(BendMode mode, Scalar u, Scalar z_hat, Scalar R)
{
    using std::cos;
    using std::sqrt;
    if (mode == BendMode::major) {
        return R + cos(theta_major(z_hat, R));
    }
    return (R + cos(theta_minor(u, R))) / sqrt(R * R - Scalar(1));
}

struct BendResult
{
    Vertices positions;
    double R = 0.0;
    double delta_z = 0.0;
    /// Angular extent used along the non-periodic direction (theta for major,
    /// phi for minor); below 2 pi for admissible radii.
    double sweep = 0.0;
};

/// Bends tube coordinates with the given major radius. z is shifted so its
/// minimum is zero.
BendResult bend(BendMode mode, const TubeCoords& tube, double R);
BendResult bend_major(const TubeCoords& tube, double R);
BendResult bend_minor(const TubeCoords& tube, double R);

}  // namespace tubeparam
