#include "tubeparam/bending.hpp"

#include <stdexcept>

namespace tubeparam {

BendMode bend_mode_from_string(const std::string& name)
{
    if (name == "major") {
        return BendMode::major;
    }
    if (name == "minor") {
        return BendMode::minor;
    }
    throw std::invalid_argument("unknown bend mode '" + name + "' (expected major or minor)");
}

std::string to_string(BendMode mode)
{
    return mode == BendMode::major ? "major" : "minor";
}

double radius_bound(BendMode mode, double delta_z)
{
    if (!(delta_z > 0.0) || !std::isfinite(delta_z)) {
        throw std::invalid_argument("bending: axial extent must be positive");
    }
    if (mode == BendMode::major) {
        const double ratio = two_pi<double> / delta_z;
        return std::sqrt(1.0 + ratio * ratio);
    }
    const double ratio = delta_z / two_pi<double>;
    return std::sqrt(1.0 + ratio * ratio);
}

bool radius_admissible(BendMode mode, double delta_z, double R)
{
    if (!(R > 1.0)) {
        return false;
    }
    const double bound = radius_bound(mode, delta_z);
    return mode == BendMode::major ? R < bound : R > bound;
}

double admissible_radius(BendMode mode, double delta_z, double rho)
{
    const double bound = radius_bound(mode, delta_z);
    double R = 0.0;
    if (mode == BendMode::major) {
        if (!(rho > 0.0 && rho < 1.0)) {
            throw std::invalid_argument("major bending needs rho in (0, 1), got " + std::to_string(rho));
        }
        R = 1.0 + rho * (bound - 1.0);
    } else {
        if (!(rho > 1.0) || !std::isfinite(rho)) {
            throw std::invalid_argument("minor bending needs rho > 1, got " + std::to_string(rho));
        }
        R = rho * bound;
    }
    if (!radius_admissible(mode, delta_z, R)) {
        throw std::invalid_argument("bending: radius " + std::to_string(R) + " is not admissible");
    }
    return R;
}

BendResult bend(BendMode mode, const TubeCoords& tube, double R)
{
    if (tube.size() == 0) {
        throw std::invalid_argument("bending: empty tube coordinates");
    }
    const double z_min = tube.z.minCoeff();
    BendResult result;
    result.R = R;
    result.delta_z = tube.z.maxCoeff() - z_min;
    if (!radius_admissible(mode, result.delta_z, R)) {
        throw std::invalid_argument("bending: radius " + std::to_string(R) + " is not admissible for the "
                                    + to_string(mode) + " mode (axial extent "
                                    + std::to_string(result.delta_z) + ")");
    }
    result.sweep = mode == BendMode::major ? theta_major(result.delta_z, R)
                                           : result.delta_z / std::sqrt(R * R - 1.0);
    if (!(result.sweep < two_pi<double>)) {
        throw std::logic_error("bending: sweep reaches 2 pi for an admissible radius");
    }
    result.positions.resize(tube.size(), 3);
    for (int v = 0; v < tube.size(); ++v) {
        result.positions.row(v) = bend_point<double>(mode, tube.u[v], tube.z[v] - z_min, R).transpose();
    }
    return result;
}

BendResult bend_major(const TubeCoords& tube, double R)
{
    return bend(BendMode::major, tube, R);
}

BendResult bend_minor(const TubeCoords& tube, double R)
{
    return bend(BendMode::minor, tube, R);
}

}  // namespace tubeparam
