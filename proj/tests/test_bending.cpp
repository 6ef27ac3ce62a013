#include "tubeparam/bending.hpp"
#include "tubeparam/synth.hpp"
#include "tubeparam/tube_param.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace tubeparam;

namespace {

constexpr double pi = std::numbers::pi;

/// Classical RK4 for theta' = scale * (R + cos theta), theta(0) = 0.
double rk4_theta(double t_end, double R, double scale, int steps = 20000)
{
    auto f = [&](double theta) { return scale * (R + std::cos(theta)); };
    const double h = t_end / steps;
    double theta = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(theta), k2 = f(theta + 0.5 * h * k1), k3 = f(theta + 0.5 * h * k2),
                     k4 = f(theta + h * k3);
        theta += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return theta;
}

TubeCoords grid_tube(int n_u, int n_z, double height)
{
    TubeCoords t;
    t.u.resize(n_u * n_z);
    t.z.resize(n_u * n_z);
    t.L_star = height;
    for (int j = 0; j < n_z; ++j) {
        for (int i = 0; i < n_u; ++i) {
            t.u[j * n_u + i] = two_pi<double> * i / n_u;
            t.z[j * n_u + i] = height * j / (n_z - 1);
        }
    }
    return t;
}

}  // namespace

TEST_SUITE("bending")
{
    TEST_CASE("radius bounds and parameterizations")
    {
        CHECK(radius_bound(BendMode::major, two_pi<double>) == doctest::Approx(std::sqrt(2.0)));
        CHECK(admissible_radius(BendMode::major, two_pi<double>, 0.5) == doctest::Approx(1.20711).epsilon(1e-5));
        CHECK(admissible_radius(BendMode::minor, two_pi<double>, 2.0) == doctest::Approx(2.0 * std::sqrt(2.0)));
        CHECK_THROWS(admissible_radius(BendMode::major, two_pi<double>, 1.0));
        CHECK_THROWS(admissible_radius(BendMode::major, two_pi<double>, 0.0));
        CHECK_THROWS(admissible_radius(BendMode::minor, two_pi<double>, 1.0));
        CHECK_FALSE(radius_admissible(BendMode::major, two_pi<double>, std::sqrt(2.0)));
        CHECK_FALSE(radius_admissible(BendMode::minor, 1.0, 1.0));
    }

    TEST_CASE("major mode starts on the outer equator")
    {
        const double R = 1.3;
        for (double u : {0.0, 1.0, 4.0}) {
            const Eigen::Vector3d p = bend_point(BendMode::major, u, 0.0, R);
            CHECK((p - Eigen::Vector3d((R + 1) * std::cos(u), (R + 1) * std::sin(u), 0.0)).norm() < 1e-15);
        }
    }

    TEST_CASE("minor mode: u = 0 outer, u = pi inner equator")
    {
        const double R = 3.0;
        for (double z : {0.0, 0.5, 2.0}) {
            const double phi = z / std::sqrt(R * R - 1);
            const Eigen::Vector3d outer = bend_point(BendMode::minor, 0.0, z, R);
            const Eigen::Vector3d inner = bend_point(BendMode::minor, pi, z, R);
            CHECK((outer - Eigen::Vector3d((R + 1) * std::cos(phi), (R + 1) * std::sin(phi), 0.0)).norm() < 1e-14);
            CHECK((inner - Eigen::Vector3d((R - 1) * std::cos(phi), (R - 1) * std::sin(phi), 0.0)).norm() < 1e-14);
            CHECK(theta_minor(pi, R) == doctest::Approx(pi));
        }
    }

    TEST_CASE("theta matches an RK4 integration of its ODE across branch poles")
    {
        for (double R : {1.05, 1.5, 3.0}) {
            const double period = two_pi<double> / std::sqrt(R * R - 1.0);
            for (double frac : {0.1, 0.45, 0.5, 0.55, 0.9, 0.999}) {
                const double z = frac * period;
                CHECK(theta_major(z, R) == doctest::Approx(rk4_theta(z, R, 1.0)).epsilon(1e-8));
            }
            for (double u : {0.3, pi - 1e-3, pi, pi + 1e-3, 6.0}) {
                CHECK(theta_minor(u, R) == doctest::Approx(rk4_theta(u, R, 1.0 / std::sqrt(R * R - 1.0))).epsilon(1e-8));
            }
        }
    }

    TEST_CASE("property: theta is continuous and strictly increasing")
    {
        for (double R : {1.01, 1.2, 2.0, 6.0}) {
            const double period = two_pi<double> / std::sqrt(R * R - 1.0);
            double prev_major = theta_major(0.0, R), prev_minor = theta_minor(0.0, R);
            const int n = 20000;
            for (int k = 1; k < n; ++k) {
                const double major = theta_major(period * k / n, R);
                const double minor = theta_minor(two_pi<double> * k / n, R);
                CHECK(major > prev_major);
                CHECK(minor > prev_minor);
                CHECK(major - prev_major < 0.1);
                CHECK(minor - prev_minor < 0.1);
                prev_major = major;
                prev_minor = minor;
            }
        }
    }

    TEST_CASE("smooth maps are conformal with the stated factor")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double delta_z = 2.5;
        for (BendMode mode : {BendMode::major, BendMode::minor}) {
            const std::vector<double> rhos = mode == BendMode::major ? std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.99}
                                                                      : std::vector<double>{1.01, 1.5, 2.0, 3.0, 5.0};
            for (double rho : rhos) {
                const double R = admissible_radius(mode, delta_z, rho);
                for (int k = 0; k < 100; ++k) {
                    const double u = two_pi<double> * unit(rng), z = delta_z * unit(rng);
                    const auto form = oracle::first_fundamental_form(mode, u, z, R);
                    CHECK(std::abs(form.E - form.G) / form.E < 1e-6);
                    CHECK(std::abs(form.F) / form.E < 1e-6);
                    CHECK(conformal_factor(mode, u, z, R) == doctest::Approx(std::sqrt(form.E)).epsilon(1e-6));
                }
            }
        }
    }

    TEST_CASE("quadrature identity")
    {
        for (double R : {1.1, 2.0, 5.0}) {
            const double numeric = oracle::periodic_quadrature([R](double t) { return 1.0 / (R + std::cos(t)); }, 4096);
            CHECK(std::abs(numeric - two_pi<double> / std::sqrt(R * R - 1.0)) <= 1e-8);
        }
        CHECK(two_pi<double> / std::sqrt(3.0) == doctest::Approx(3.6276).epsilon(1e-4));
    }

    TEST_CASE("bent vertices lie on the torus and sweep less than a full turn")
    {
        const TubeCoords tube = grid_tube(40, 20, 3.0);
        for (BendMode mode : {BendMode::major, BendMode::minor}) {
            for (double rho : mode == BendMode::major ? std::vector<double>{0.01, 0.5, 0.99}
                                                      : std::vector<double>{1.01, 2.0, 5.0}) {
                const double R = admissible_radius(mode, 3.0, rho);
                const BendResult b = bend(mode, tube, R);
                CHECK(b.sweep < two_pi<double>);
                CHECK(b.delta_z == doctest::Approx(3.0));
                for (Eigen::Index v = 0; v < b.positions.rows(); ++v) {
                    const double ring = std::hypot(b.positions(v, 0), b.positions(v, 1)) - R;
                    CHECK(std::abs(ring * ring + b.positions(v, 2) * b.positions(v, 2) - 1.0) <= 1e-10);
                }
            }
        }
    }

    TEST_CASE("z is normalized to start at zero")
    {
        TubeCoords tube = grid_tube(16, 6, 2.0);
        tube.z.array() += 5.0;
        const double R = admissible_radius(BendMode::major, 2.0, 0.5);
        const BendResult b = bend(BendMode::major, tube, R);
        CHECK(b.positions(0, 0) == doctest::Approx(R + 1.0));
    }

    TEST_CASE("inadmissible radius is rejected")
    {
        const TubeCoords tube = grid_tube(16, 6, 3.0);
        CHECK_THROWS(bend(BendMode::major, tube, radius_bound(BendMode::major, 3.0)));
        CHECK_THROWS(bend(BendMode::minor, tube, radius_bound(BendMode::minor, 3.0)));
        CHECK_THROWS(bend(BendMode::minor, tube, 0.5));
    }

    TEST_CASE("mode names")
    {
        CHECK(bend_mode_from_string("major") == BendMode::major);
        CHECK(to_string(BendMode::minor) == "minor");
        CHECK_THROWS(bend_mode_from_string("diagonal"));
    }
}
