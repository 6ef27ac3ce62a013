#pragma once

#include "tubeparam/linear_solve.hpp"
#include "tubeparam/mesh.hpp"

#include <array>
#include <complex>
#include <limits>
#include <vector>

namespace tubeparam {

/// Per-face triangle in local 2D coordinates (one row per corner).
template <typename Scalar>
using FaceFrame = Eigen::Matrix<Scalar, 3, 2>;
using FaceFrames = std::vector<FaceFrame<double>>;

/// Per-face complex Beltrami coefficient of a piecewise-affine map.
struct BeltramiField
{
    Eigen::VectorXcd mu;
    /// Faces whose image is degenerate (f_z = 0); their mu is infinite.
    int degenerate_faces = 0;

    int size() const { return static_cast<int>(mu.size()); }
    /// True when every face satisfies |mu| < 1.
    bool admissible() const;
};

/// Isometric per-face flattening of a surface.
FaceFrames face_flatten(const TriMesh& mesh);

/// Per-face frames read from a planar embedding.
FaceFrames embedding_frames(const Faces& faces, const PlanarEmbedding& uv);

/// Jacobian of the affine map taking the source triangle onto the image triangle.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> affine_jacobian(const FaceFrame<Scalar>& source, const FaceFrame<Scalar>& image)
{
    Eigen::Matrix<Scalar, 2, 2> S, T;
    S.col(0) = (source.row(1) - source.row(0)).transpose();
    S.col(1) = (source.row(2) - source.row(0)).transpose();
    T.col(0) = (image.row(1) - image.row(0)).transpose();
    T.col(1) = (image.row(2) - image.row(0)).transpose();
    return T * S.inverse();
}

/// Complex derivatives (f_z, f_zbar) of an affine map with Jacobian
/// [[u_x, u_y], [v_x, v_y]].
template <typename Scalar>
std::array<std::complex<Scalar>, 2> complex_derivatives(const Eigen::Matrix<Scalar, 2, 2>& J)
{
    const Scalar ux = J(0, 0), uy = J(0, 1), vx = J(1, 0), vy = J(1, 1);
    return {std::complex<Scalar>((ux + vy) / 2, (vx - uy) / 2),
            std::complex<Scalar>((ux - vy) / 2, (vx + uy) / 2)};
}

/// mu = f_zbar / f_z, or infinity when f_z vanishes.
template <typename Scalar>
std::complex<Scalar> affine_beltrami(const Eigen::Matrix<Scalar, 2, 2>& J)
{
    const auto [fz, fzbar] = complex_derivatives(J);
    if (std::abs(fz) <= std::numeric_limits<Scalar>::min()) {
        return {std::numeric_limits<Scalar>::infinity(), Scalar(0)};
    }
    return fzbar / fz;
}

/// Coefficient matrix [[a1, a2], [a2, a3]] of the elliptic Beltrami system.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> beltrami_alpha_matrix(std::complex<Scalar> mu)
{
    const Scalar re = mu.real(), im = mu.imag();
    const Scalar denom = Scalar(1) - std::norm(mu);
    Eigen::Matrix<Scalar, 2, 2> A;
    A(0, 0) = ((re - 1) * (re - 1) + im * im) / denom;
    A(0, 1) = A(1, 0) = -Scalar(2) * im / denom;
    A(1, 1) = ((re + 1) * (re + 1) + im * im) / denom;
    return A;
}

BeltramiField beltrami_coefficient(const FaceFrames& source, const FaceFrames& image);
BeltramiField beltrami_coefficient(const FaceFrames& source, const Faces& faces, const PlanarEmbedding& image);

struct LbsOptions
{
    /// Error instead of clamping when |mu| >= 1 - 1e-8.
    bool strict = false;
};

inline constexpr double kMuBound = 1.0 - 1e-8;

/// Generalized stiffness K_ij = sum_T area_T grad(phi_i)^T A(mu_T) grad(phi_j)
/// assembled in the source frames. `clamped` counts faces whose mu was
/// pulled back inside the admissible disk.
SparseMatrix lbs_stiffness(const FaceFrames& frames, const Faces& faces, int num_vertices,
                           const BeltramiField& mu, const LbsOptions& options = {}, int* clamped = nullptr);

struct LbsSolution
{
    PlanarEmbedding map;
    int clamped_faces = 0;
};

/// Linear Beltrami Solver: a planar map whose Beltrami coefficient in the
/// source frames is `mu`, subject to per-coordinate constraints.
LbsSolution lbs_solve(const FaceFrames& frames, const Faces& faces, int num_vertices, const BeltramiField& mu,
                      const std::array<LinearConstraintSet, 2>& constraints, const LbsOptions& options = {});

/// Beltrami coefficient of g o f from mu_f, the phase conj(f_z)/f_z and mu_g at f.
std::complex<double> compose_beltrami(std::complex<double> mu_f, std::complex<double> fz_phase,
                                      std::complex<double> mu_g_at_f);

/// Number of faces with non-positive signed area.
int flipped_face_count(const Faces& faces, const PlanarEmbedding& uv);

}  // namespace tubeparam
