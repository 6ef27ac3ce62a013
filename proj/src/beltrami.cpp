#include "tubeparam/beltrami.hpp"

#include "tubeparam/geometry.hpp"

#include <cmath>
#include <string>

namespace tubeparam {

bool BeltramiField::admissible() const
{
    for (Eigen::Index f = 0; f < mu.size(); ++f) {
        if (!(std::abs(mu[f]) < 1.0)) {
            return false;
        }
    }
    return true;
}

FaceFrames face_flatten(const TriMesh& mesh)
{
    check_nondegenerate(mesh);
    FaceFrames frames(mesh.num_faces());
    const auto& F = mesh.faces();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        frames[f] = flatten_triangle<double>(mesh.position(F(f, 0)), mesh.position(F(f, 1)),
                                             mesh.position(F(f, 2)));
    }
    return frames;
}

FaceFrames embedding_frames(const Faces& faces, const PlanarEmbedding& uv)
{
    FaceFrames frames(faces.rows());
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            frames[f].row(k) = uv.row(faces(f, k));
        }
    }
    return frames;
}

BeltramiField beltrami_coefficient(const FaceFrames& source, const FaceFrames& image)
{
    if (source.size() != image.size()) {
        throw std::invalid_argument("beltrami_coefficient: frame counts differ");
    }
    BeltramiField field;
    field.mu.resize(static_cast<Eigen::Index>(source.size()));
    for (std::size_t f = 0; f < source.size(); ++f) {
        const auto mu = affine_beltrami<double>(affine_jacobian<double>(source[f], image[f]));
        if (std::isinf(mu.real())) {
            ++field.degenerate_faces;
        }
        field.mu[static_cast<Eigen::Index>(f)] = mu;
    }
    return field;
}

BeltramiField beltrami_coefficient(const FaceFrames& source, const Faces& faces, const PlanarEmbedding& image)
{
    return beltrami_coefficient(source, embedding_frames(faces, image));
}

SparseMatrix lbs_stiffness(const FaceFrames& frames, const Faces& faces, int num_vertices,
                           const BeltramiField& mu, const LbsOptions& options, int* clamped)
{
    if (static_cast<Eigen::Index>(frames.size()) != faces.rows() || mu.size() != faces.rows()) {
        throw std::invalid_argument("lbs_stiffness: size mismatch between frames, faces and mu");
    }
    int n_clamped = 0;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(9 * faces.rows()));
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        std::complex<double> m = mu.mu[f];
        const double modulus = std::abs(m);
        if (!std::isfinite(modulus)) {
            throw SolverError("non-admissible Beltrami coefficient on face " + std::to_string(f)
                              + " (degenerate image)");
        }
        if (modulus >= kMuBound) {
            if (options.strict) {
                throw SolverError("non-admissible Beltrami coefficient on face " + std::to_string(f)
                                  + " (|mu| = " + std::to_string(modulus) + ")");
            }
            m *= kMuBound / modulus;
            ++n_clamped;
        }
        const Eigen::Matrix2d A = beltrami_alpha_matrix(m);

        const FaceFrame<double>& P = frames[f];
        const double area = signed_area<double>(P.row(0).transpose(), P.row(1).transpose(),
                                                P.row(2).transpose());
        if (area == 0.0 || !std::isfinite(area)) {
            throw SolverError("degenerate source triangle " + std::to_string(f));
        }
        Eigen::Matrix<double, 2, 3> grad;
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector2d e = (P.row((k + 2) % 3) - P.row((k + 1) % 3)).transpose();
            grad.col(k) = Eigen::Vector2d(-e.y(), e.x()) / (2.0 * area);
        }
        const Eigen::Matrix3d local = std::abs(area) * grad.transpose() * A * grad;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(faces(f, i), faces(f, j), local(i, j));
            }
        }
    }
    SparseMatrix K(num_vertices, num_vertices);
    K.setFromTriplets(triplets.begin(), triplets.end());
    if (clamped) {
        *clamped = n_clamped;
    }
    return K;
}

LbsSolution lbs_solve(const FaceFrames& frames, const Faces& faces, int num_vertices, const BeltramiField& mu,
                      const std::array<LinearConstraintSet, 2>& constraints, const LbsOptions& options)
{
    LbsSolution solution;
    const SparseMatrix K = lbs_stiffness(frames, faces, num_vertices, mu, options, &solution.clamped_faces);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(num_vertices);
    solution.map.resize(num_vertices, 2);
    for (int c = 0; c < 2; ++c) {
        solution.map.col(c) = solve_constrained(K, constraints[c], zero);
    }
    return solution;
}

std::complex<double> compose_beltrami(std::complex<double> mu_f, std::complex<double> fz_phase,
                                      std::complex<double> mu_g_at_f)
{
    const std::complex<double> numerator = mu_f + fz_phase * mu_g_at_f;
    const std::complex<double> denominator = 1.0 + fz_phase * std::conj(mu_f) * mu_g_at_f;
    if (std::abs(denominator) < 1e-14) {
        throw std::domain_error("compose_beltrami: vanishing denominator");
    }
    return numerator / denominator;
}

int flipped_face_count(const Faces& faces, const PlanarEmbedding& uv)
{
    int flipped = 0;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        const double a = signed_area<double>(uv.row(faces(f, 0)).transpose(), uv.row(faces(f, 1)).transpose(),
                                             uv.row(faces(f, 2)).transpose());
        if (!(a > 0.0)) {
            ++flipped;
        }
    }
    return flipped;
}

}  // namespace tubeparam
