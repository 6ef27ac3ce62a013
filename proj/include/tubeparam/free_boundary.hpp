#pragma once

#include "tubeparam/tube_param.hpp"

namespace tubeparam {

struct ExtensionConfig
{
    int K = 1;
    double tau = 0.2;
    double omega = 0.5;

    /// Throws std::invalid_argument unless K >= 1, tau in [0, 1], omega >= 0.
    void validate() const;
};

/// Augmented mesh; the original vertices form a prefix of its vertex list.
struct ExtensionRecord
{
    TriMesh mesh;
    int num_original = 0;
    /// original index -> augmented index (the identity on the prefix)
    std::vector<int> original_index;
};

using RingPoints = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// One outward step of a boundary ring, blending the lateral direction with
/// the vertex normal by tau.
RingPoints raw_extend_ring(const TriMesh& mesh, const BoundaryLoop& ring, double tau);

/// Solves (I + omega L_cycle) x = x_raw per coordinate.
RingPoints smooth_ring(const RingPoints& raw, double omega);

/// Adds K smoothed bands to each boundary loop.
ExtensionRecord extend_mesh(const TriMesh& mesh, const ExtensionConfig& config);

struct FreeResult
{
    /// Coordinates restricted to the original vertices.
    TubeCoords tube;
    /// Diagnostics of the fixed-boundary run on the augmented mesh, with the
    /// distortion fields measured on the original faces.
    FixedDiagnostics diagnostics;
    int extended_vertices = 0;
};

/// Fixed-boundary parameterization of the extended mesh, restricted back.
FreeResult parameterize_free(const TriMesh& mesh, const ExtensionConfig& config, double d,
                             const LbsOptions& options = {});

/// Restriction onto the first `num_original` vertices.
TubeCoords restrict_tube(const TubeCoords& tube, int num_original);

}  // namespace tubeparam
