#pragma once

#include "tubeparam/beltrami.hpp"
#include "tubeparam/seam_cut.hpp"

#include <complex>
#include <map>
#include <memory>
#include <string>

namespace tubeparam {

/// Per-vertex tube coordinates: u periodic in [0, 2 pi), z in [0, L*].
struct TubeCoords
{
    Eigen::VectorXd u;
    Eigen::VectorXd z;
    double L_star = 0.0;

    int size() const { return static_cast<int>(u.size()); }
    /// Points (cos u, sin u, z) on the unit-radius tube.
    Vertices positions() const;
};

/// Per-vertex point of the annulus 1 <= |w| <= exp(L*).
struct AnnulusEmbedding
{
    Eigen::VectorXcd w;
    double L_star = 0.0;

    int size() const { return static_cast<int>(w.size()); }
    PlanarEmbedding planar() const;
};

/// Angles 2 pi * (cumulative length) / (total length), starting at 0.
Eigen::VectorXd arc_length_boundary(const BoundaryLoop& loop);

/// Harmonic map of the cut mesh onto the unit disk. The boundary is placed by
/// arc length starting at p.
PlanarEmbedding disk_harmonic_map(const CutMesh& cut);

/// Rectangle maps [0, 2 pi] x [0, L] for a fixed disk map.
///
/// The Beltrami coefficient of the inverse disk map is computed once and the
/// two generalized systems are factored once; maps for different L reuse the
/// factorizations.
class RectangleSolver
{
public:
    RectangleSolver(const CutMesh& cut, const PlanarEmbedding& disk, const LbsOptions& options = {});
    ~RectangleSolver();
    RectangleSolver(RectangleSolver&&) noexcept;
    RectangleSolver& operator=(RectangleSolver&&) noexcept;

    PlanarEmbedding map(double L) const;
    /// Area-weighted mean of |mu|^2 of the surface-to-rectangle map.
    double energy(const PlanarEmbedding& rect) const;
    double energy(double L) const { return energy(map(L)); }

    /// Crude conformal-module estimate 2 pi * seam length / mean loop length.
    double module_estimate() const { return module_estimate_; }
    int clamped_faces() const { return clamped_faces_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double module_estimate_ = 0.0;
    int clamped_faces_ = 0;
};

PlanarEmbedding rect_map(const CutMesh& cut, const PlanarEmbedding& disk, double L, const LbsOptions& options = {});

struct LengthSearch
{
    double L_star = 0.0;
    double energy = 0.0;
    PlanarEmbedding rect;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int evaluations = 0;
    /// The minimum sits on a bracket endpoint.
    bool at_endpoint = false;
};

/// Golden-section search for the rectangle length minimizing the energy on
/// [0.25 M, 4 M], M being the module estimate; stops at width < 1e-4 L*.
LengthSearch optimize_length(const RectangleSolver& solver);
LengthSearch optimize_length(const CutMesh& cut, const PlanarEmbedding& disk, const LbsOptions& options = {});

/// u = x mod 2 pi and z = y, glued back onto the original vertices.
TubeCoords lift_to_tube(const CutMesh& cut, const PlanarEmbedding& rect, double L_star);

AnnulusEmbedding tube_to_annulus(const TubeCoords& tube);
TubeCoords annulus_to_tube(const AnnulusEmbedding& annulus);

struct StripInfo
{
    int strip_faces = 0;
    int strip_vertices = 0;
    int pinned_vertices = 0;
    int clamped_faces = 0;
    /// Vertices whose position was solved for.
    std::vector<int> interior;
};

struct CorrectionResult
{
    AnnulusEmbedding annulus;
    StripInfo strip;
};

/// Localized quasi-conformal correction on the strip |arg w| <= d pi around
/// the seam (which must sit at arg w = 0). Vertices not interior to the strip
/// keep their exact input value.
CorrectionResult seam_correction(const AnnulusEmbedding& annulus, const TriMesh& mesh, const FaceFrames& surface,
                                 double d, const LbsOptions& options = {});
CorrectionResult seam_correction(const AnnulusEmbedding& annulus, const TriMesh& mesh, double d,
                                 const LbsOptions& options = {});

/// Stage wall-clock times in seconds, keyed by stage name.
using StageTimings = std::map<std::string, double>;

/// Everything up to and including the tube lift; shared by strip-width sweeps.
struct InitialParam
{
    FaceFrames surface;
    CutSeam seam;
    CutMesh cut;
    PlanarEmbedding disk;
    LengthSearch length;
    TubeCoords tube;
    StageTimings timings;
    int clamped_faces = 0;
};

InitialParam initial_parameterization(const TriMesh& mesh, const LbsOptions& options = {});

struct FixedDiagnostics
{
    double L_star = 0.0;
    double seam_length = 0.0;
    double distortion_init = 0.0;
    double distortion_corrected = 0.0;
    int flipped_faces = 0;
    int strip_faces = 0;
    int clamped_faces = 0;
    bool length_at_endpoint = false;
    StageTimings timings;
};

struct FixedResult
{
    TubeCoords tube;
    FixedDiagnostics diagnostics;
};

/// Seam correction with strip width d applied to an initial parameterization.
FixedResult correct_initial(const TriMesh& mesh, const InitialParam& init, double d,
                            const LbsOptions& options = {});

/// Fixed-boundary tube parameterization of a mesh with two boundary loops.
FixedResult parameterize_fixed(const TriMesh& mesh, double d, const LbsOptions& options = {});

}  // namespace tubeparam
