#include "tubeparam/tube_param.hpp"

#include "tubeparam/geometry.hpp"
#include "tubeparam/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace tubeparam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kDomainSlack = 1e-6;

/// Orientation-matched surface frame: mirrored when the source triangle is
/// clockwise, so the per-face map stays orientation preserving.
FaceFrame<double> matched_frame(const FaceFrame<double>& surface, const FaceFrame<double>& source)
{
    const double a = signed_area<double>(source.row(0).transpose(), source.row(1).transpose(),
                                         source.row(2).transpose());
    if (a >= 0.0) {
        return surface;
    }
    FaceFrame<double> mirrored = surface;
    mirrored.col(1) *= -1.0;
    return mirrored;
}

}  // namespace

Vertices TubeCoords::positions() const
{
    Vertices out(size(), 3);
    for (int v = 0; v < size(); ++v) {
        out.row(v) << std::cos(u[v]), std::sin(u[v]), z[v];
    }
    return out;
}

PlanarEmbedding AnnulusEmbedding::planar() const
{
    PlanarEmbedding out(size(), 2);
    out.col(0) = w.real();
    out.col(1) = w.imag();
    return out;
}

Eigen::VectorXd arc_length_boundary(const BoundaryLoop& loop)
{
    const double total = loop.length();
    if (!(total > 0.0)) {
        throw MeshError("arc_length_boundary: loop has zero length");
    }
    Eigen::VectorXd theta(loop.size());
    double cumulative = 0.0;
    for (int i = 0; i < loop.size(); ++i) {
        theta[i] = two_pi<double> * cumulative / total;
        cumulative += loop.edge_lengths[i];
    }
    return theta;
}

PlanarEmbedding disk_harmonic_map(const CutMesh& cut)
{
    const TriMesh& mesh = cut.mesh;
    const auto loops = extract_boundary_loops(mesh);
    if (loops.size() != 1) {
        throw MeshError("disk_harmonic_map: cut mesh must have one boundary loop");
    }
    BoundaryLoop loop = loops.front();
    const auto start = std::find(loop.vertices.begin(), loop.vertices.end(), cut.p);
    if (start == loop.vertices.end()) {
        throw MeshError("disk_harmonic_map: seam start is not on the cut boundary");
    }
    const auto offset = start - loop.vertices.begin();
    std::rotate(loop.vertices.begin(), start, loop.vertices.end());
    std::rotate(loop.edge_lengths.begin(), loop.edge_lengths.begin() + offset, loop.edge_lengths.end());
    const Eigen::VectorXd theta = arc_length_boundary(loop);

    std::array<LinearConstraintSet, 2> constraints;
    for (int i = 0; i < loop.size(); ++i) {
        constraints[0].pin(loop.vertices[i], std::cos(theta[i]));
        constraints[1].pin(loop.vertices[i], std::sin(theta[i]));
    }
    const SparseMatrix K = -cotan_stiffness(mesh);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh.num_vertices());
    PlanarEmbedding disk(mesh.num_vertices(), 2);
    for (int c = 0; c < 2; ++c) {
        disk.col(c) = solve_constrained(K, constraints[c], zero);
    }
    return disk;
}

struct RectangleSolver::Impl
{
    Faces faces;
    FaceFrames surface;
    Eigen::VectorXd areas;
    std::optional<ConstrainedSystem> x_system;
    std::optional<ConstrainedSystem> y_system;
    Eigen::VectorXd x;
    std::vector<int> loop_side;

    LinearConstraintSet y_values(double L) const
    {
        LinearConstraintSet values;
        for (std::size_t v = 0; v < loop_side.size(); ++v) {
            if (loop_side[v] >= 0) {
                values.pin(static_cast<int>(v), loop_side[v] == 0 ? 0.0 : L);
            }
        }
        return values;
    }
};

RectangleSolver::RectangleSolver(const CutMesh& cut, const PlanarEmbedding& disk, const LbsOptions& options)
    : impl_(std::make_unique<Impl>())
{
    const TriMesh& mesh = cut.mesh;
    const int n = mesh.num_vertices();
    if (disk.rows() != n) {
        throw std::invalid_argument("RectangleSolver: disk map size does not match the cut mesh");
    }
    impl_->faces = mesh.faces();
    impl_->surface = face_flatten(mesh);
    impl_->areas = face_areas(mesh);
    impl_->loop_side = cut.loop_side;

    const FaceFrames disk_frames = embedding_frames(impl_->faces, disk);
    // Coefficient of the inverse disk map, living on the disk faces.
    const BeltramiField mu = beltrami_coefficient(disk_frames, impl_->surface);
    const SparseMatrix K = lbs_stiffness(disk_frames, impl_->faces, n, mu, options, &clamped_faces_);

    LinearConstraintSet x_constraints;
    for (auto [orig, copy] : cut.twins) {
        x_constraints.pin(orig, 0.0);
        x_constraints.pin(copy, two_pi<double>);
    }
    LinearConstraintSet y_constraints = impl_->y_values(1.0);
    for (std::size_t i = 1; i + 1 < cut.twins.size(); ++i) {
        y_constraints.tie(cut.twins[i].first, cut.twins[i].second);
    }
    for (int corner : {cut.p, cut.p_prime, cut.q, cut.q_prime}) {
        if (cut.loop_side.at(corner) != (corner == cut.p || corner == cut.p_prime ? 0 : 1)) {
            throw MeshError("rect_map: corner vertex is not on its boundary loop");
        }
    }

    impl_->x_system.emplace(K, x_constraints);
    impl_->y_system.emplace(K, y_constraints);
    impl_->x = impl_->x_system->solve(Eigen::VectorXd::Zero(n));

    double seam_length = 0.0;
    for (std::size_t i = 0; i + 1 < cut.seam.size(); ++i) {
        seam_length += (mesh.position(cut.seam[i]) - mesh.position(cut.seam[i + 1])).norm();
    }
    double boundary_length = 0.0;
    for (const auto& loop : extract_boundary_loops(mesh)) {
        boundary_length += loop.length();
    }
    const double mean_loop = 0.5 * (boundary_length - 2.0 * seam_length);
    module_estimate_ = two_pi<double> * seam_length / mean_loop;
}

RectangleSolver::~RectangleSolver() = default;
RectangleSolver::RectangleSolver(RectangleSolver&&) noexcept = default;
RectangleSolver& RectangleSolver::operator=(RectangleSolver&&) noexcept = default;

PlanarEmbedding RectangleSolver::map(double L) const
{
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument("rect_map: rectangle length must be positive");
    }
    const Eigen::Index n = impl_->x.size();
    PlanarEmbedding rect(n, 2);
    rect.col(0) = impl_->x;
    rect.col(1) = impl_->y_system->solve(Eigen::VectorXd::Zero(n), impl_->y_values(L));
    return rect;
}

double RectangleSolver::energy(const PlanarEmbedding& rect) const
{
    const BeltramiField mu = beltrami_coefficient(impl_->surface, impl_->faces, rect);
    if (mu.degenerate_faces > 0) {
        return std::numeric_limits<double>::infinity();
    }
    return beltrami_summary(mu, impl_->areas).mean_sq;
}

PlanarEmbedding rect_map(const CutMesh& cut, const PlanarEmbedding& disk, double L, const LbsOptions& options)
{
    return RectangleSolver(cut, disk, options).map(L);
}

LengthSearch optimize_length(const RectangleSolver& solver)
{
    constexpr double inv_phi = 0.6180339887498949;
    LengthSearch search;
    const double M = solver.module_estimate();
    if (!(M > 0.0) || !std::isfinite(M)) {
        throw MeshError("optimize_length: invalid module estimate");
    }
    search.bracket_lo = 0.25 * M;
    search.bracket_hi = 4.0 * M;

    auto evaluate = [&](double L) {
        ++search.evaluations;
        return solver.energy(L);
    };
    double a = search.bracket_lo, b = search.bracket_hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = evaluate(c), fd = evaluate(d);
    while (b - a >= 1e-4 * (0.5 * (a + b))) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = evaluate(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = evaluate(d);
        }
    }
    search.L_star = 0.5 * (a + b);
    search.rect = solver.map(search.L_star);
    search.energy = solver.energy(search.rect);
    ++search.evaluations;
    const double tol = 1e-3 * search.L_star;
    search.at_endpoint = search.L_star - search.bracket_lo < tol || search.bracket_hi - search.L_star < tol;
    return search;
}

LengthSearch optimize_length(const CutMesh& cut, const PlanarEmbedding& disk, const LbsOptions& options)
{
    return optimize_length(RectangleSolver(cut, disk, options));
}

TubeCoords lift_to_tube(const CutMesh& cut, const PlanarEmbedding& rect, double L_star)
{
    if (rect.rows() != cut.mesh.num_vertices()) {
        throw std::invalid_argument("lift_to_tube: rectangle map size does not match the cut mesh");
    }
    const double x_min = rect.col(0).minCoeff(), x_max = rect.col(0).maxCoeff();
    const double y_min = rect.col(1).minCoeff(), y_max = rect.col(1).maxCoeff();
    if (x_min < -kDomainSlack || x_max > two_pi<double> + kDomainSlack || y_min < -kDomainSlack
        || y_max > L_star + kDomainSlack) {
        throw MeshError("lift_to_tube: rectangle coordinates leave [0, 2pi] x [0, L*] (x in [" + std::to_string(x_min)
                        + ", " + std::to_string(x_max) + "], y in [" + std::to_string(y_min) + ", "
                        + std::to_string(y_max) + "])");
    }
    TubeCoords tube;
    tube.u = glue(cut, rect.col(0), Periodicity::two_pi);
    tube.z = glue(cut, rect.col(1), Periodicity::none);
    tube.L_star = L_star;
    return tube;
}

AnnulusEmbedding tube_to_annulus(const TubeCoords& tube)
{
    AnnulusEmbedding annulus;
    annulus.L_star = tube.L_star;
    annulus.w.resize(tube.size());
    for (int v = 0; v < tube.size(); ++v) {
        annulus.w[v] = std::exp(tube.z[v]) * std::polar(1.0, tube.u[v]);
    }
    return annulus;
}

TubeCoords annulus_to_tube(const AnnulusEmbedding& annulus)
{
    TubeCoords tube;
    tube.L_star = annulus.L_star;
    tube.u.resize(annulus.size());
    tube.z.resize(annulus.size());
    for (int v = 0; v < annulus.size(); ++v) {
        const double r = std::abs(annulus.w[v]);
        if (!(r >= 1.0 - 1e-9)) {
            throw MeshError("annulus_to_tube: |w| = " + std::to_string(r) + " below the inner radius at vertex "
                            + std::to_string(v));
        }
        tube.u[v] = wrap_two_pi(std::arg(annulus.w[v]));
        tube.z[v] = std::log(r);
    }
    return tube;
}

CorrectionResult seam_correction(const AnnulusEmbedding& annulus, const TriMesh& mesh, const FaceFrames& surface,
                                 double d, const LbsOptions& options)
{
    if (!(d >= 0.0 && d <= 1.0)) {
        throw std::invalid_argument("seam_correction: strip width must lie in [0, 1]");
    }
    if (annulus.size() != mesh.num_vertices() || static_cast<int>(surface.size()) != mesh.num_faces()) {
        throw std::invalid_argument("seam_correction: annulus or frames do not match the mesh");
    }
    CorrectionResult result{annulus, {}};
    const int n = mesh.num_vertices();
    const Faces& F = mesh.faces();

    std::vector<char> inside(n, 0);
    for (int v = 0; v < n; ++v) {
        double angle = std::arg(annulus.w[v]);
        if (angle <= -std::numbers::pi) {
            angle = std::numbers::pi;
        }
        inside[v] = std::abs(angle) <= d * std::numbers::pi;
    }

    std::vector<int> strip_faces;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (inside[F(f, 0)] && inside[F(f, 1)] && inside[F(f, 2)]) {
            strip_faces.push_back(f);
        }
    }
    if (strip_faces.empty()) {
        return result;
    }

    std::vector<int> local(n, -1);
    std::vector<int> global;
    Faces strip(static_cast<Eigen::Index>(strip_faces.size()), 3);
    for (std::size_t s = 0; s < strip_faces.size(); ++s) {
        for (int k = 0; k < 3; ++k) {
            const int v = F(strip_faces[s], k);
            if (local[v] < 0) {
                local[v] = static_cast<int>(global.size());
                global.push_back(v);
            }
            strip(static_cast<Eigen::Index>(s), k) = local[v];
        }
    }
    const int m = static_cast<int>(global.size());

    // A vertex is on the strip boundary when one of its strip edges has no
    // strip face on the other side.
    std::vector<char> in_strip_face(static_cast<std::size_t>(mesh.num_faces()), 0);
    for (int f : strip_faces) {
        in_strip_face[f] = 1;
    }
    std::vector<char> pinned(m, 0);
    for (int f : strip_faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = F(f, k), b = F(f, (k + 1) % 3);
            const int g = mesh.face_of_halfedge(b, a);
            if (g < 0 || !in_strip_face[g]) {
                pinned[local[a]] = 1;
                pinned[local[b]] = 1;
            }
        }
    }

    FaceFrames source(strip_faces.size());
    FaceFrames target(strip_faces.size());
    for (std::size_t s = 0; s < strip_faces.size(); ++s) {
        for (int k = 0; k < 3; ++k) {
            const std::complex<double> w = annulus.w[F(strip_faces[s], k)];
            source[s].row(k) << w.real(), w.imag();
        }
        target[s] = matched_frame(surface[strip_faces[s]], source[s]);
    }
    const BeltramiField mu = beltrami_coefficient(source, target);

    std::array<LinearConstraintSet, 2> constraints;
    for (int i = 0; i < m; ++i) {
        if (pinned[i]) {
            const std::complex<double> w = annulus.w[global[i]];
            constraints[0].pin(i, w.real());
            constraints[1].pin(i, w.imag());
        }
    }

    StripInfo& info = result.strip;
    info.strip_faces = static_cast<int>(strip_faces.size());
    info.strip_vertices = m;
    info.pinned_vertices = static_cast<int>(std::count(pinned.begin(), pinned.end(), 1));
    if (info.pinned_vertices == m) {
        return result;
    }

    const LbsSolution solution = lbs_solve(source, strip, m, mu, constraints, options);
    info.clamped_faces = solution.clamped_faces;
    for (int i = 0; i < m; ++i) {
        if (!pinned[i]) {
            result.annulus.w[global[i]] = {solution.map(i, 0), solution.map(i, 1)};
            info.interior.push_back(global[i]);
        }
    }
    std::sort(info.interior.begin(), info.interior.end());
    return result;
}

CorrectionResult seam_correction(const AnnulusEmbedding& annulus, const TriMesh& mesh, double d,
                                 const LbsOptions& options)
{
    return seam_correction(annulus, mesh, face_flatten(mesh), d, options);
}

InitialParam initial_parameterization(const TriMesh& mesh, const LbsOptions& options)
{
    const auto loops = extract_boundary_loops(mesh);
    if (loops.size() != 2) {
        throw MeshError("expected a tube with exactly two boundary loops, found " + std::to_string(loops.size()));
    }
    StageTimings timings;
    auto t = Clock::now();
    FaceFrames surface = face_flatten(mesh);
    CutSeam seam = shortest_seam(mesh, loops[0], loops[1]);
    CutMesh cut = cut_along_seam(mesh, seam);
    timings["seam_cut"] = seconds_since(t);

    t = Clock::now();
    PlanarEmbedding disk = disk_harmonic_map(cut);
    timings["disk_map"] = seconds_since(t);

    t = Clock::now();
    const RectangleSolver solver(cut, disk, options);
    LengthSearch length = optimize_length(solver);
    timings["rectangle_map"] = seconds_since(t);

    t = Clock::now();
    TubeCoords tube = lift_to_tube(cut, length.rect, length.L_star);
    timings["tube_lift"] = seconds_since(t);
    return {std::move(surface), std::move(seam),   std::move(cut),     std::move(disk),
            std::move(length),  std::move(tube),   std::move(timings), solver.clamped_faces()};
}

FixedResult correct_initial(const TriMesh& mesh, const InitialParam& init, double d, const LbsOptions& options)
{
    FixedResult result;
    FixedDiagnostics& diag = result.diagnostics;
    diag.timings = init.timings;
    diag.L_star = init.length.L_star;
    diag.seam_length = init.seam.length;
    diag.length_at_endpoint = init.length.at_endpoint;
    diag.clamped_faces = init.clamped_faces;

    auto t = Clock::now();
    const AnnulusEmbedding annulus = tube_to_annulus(init.tube);
    const CorrectionResult corrected = seam_correction(annulus, mesh, init.surface, d, options);
    result.tube = init.tube;
    for (int v : corrected.strip.interior) {
        const std::complex<double> w = corrected.annulus.w[v];
        const double r = std::abs(w);
        if (!(r >= 1.0 - 1e-9)) {
            throw MeshError("seam correction moved vertex " + std::to_string(v) + " inside the inner circle");
        }
        result.tube.u[v] = wrap_two_pi(std::arg(w));
        result.tube.z[v] = std::log(r);
    }
    diag.timings["seam_correction"] = seconds_since(t);
    diag.strip_faces = corrected.strip.strip_faces;
    diag.clamped_faces += corrected.strip.clamped_faces;

    // The tube-to-annulus map reverses orientation, so a consistent image has
    // every face clockwise in the w plane.
    PlanarEmbedding mirrored = corrected.annulus.planar();
    mirrored.col(1) *= -1.0;
    diag.flipped_faces = flipped_face_count(mesh.faces(), mirrored);

    diag.distortion_init = angular_distortion(mesh, init.tube.positions()).mean_deg;
    diag.distortion_corrected = angular_distortion(mesh, result.tube.positions()).mean_deg;
    return result;
}

FixedResult parameterize_fixed(const TriMesh& mesh, double d, const LbsOptions& options)
{
    const InitialParam init = initial_parameterization(mesh, options);
    return correct_initial(mesh, init, d, options);
}

}  // namespace tubeparam
