#include "tubeparam/free_boundary.hpp"

#include "tubeparam/metrics.hpp"

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <string>

namespace tubeparam {

namespace {

Eigen::Vector3d normalized_or_throw(const Eigen::Vector3d& v, const char* what, int vertex)
{
    const double n = v.norm();
    if (!(n > 1e-14)) {
        throw MeshError(std::string("raw_extend_ring: zero-norm ") + what + " at vertex " + std::to_string(vertex));
    }
    return v / n;
}

/// Area-weighted normal: the sum of incident face cross products.
Eigen::Vector3d vertex_normal(const TriMesh& mesh, int v)
{
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    for (int f : mesh.incident_faces(v)) {
        const Eigen::Vector3d a = mesh.position(mesh.faces()(f, 0));
        const Eigen::Vector3d b = mesh.position(mesh.faces()(f, 1));
        const Eigen::Vector3d c = mesh.position(mesh.faces()(f, 2));
        n += 0.5 * (b - a).cross(c - a);
    }
    return n;
}

}  // namespace

void ExtensionConfig::validate() const
{
    if (K < 1) {
        throw std::invalid_argument("extension: K must be at least 1");
    }
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("extension: tau must lie in [0, 1]");
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("extension: omega must be non-negative");
    }
}

RingPoints raw_extend_ring(const TriMesh& mesh, const BoundaryLoop& ring, double tau)
{
    const int m = ring.size();
    if (m < 3) {
        throw MeshError("raw_extend_ring: ring needs at least three vertices");
    }
    RingPoints directions(m, 3);
    std::vector<double> steps(m);
    for (int i = 0; i < m; ++i) {
        const int v = ring.vertices[i];
        const Eigen::Vector3d p = mesh.position(v);
        const Eigen::Vector3d t = normalized_or_throw(
            mesh.position(ring.vertices[(i + 1) % m]) - mesh.position(ring.vertices[(i + m - 1) % m]), "tangent", v);

        Eigen::Vector3d inward = Eigen::Vector3d::Zero();
        double spacing = 0.0;
        int count = 0;
        for (int q : mesh.neighbors(v)) {
            if (ring.contains(q)) {
                continue;
            }
            const Eigen::Vector3d e = mesh.position(q) - p;
            inward += e;
            spacing += e.norm();
            ++count;
        }
        if (count == 0) {
            throw MeshError("raw_extend_ring: ring vertex " + std::to_string(v) + " has no interior neighbor");
        }
        const Eigen::Vector3d u = normalized_or_throw(inward, "inward direction", v);
        const Eigen::Vector3d n = normalized_or_throw(vertex_normal(mesh, v), "normal", v);
        Eigen::Vector3d b = normalized_or_throw(t.cross(n), "binormal", v);
        if (b.dot(u) > 0.0) {
            b = -b;
        }
        directions.row(i) = normalized_or_throw((1.0 - tau) * b + tau * n, "extension direction", v).transpose();
        steps[i] = spacing / count;
    }
    double mean_step = 0.0;
    for (double s : steps) {
        mean_step += s;
    }
    mean_step /= m;

    RingPoints raw(m, 3);
    for (int i = 0; i < m; ++i) {
        raw.row(i) = mesh.vertices().row(ring.vertices[i]) + mean_step * directions.row(i);
    }
    return raw;
}

RingPoints smooth_ring(const RingPoints& raw, double omega)
{
    const int m = static_cast<int>(raw.rows());
    if (m < 3) {
        throw std::invalid_argument("smooth_ring: ring needs at least three points");
    }
    if (!(omega >= 0.0)) {
        throw std::invalid_argument("smooth_ring: omega must be non-negative");
    }
    if (omega == 0.0) {
        return raw;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < m; ++i) {
        triplets.emplace_back(i, i, 1.0 + 2.0 * omega);
        triplets.emplace_back(i, (i + 1) % m, -omega);
        triplets.emplace_back(i, (i + m - 1) % m, -omega);
    }
    SparseMatrix A(m, m);
    A.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<SparseMatrix> solver(A);
    if (solver.info() != Eigen::Success) {
        throw SolverError("smooth_ring: factorization failed");
    }
    RingPoints out(m, 3);
    for (int c = 0; c < 3; ++c) {
        out.col(c) = solver.solve(raw.col(c));
    }
    return out;
}

ExtensionRecord extend_mesh(const TriMesh& mesh, const ExtensionConfig& config)
{
    config.validate();
    const auto loops = extract_boundary_loops(mesh);
    if (loops.size() != 2) {
        throw MeshError("extend_mesh: expected two boundary loops, found " + std::to_string(loops.size()));
    }
    Vertices vertices = mesh.vertices();
    Faces faces = mesh.faces();
    TriMesh current = mesh;

    for (const BoundaryLoop& loop : loops) {
        BoundaryLoop ring = loop;
        for (int layer = 0; layer < config.K; ++layer) {
            const RingPoints x = smooth_ring(raw_extend_ring(current, ring, config.tau), config.omega);
            const int m = ring.size();
            const auto base = static_cast<int>(vertices.rows());
            vertices.conservativeResize(base + m, 3);
            vertices.bottomRows(m) = x;
            const auto f0 = faces.rows();
            faces.conservativeResize(f0 + 2 * m, 3);
            std::vector<int> next(m);
            for (int i = 0; i < m; ++i) {
                const int a0 = ring.vertices[i], a1 = ring.vertices[(i + 1) % m];
                const int b0 = base + i, b1 = base + (i + 1) % m;
                faces.row(f0 + 2 * i) << a1, a0, b0;
                faces.row(f0 + 2 * i + 1) << a1, b0, b1;
                next[i] = b0;
            }
            current = TriMesh(vertices, faces);
            BoundaryLoop updated;
            updated.vertices = next;
            for (int i = 0; i < m; ++i) {
                updated.edge_lengths.push_back((current.position(next[(i + 1) % m]) - current.position(next[i])).norm());
            }
            ring = std::move(updated);
        }
    }

    ExtensionRecord record{std::move(current), mesh.num_vertices(), {}};
    record.original_index.resize(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        record.original_index[v] = v;
    }
    return record;
}

TubeCoords restrict_tube(const TubeCoords& tube, int num_original)
{
    TubeCoords out;
    out.u = tube.u.head(num_original);
    out.z = tube.z.head(num_original);
    out.L_star = tube.L_star;
    return out;
}

FreeResult parameterize_free(const TriMesh& mesh, const ExtensionConfig& config, double d, const LbsOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    const ExtensionRecord ext = extend_mesh(mesh, config);
    const double extension_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const InitialParam init = initial_parameterization(ext.mesh, options);
    const FixedResult fixed = correct_initial(ext.mesh, init, d, options);

    FreeResult result;
    result.tube = restrict_tube(fixed.tube, ext.num_original);
    result.diagnostics = fixed.diagnostics;
    result.diagnostics.timings["extension"] = extension_time;
    result.diagnostics.distortion_init =
        angular_distortion(mesh, restrict_tube(init.tube, ext.num_original).positions()).mean_deg;
    result.diagnostics.distortion_corrected = angular_distortion(mesh, result.tube.positions()).mean_deg;
    result.extended_vertices = ext.mesh.num_vertices() - ext.num_original;
    return result;
}

}  // namespace tubeparam
