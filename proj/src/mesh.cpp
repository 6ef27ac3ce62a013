#include "tubeparam/mesh.hpp"

#include "tubeparam/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace tubeparam {

TriMesh::TriMesh(Vertices vertices, Faces faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces))
{
    const int nv = num_vertices();
    const int nf = num_faces();
    if (nf == 0) {
        throw MeshError("mesh has zero faces");
    }

    neighbors_.assign(nv, {});
    incident_faces_.assign(nv, {});
    halfedges_.reserve(static_cast<std::size_t>(3 * nf));

    std::unordered_map<std::uint64_t, int> undirected;
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int v = faces_(f, k);
            if (v < 0 || v >= nv) {
                throw MeshError("face " + std::to_string(f) + " references invalid vertex "
                                + std::to_string(v));
            }
        }
        const int a = faces_(f, 0), b = faces_(f, 1), c = faces_(f, 2);
        if (a == b || b == c || a == c) {
            throw MeshError("face " + std::to_string(f) + " repeats a vertex");
        }
        for (int k = 0; k < 3; ++k) {
            const int s = faces_(f, k);
            const int t = faces_(f, (k + 1) % 3);
            if (++undirected[key(std::min(s, t), std::max(s, t))] > 2) {
                throw MeshError("non-manifold edge (" + std::to_string(s) + ", "
                                + std::to_string(t) + ") shared by more than two faces");
            }
        }
    }
    num_edges_ = static_cast<int>(undirected.size());

    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int s = faces_(f, k);
            const int t = faces_(f, (k + 1) % 3);
            if (!halfedges_.emplace(key(s, t), f).second) {
                throw MeshError("inconsistent face orientation at edge (" + std::to_string(s)
                                + ", " + std::to_string(t) + ")");
            }
            incident_faces_[s].push_back(f);
            neighbors_[s].push_back(t);
            neighbors_[t].push_back(s);
        }
    }

    boundary_next_.assign(nv, -1);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int s = faces_(f, k);
            const int t = faces_(f, (k + 1) % 3);
            if (!halfedges_.contains(key(t, s))) {
                if (boundary_next_[s] >= 0) {
                    throw MeshError("non-manifold vertex " + std::to_string(s));
                }
                boundary_next_[s] = t;
            }
        }
    }

    for (int v = 0; v < nv; ++v) {
        auto& ring = neighbors_[v];
        std::sort(ring.begin(), ring.end());
        ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
        if (incident_faces_[v].empty()) {
            throw MeshError("isolated vertex " + std::to_string(v));
        }
    }

    // Vertex manifoldness: the faces around each vertex form a single fan.
    for (int v = 0; v < nv; ++v) {
        const auto& fan = incident_faces_[v];
        int start = fan.front();
        // For boundary vertices start from the face that owns the outgoing boundary edge.
        if (boundary_next_[v] >= 0) {
            start = face_of_halfedge(v, boundary_next_[v]);
        }
        int visited = 0;
        int f = start;
        do {
            ++visited;
            int k = 0;
            while (faces_(f, k) != v) {
                ++k;
            }
            // Rotate across the edge (prev -> v): the neighbour owns v -> prev.
            const int prev = faces_(f, (k + 2) % 3);
            f = face_of_halfedge(v, prev);
        } while (f >= 0 && f != start && visited <= static_cast<int>(fan.size()));
        if (visited != static_cast<int>(fan.size())) {
            throw MeshError("non-manifold vertex " + std::to_string(v));
        }
    }
}

int TriMesh::face_of_halfedge(int a, int b) const
{
    auto it = halfedges_.find(key(a, b));
    return it == halfedges_.end() ? -1 : it->second;
}

double BoundaryLoop::length() const
{
    return std::accumulate(edge_lengths.begin(), edge_lengths.end(), 0.0);
}

bool BoundaryLoop::contains(int v) const
{
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

std::vector<BoundaryLoop> extract_boundary_loops(const TriMesh& mesh)
{
    std::vector<BoundaryLoop> loops;
    std::vector<char> seen(mesh.num_vertices(), 0);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.is_boundary_vertex(v) || seen[v]) {
            continue;
        }
        BoundaryLoop loop;
        int cur = v;
        do {
            seen[cur] = 1;
            const int next = mesh.boundary_next(cur);
            loop.vertices.push_back(cur);
            loop.edge_lengths.push_back((mesh.position(next) - mesh.position(cur)).norm());
            cur = next;
        } while (cur != v);
        loops.push_back(std::move(loop));
    }
    std::stable_sort(loops.begin(), loops.end(), [](const BoundaryLoop& a, const BoundaryLoop& b) {
        return a.length() > b.length();
    });
    return loops;
}

Eigen::VectorXd face_areas(const TriMesh& mesh)
{
    Eigen::VectorXd areas(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& F = mesh.faces();
        areas[f] = triangle_area<double>(mesh.position(F(f, 0)), mesh.position(F(f, 1)),
                                         mesh.position(F(f, 2)));
    }
    return areas;
}

void check_nondegenerate(const TriMesh& mesh)
{
    const Eigen::VectorXd areas = face_areas(mesh);
    const double tol = 1e-12 * areas.mean();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!(areas[f] >= tol) || areas[f] == 0.0) {
            throw MeshError("degenerate face " + std::to_string(f) + " (area "
                            + std::to_string(areas[f]) + ")");
        }
    }
}

SparseMatrix cotan_stiffness(const TriMesh& mesh)
{
    check_nondegenerate(mesh);
    const auto& F = mesh.faces();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(12 * mesh.num_faces()));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int k = 0; k < 3; ++k) {
            // Angle at corner k is opposite the edge (k+1, k+2).
            const int o = F(f, k);
            const int i = F(f, (k + 1) % 3);
            const int j = F(f, (k + 2) % 3);
            const double w = 0.5 * corner_cotangent<double>(mesh.position(o), mesh.position(i),
                                                            mesh.position(j));
            triplets.emplace_back(i, j, w);
            triplets.emplace_back(j, i, w);
            triplets.emplace_back(i, i, -w);
            triplets.emplace_back(j, j, -w);
        }
    }
    SparseMatrix W(mesh.num_vertices(), mesh.num_vertices());
    W.setFromTriplets(triplets.begin(), triplets.end());
    return W;
}

Eigen::VectorXd vertex_areas(const TriMesh& mesh)
{
    const Eigen::VectorXd areas = face_areas(mesh);
    Eigen::VectorXd A = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int k = 0; k < 3; ++k) {
            A[mesh.faces()(f, k)] += areas[f] / 3.0;
        }
    }
    return A;
}

SparseMatrix cotan_laplacian(const TriMesh& mesh)
{
    const SparseMatrix W = cotan_stiffness(mesh);
    const Eigen::VectorXd A = vertex_areas(mesh);
    return A.cwiseInverse().asDiagonal() * W;
}

}  // namespace tubeparam
