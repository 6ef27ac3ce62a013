#include "tubeparam/seam_cut.hpp"

#include "tubeparam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace tubeparam {

WeightedGraph edge_length_graph(const TriMesh& mesh)
{
    WeightedGraph graph(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int w : mesh.neighbors(v)) {
            graph[v].emplace_back(w, (mesh.position(v) - mesh.position(w)).norm());
        }
    }
    return graph;
}

CutSeam shortest_set_path(const WeightedGraph& graph, const std::vector<int>& sources,
                          const std::vector<int>& targets)
{
    const int n = static_cast<int>(graph.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<char> is_source(n, 0), is_target(n, 0);
    for (int s : sources) {
        is_source.at(s) = 1;
    }
    for (int t : targets) {
        is_target.at(t) = 1;
    }

    // Distances to the target set; sources are terminal and never relaxed.
    std::vector<double> dist(n, inf);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int t : targets) {
        if (!is_source[t]) {
            dist[t] = 0.0;
            heap.emplace(0.0, t);
        }
    }
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v] || is_source[v]) {
            continue;
        }
        for (auto [w, len] : graph[v]) {
            if (d + len < dist[w]) {
                dist[w] = d + len;
                heap.emplace(dist[w], w);
            }
        }
    }

    double best = inf;
    for (int s : sources) {
        best = std::min(best, dist[s]);
    }
    if (!std::isfinite(best)) {
        return {};
    }
    const double eps = 1e-12 * std::max(best, 1e-300);

    int start = n;
    for (int s : sources) {
        if (dist[s] <= best + eps) {
            start = std::min(start, s);
        }
    }

    CutSeam seam;
    seam.path.push_back(start);
    int v = start;
    while (!is_target[v] || v == start) {
        int chosen = -1;
        double chosen_len = 0.0;
        for (auto [w, len] : graph[v]) {
            if (is_source[w] || !std::isfinite(dist[w])) {
                continue;
            }
            if (std::abs(dist[w] + len - dist[v]) <= eps && (chosen < 0 || w < chosen)) {
                chosen = w;
                chosen_len = len;
            }
        }
        if (chosen < 0) {
            throw std::logic_error("shortest path reconstruction failed");
        }
        seam.path.push_back(chosen);
        seam.length += chosen_len;
        v = chosen;
        if (is_target[v]) {
            break;
        }
    }
    return seam;
}

CutSeam shortest_seam(const TriMesh& mesh, const BoundaryLoop& loop0, const BoundaryLoop& loop1)
{
    for (int v : loop0.vertices) {
        if (loop1.contains(v)) {
            throw MeshError("seam: boundary loops share a vertex");
        }
    }
    CutSeam seam = shortest_set_path(edge_length_graph(mesh), loop0.vertices, loop1.vertices);
    if (seam.path.empty()) {
        throw MeshError("seam: boundary loops are not connected through the mesh interior");
    }
    return seam;
}

namespace {

void validate_seam(const TriMesh& mesh, const CutSeam& seam, const std::vector<BoundaryLoop>& loops)
{
    const auto& path = seam.path;
    if (path.size() < 2) {
        throw MeshError("seam: path needs at least two vertices");
    }
    std::vector<char> seen(mesh.num_vertices(), 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const int v = path[i];
        if (v < 0 || v >= mesh.num_vertices() || seen[v]) {
            throw MeshError("seam: path is not simple");
        }
        seen[v] = 1;
        if (i + 1 < path.size()) {
            const auto& ring = mesh.neighbors(v);
            if (!std::binary_search(ring.begin(), ring.end(), path[i + 1])) {
                throw MeshError("seam: consecutive vertices do not share an edge");
            }
        }
        if (i > 0 && i + 1 < path.size() && mesh.is_boundary_vertex(v)) {
            throw MeshError("seam: interior path vertex " + std::to_string(v)
                            + " touches a boundary loop");
        }
    }
    auto loop_of = [&](int v) {
        for (std::size_t l = 0; l < loops.size(); ++l) {
            if (loops[l].contains(v)) {
                return static_cast<int>(l);
            }
        }
        return -1;
    };
    const int a = loop_of(path.front());
    const int b = loop_of(path.back());
    if (a < 0 || b < 0 || a == b) {
        throw MeshError("seam: endpoints must lie on two different boundary loops");
    }
}

/// Faces around `v` reachable from `seeds` without crossing a blocked edge.
std::vector<int> flood_sector(const TriMesh& mesh, int v, const std::vector<int>& seeds,
                              const std::vector<int>& blocked)
{
    std::vector<int> sector;
    std::vector<int> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        if (std::find(sector.begin(), sector.end(), f) != sector.end()) {
            continue;
        }
        sector.push_back(f);
        int k = 0;
        while (mesh.faces()(f, k) != v) {
            ++k;
        }
        const int next = mesh.faces()(f, (k + 1) % 3);
        const int prev = mesh.faces()(f, (k + 2) % 3);
        if (std::find(blocked.begin(), blocked.end(), next) == blocked.end()) {
            const int g = mesh.face_of_halfedge(next, v);
            if (g >= 0) {
                stack.push_back(g);
            }
        }
        if (std::find(blocked.begin(), blocked.end(), prev) == blocked.end()) {
            const int g = mesh.face_of_halfedge(v, prev);
            if (g >= 0) {
                stack.push_back(g);
            }
        }
    }
    return sector;
}

}  // namespace

CutMesh cut_along_seam(const TriMesh& mesh, const CutSeam& seam)
{
    const auto loops = extract_boundary_loops(mesh);
    validate_seam(mesh, seam, loops);

    const auto& path = seam.path;
    const int n = mesh.num_vertices();
    const int k = static_cast<int>(path.size());

    Faces faces = mesh.faces();
    for (int i = 0; i < k; ++i) {
        const int v = path[i];
        std::vector<int> seeds;
        std::vector<int> blocked;
        int right_face = -1;
        if (i + 1 < k) {
            seeds.push_back(mesh.face_of_halfedge(v, path[i + 1]));
            blocked.push_back(path[i + 1]);
            right_face = mesh.face_of_halfedge(path[i + 1], v);
        }
        if (i > 0) {
            seeds.push_back(mesh.face_of_halfedge(path[i - 1], v));
            blocked.push_back(path[i - 1]);
        }
        if (std::find(seeds.begin(), seeds.end(), -1) != seeds.end()) {
            throw MeshError("seam: path runs along a boundary edge");
        }
        const auto sector = flood_sector(mesh, v, seeds, blocked);
        if (right_face >= 0 && std::find(sector.begin(), sector.end(), right_face) != sector.end()) {
            throw MeshError("seam: cannot separate the two sides at vertex " + std::to_string(v));
        }
        for (int f : sector) {
            for (int c = 0; c < 3; ++c) {
                if (faces(f, c) == v) {
                    faces(f, c) = n + i;
                }
            }
        }
    }

    Vertices vertices(n + k, 3);
    vertices.topRows(n) = mesh.vertices();
    for (int i = 0; i < k; ++i) {
        vertices.row(n + i) = mesh.vertices().row(path[i]);
    }

    std::optional<TriMesh> cut_mesh;
    try {
        cut_mesh.emplace(std::move(vertices), std::move(faces));
    } catch (const MeshError& e) {
        throw MeshError(std::string("seam: cutting produced an invalid mesh (degenerate flap?): ")
                        + e.what());
    }
    if (cut_mesh->euler_characteristic() != 1 || extract_boundary_loops(*cut_mesh).size() != 1) {
        throw MeshError("seam: cut mesh is not a topological disk");
    }

    CutMesh cut{std::move(*cut_mesh), n, path, {}, path.front(), n, path.back(), n + k - 1, {}};
    for (int i = 0; i < k; ++i) {
        cut.twins.emplace_back(path[i], n + i);
    }
    auto loop_with = [&](int v) -> const BoundaryLoop& {
        return *std::find_if(loops.begin(), loops.end(), [v](const BoundaryLoop& l) { return l.contains(v); });
    };
    const BoundaryLoop& first = loop_with(path.front());
    const BoundaryLoop& second = loop_with(path.back());
    cut.loop_side.assign(n + k, -1);
    for (int v = 0; v < n + k; ++v) {
        const int o = cut.original(v);
        if (first.contains(o)) {
            cut.loop_side[v] = 0;
        } else if (second.contains(o)) {
            cut.loop_side[v] = 1;
        }
    }
    return cut;
}

Eigen::VectorXd glue(const CutMesh& cut, const Eigen::VectorXd& field, Periodicity periodicity)
{
    if (field.size() != cut.mesh.num_vertices()) {
        throw std::invalid_argument("glue: field size does not match the cut mesh");
    }
    Eigen::VectorXd out = field.head(cut.num_original);
    for (auto [orig, copy] : cut.twins) {
        double gap = std::abs(field[orig] - field[copy]);
        if (periodicity == Periodicity::two_pi) {
            gap = std::fmod(gap, two_pi<double>);
            gap = std::min(gap, two_pi<double> - gap);
        }
        if (!(gap <= 1e-8)) {
            throw std::runtime_error("glue: twin values disagree at vertex " + std::to_string(orig)
                                     + " (gap " + std::to_string(gap) + ")");
        }
    }
    if (periodicity == Periodicity::two_pi) {
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            out[i] = wrap_two_pi(out[i]);
        }
    }
    return out;
}

Eigen::VectorXd unglue(const CutMesh& cut, const Eigen::VectorXd& field)
{
    Eigen::VectorXd out(cut.mesh.num_vertices());
    for (int v = 0; v < cut.mesh.num_vertices(); ++v) {
        out[v] = field[cut.original(v)];
    }
    return out;
}

}  // namespace tubeparam
