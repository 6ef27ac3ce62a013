#include "tubeparam/seam_cut.hpp"
#include "tubeparam/synth.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <functional>
#include <numbers>

using namespace tubeparam;

namespace {

/// Straight unit-radius cylinder grid, built directly so sizes below the
/// generator's minimum are allowed.
TriMesh cylinder(int n_u, int n_z, double height = 3.0)
{
    Vertices V(n_u * n_z, 3);
    for (int j = 0; j < n_z; ++j) {
        for (int i = 0; i < n_u; ++i) {
            const double u = 2.0 * std::numbers::pi * i / n_u;
            V.row(j * n_u + i) << std::cos(u), std::sin(u), height * j / (n_z - 1);
        }
    }
    Faces F(2 * n_u * (n_z - 1), 3);
    int f = 0;
    for (int j = 0; j + 1 < n_z; ++j) {
        for (int i = 0; i < n_u; ++i) {
            const int v00 = j * n_u + i, v10 = j * n_u + (i + 1) % n_u;
            F.row(f++) << v00, v10, v10 + n_u;
            F.row(f++) << v00, v10 + n_u, v00 + n_u;
        }
    }
    return TriMesh(V, F);
}

/// Minimum over every simple loop-to-loop path with interior intermediates.
double exhaustive_seam_length(const TriMesh& mesh, const BoundaryLoop& loop0, const BoundaryLoop& loop1)
{
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(mesh.num_vertices(), 0);
    std::function<void(int, double)> walk = [&](int v, double length) {
        if (loop1.contains(v)) {
            best = std::min(best, length);
            return;
        }
        used[v] = 1;
        for (int q : mesh.neighbors(v)) {
            if (!used[q] && !loop0.contains(q)) {
                walk(q, length + (mesh.position(q) - mesh.position(v)).norm());
            }
        }
        used[v] = 0;
    };
    for (int s : loop0.vertices) {
        walk(s, 0.0);
    }
    return best;
}

}  // namespace

TEST_SUITE("seam_cut")
{
    TEST_CASE("dumbbell graph: the bridge edge")
    {
        WeightedGraph g(6);
        auto edge = [&](int a, int b, double w) {
            g[a].emplace_back(b, w);
            g[b].emplace_back(a, w);
        };
        edge(0, 1, 1.0);
        edge(1, 2, 1.0);
        edge(2, 0, 1.0);
        edge(3, 4, 1.0);
        edge(4, 5, 1.0);
        edge(5, 3, 1.0);
        edge(2, 3, 0.75);
        const CutSeam seam = shortest_set_path(g, {0, 1, 2}, {3, 4, 5});
        CHECK(seam.path == std::vector<int>{2, 3});
        CHECK(seam.length == 0.75);
    }

    TEST_CASE("disconnected sets give an empty path")
    {
        WeightedGraph g(4);
        g[0].emplace_back(1, 1.0);
        g[1].emplace_back(0, 1.0);
        g[2].emplace_back(3, 1.0);
        g[3].emplace_back(2, 1.0);
        CHECK(shortest_set_path(g, {0}, {3}).path.empty());
    }

    TEST_CASE("intermediate vertices may not lie on either set")
    {
        // 0 - 1 - 2 is short but 1 is a source; the long way round avoids it
        WeightedGraph g(4);
        auto edge = [&](int a, int b, double w) {
            g[a].emplace_back(b, w);
            g[b].emplace_back(a, w);
        };
        edge(0, 1, 1.0);
        edge(1, 2, 1.0);
        edge(0, 3, 5.0);
        edge(3, 2, 5.0);
        const CutSeam seam = shortest_set_path(g, {0, 1}, {2});
        CHECK(seam.path == std::vector<int>{1, 2});
    }

    TEST_CASE("equal-length paths resolve to the lexicographically smallest")
    {
        WeightedGraph g(4);
        auto edge = [&](int a, int b) {
            g[a].emplace_back(b, 1.0);
            g[b].emplace_back(a, 1.0);
        };
        edge(0, 2);
        edge(2, 1);
        edge(0, 3);
        edge(3, 1);
        CHECK(shortest_set_path(g, {0}, {1}).path == std::vector<int>{0, 2, 1});
    }

    TEST_CASE("straight cylinder 6x4: vertical grid line matching exhaustive enumeration")
    {
        const TriMesh mesh = cylinder(6, 4, 3.0);
        const auto loops = extract_boundary_loops(mesh);
        const CutSeam seam = shortest_seam(mesh, loops[0], loops[1]);
        const double brute = exhaustive_seam_length(mesh, loops[0], loops[1]);
        CHECK(seam.length == doctest::Approx(brute).epsilon(1e-14));
        CHECK(seam.length == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(seam.path.size() == 4);
    }

    TEST_CASE("property: seam equals Floyd-Warshall on small graphs")
    {
        for (const TriMesh& mesh : oracle::small_tube_meshes()) {
            REQUIRE(mesh.num_vertices() <= 50);
            const auto loops = extract_boundary_loops(mesh);
            const CutSeam seam = shortest_seam(mesh, loops[0], loops[1]);
            CHECK(seam.length == doctest::Approx(oracle::floyd_warshall_seam_length(mesh, loops[0], loops[1])).epsilon(1e-13));
            CHECK(seam.path == oracle::floyd_warshall_seam_path(mesh, loops[0], loops[1]));
            CHECK(loops[0].contains(seam.path.front()));
            CHECK(loops[1].contains(seam.path.back()));
            for (std::size_t i = 1; i + 1 < seam.path.size(); ++i) {
                CHECK_FALSE(loops[0].contains(seam.path[i]));
                CHECK_FALSE(loops[1].contains(seam.path[i]));
            }
        }
    }

    TEST_CASE("cut 6x4 cylinder: disk with duplicated seam")
    {
        const TriMesh mesh = cylinder(6, 4);
        const auto loops = extract_boundary_loops(mesh);
        const CutSeam seam = shortest_seam(mesh, loops[0], loops[1]);
        const CutMesh cut = cut_along_seam(mesh, seam);
        CHECK(cut.mesh.num_vertices() == mesh.num_vertices() + static_cast<int>(seam.path.size()));
        CHECK(cut.mesh.euler_characteristic() == 1);
        CHECK(extract_boundary_loops(cut.mesh).size() == 1);
        CHECK(cut.mesh.num_faces() == mesh.num_faces());
        for (const auto& [a, b] : cut.twins) {
            CHECK(cut.mesh.position(a) == cut.mesh.position(b));
        }
        CHECK(cut.p == seam.path.front());
        CHECK(cut.q == seam.path.back());
        CHECK(cut.original(cut.p_prime) == cut.p);
        CHECK(cut.original(cut.q_prime) == cut.q);
    }

    TEST_CASE("property: cut of every corpus-style mesh is a disk")
    {
        for (const TriMesh& mesh : oracle::small_tube_meshes()) {
            const auto loops = extract_boundary_loops(mesh);
            const CutMesh cut = cut_along_seam(mesh, shortest_seam(mesh, loops[0], loops[1]));
            CHECK(cut.mesh.euler_characteristic() == 1);
            CHECK(extract_boundary_loops(cut.mesh).size() == 1);
        }
    }

    TEST_CASE("loop sides label the two original loops")
    {
        const TriMesh mesh = cylinder(8, 5);
        const auto loops = extract_boundary_loops(mesh);
        const CutMesh cut = cut_along_seam(mesh, shortest_seam(mesh, loops[0], loops[1]));
        CHECK(cut.loop_side[cut.p] == 0);
        CHECK(cut.loop_side[cut.p_prime] == 0);
        CHECK(cut.loop_side[cut.q] == 1);
        CHECK(cut.loop_side[cut.q_prime] == 1);
    }

    TEST_CASE("interior path vertex on a loop is rejected")
    {
        const TriMesh mesh = cylinder(8, 5);
        const auto loops = extract_boundary_loops(mesh);
        CutSeam seam = shortest_seam(mesh, loops[0], loops[1]);
        CutSeam bad;
        bad.path = {seam.path[0], seam.path[1], seam.path[0]};
        CHECK_THROWS_AS(cut_along_seam(mesh, bad), MeshError);
    }

    TEST_CASE("glue: constant field and periodic identification")
    {
        const TriMesh mesh = cylinder(8, 5);
        const auto loops = extract_boundary_loops(mesh);
        const CutMesh cut = cut_along_seam(mesh, shortest_seam(mesh, loops[0], loops[1]));
        const Eigen::VectorXd constant = Eigen::VectorXd::Constant(cut.mesh.num_vertices(), 2.5);
        CHECK((glue(cut, constant, Periodicity::none).array() == 2.5).all());

        Eigen::VectorXd u = Eigen::VectorXd::Constant(cut.mesh.num_vertices(), 1.0);
        for (const auto& [a, b] : cut.twins) {
            u[a] = 0.0;
            u[b] = two_pi<double>;
        }
        const Eigen::VectorXd glued = glue(cut, u, Periodicity::two_pi);
        for (int v : cut.seam) {
            CHECK(glued[v] == 0.0);
        }
    }

    TEST_CASE("glue: twin disagreement is an error")
    {
        const TriMesh mesh = cylinder(8, 5);
        const auto loops = extract_boundary_loops(mesh);
        const CutMesh cut = cut_along_seam(mesh, shortest_seam(mesh, loops[0], loops[1]));
        Eigen::VectorXd z = Eigen::VectorXd::Zero(cut.mesh.num_vertices());
        z[cut.twins[1].second] = 1e-3;
        CHECK_THROWS(glue(cut, z, Periodicity::none));
    }

    TEST_CASE("property: glue after unglue is the identity on coordinates")
    {
        for (const TriMesh& mesh : oracle::small_tube_meshes()) {
            const auto loops = extract_boundary_loops(mesh);
            const CutMesh cut = cut_along_seam(mesh, shortest_seam(mesh, loops[0], loops[1]));
            for (int axis = 0; axis < 3; ++axis) {
                const Eigen::VectorXd field = mesh.vertices().col(axis);
                CHECK(glue(cut, unglue(cut, field), Periodicity::none) == field);
            }
        }
    }
}
