#pragma once

#include "tubeparam/mesh.hpp"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace tubeparam {

/// Shortest boundary-to-boundary vertex path.
struct CutSeam
{
    /// Starts on the first loop, ends on the second; no interior vertex lies
    /// on either loop.
    std::vector<int> path;
    double length = 0.0;
};

/// Adjacency list with Euclidean edge weights.
using WeightedGraph = std::vector<std::vector<std::pair<int, double>>>;

WeightedGraph edge_length_graph(const TriMesh& mesh);

/// Shortest path from any vertex of `sources` to any vertex of `targets`
/// whose intermediate vertices belong to neither set. Among equal-length
/// paths the lexicographically smallest vertex sequence wins. Returns an
/// empty path when the sets are not connected.
CutSeam shortest_set_path(const WeightedGraph& graph, const std::vector<int>& sources,
                          const std::vector<int>& targets);

/// Multi-source Dijkstra between the two loops (zero-weight virtual sources).
CutSeam shortest_seam(const TriMesh& mesh, const BoundaryLoop& loop0, const BoundaryLoop& loop1);

/// Disk-topology mesh obtained by duplicating the seam vertices.
///
/// Vertices [0, num_original) are the original vertices; seam vertex i has
/// its copy at index num_original + i. Faces to the left of the directed
/// seam (walking from loop 0 to loop 1) use the copies.
struct CutMesh
{
    TriMesh mesh;
    int num_original = 0;
    std::vector<int> seam;  // original indices along the seam
    /// (original-side index, copy-side index) per seam vertex
    std::vector<std::pair<int, int>> twins;
    int p = -1, p_prime = -1;  // seam start (loop 0)
    int q = -1, q_prime = -1;  // seam end (loop 1)
    /// Per cut-mesh vertex: 0 on the loop containing p, 1 on the loop
    /// containing q, -1 otherwise.
    std::vector<int> loop_side;

    /// Original vertex a cut-mesh vertex came from.
    int original(int v) const { return v < num_original ? v : seam[v - num_original]; }
};

CutMesh cut_along_seam(const TriMesh& mesh, const CutSeam& seam);

enum class Periodicity { none, two_pi };

/// Collapse a cut-mesh field back onto the original vertices. Twin values
/// must agree to 1e-8 (modulo 2 pi for periodic fields); periodic results
/// are wrapped into [0, 2 pi).
Eigen::VectorXd glue(const CutMesh& cut, const Eigen::VectorXd& field, Periodicity periodicity);

/// Inverse of glue for untouched fields: copies take their original's value.
Eigen::VectorXd unglue(const CutMesh& cut, const Eigen::VectorXd& field);

}  // namespace tubeparam
