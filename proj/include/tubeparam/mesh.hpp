#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tubeparam {

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
/// Per-vertex planar coordinates (disk, rectangle or annulus image).
using PlanarEmbedding = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Raised for invalid or unsupported mesh input.
class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Indexed triangle surface with derived adjacency.
///
/// The constructor validates the input: every face has three distinct valid
/// indices, every vertex is referenced, the surface is edge- and
/// vertex-manifold and consistently oriented. Instances are immutable.
class TriMesh
{
public:
    TriMesh(Vertices vertices, Faces faces);

    const Vertices& vertices() const { return vertices_; }
    const Faces& faces() const { return faces_; }
    int num_vertices() const { return static_cast<int>(vertices_.rows()); }
    int num_faces() const { return static_cast<int>(faces_.rows()); }
    int num_edges() const { return num_edges_; }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

    Eigen::Vector3d position(int v) const { return vertices_.row(v).transpose(); }

    /// One-ring vertex neighbours, sorted ascending.
    const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
    const std::vector<int>& incident_faces(int v) const { return incident_faces_[v]; }

    /// Face owning the directed edge a->b, or -1.
    int face_of_halfedge(int a, int b) const;
    bool is_boundary_vertex(int v) const { return boundary_next_[v] >= 0; }
    /// Successor of `v` along its boundary loop (surface on the left), or -1.
    int boundary_next(int v) const { return boundary_next_[v]; }

private:
    static std::uint64_t key(int a, int b)
    {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32)
               | static_cast<std::uint32_t>(b);
    }

    Vertices vertices_;
    Faces faces_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<std::vector<int>> incident_faces_;
    std::unordered_map<std::uint64_t, int> halfedges_;
    std::vector<int> boundary_next_;
    int num_edges_ = 0;
};

struct BoundaryLoop
{
    /// Cyclically ordered; traversal keeps the surface on the left.
    std::vector<int> vertices;
    /// edge_lengths[i] = |p[i+1] - p[i]| with cyclic indexing.
    std::vector<double> edge_lengths;

    int size() const { return static_cast<int>(vertices.size()); }
    double length() const;
    bool contains(int v) const;
};

/// Boundary loops sorted by descending total length. Empty for closed meshes.
std::vector<BoundaryLoop> extract_boundary_loops(const TriMesh& mesh);

/// Face areas.
Eigen::VectorXd face_areas(const TriMesh& mesh);

/// Throws MeshError naming the first face with area < 1e-12 x mean area.
void check_nondegenerate(const TriMesh& mesh);

/// Symmetric stiffness form W with W_ij = (cot a_ij + cot b_ij) / 2 and
/// W_ii = -sum_j W_ij.
SparseMatrix cotan_stiffness(const TriMesh& mesh);

/// One-third one-ring areas A_i.
Eigen::VectorXd vertex_areas(const TriMesh& mesh);

/// Cotangent Laplacian L = diag(1 / A_i) W.
SparseMatrix cotan_laplacian(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// I/O

enum class MeshFormat { obj, off };

/// Deduce the format from the file extension.
MeshFormat format_from_path(const std::filesystem::path& path);

/// Polygons are fan-triangulated and unreferenced vertices dropped.
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh read_obj(std::istream& in);
TriMesh read_off(std::istream& in);

/// Builds a TriMesh after dropping vertices no face references.
TriMesh make_compacted_mesh(const Vertices& vertices, const Faces& faces);

void save_mesh(const std::filesystem::path& path, const Vertices& vertices, const Faces& faces);
void write_obj(std::ostream& out, const Vertices& vertices, const Faces& faces);
void write_off(std::ostream& out, const Vertices& vertices, const Faces& faces);

}  // namespace tubeparam
