#include "tubeparam/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tubeparam {

namespace {

struct RawMesh
{
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Eigen::Vector3i> triangles;
};

void add_polygon(RawMesh& raw, const std::vector<int>& poly, const std::string& where)
{
    if (poly.size() < 3) {
        throw MeshError(where + ": polygon with fewer than 3 vertices");
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        raw.triangles.emplace_back(poly[0], poly[k], poly[k + 1]);
    }
}

TriMesh finish(const RawMesh& raw)
{
    Vertices V(static_cast<Eigen::Index>(raw.vertices.size()), 3);
    for (std::size_t i = 0; i < raw.vertices.size(); ++i) {
        V.row(static_cast<Eigen::Index>(i)) = raw.vertices[i].transpose();
    }
    Faces F(static_cast<Eigen::Index>(raw.triangles.size()), 3);
    for (std::size_t i = 0; i < raw.triangles.size(); ++i) {
        const auto& t = raw.triangles[i];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= V.rows()) {
                throw MeshError("face " + std::to_string(i) + " references missing vertex");
            }
        }
        F.row(static_cast<Eigen::Index>(i)) = t.transpose();
    }
    return make_compacted_mesh(V, F);
}

std::string next_content_line(std::istream& in)
{
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return line;
        }
    }
    throw MeshError("OFF: unexpected end of file");
}

}  // namespace

TriMesh make_compacted_mesh(const Vertices& vertices, const Faces& faces)
{
    std::vector<int> remap(vertices.rows(), -1);
    int next = 0;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int v = faces(f, k);
            if (v >= 0 && v < vertices.rows() && remap[v] < 0) {
                remap[v] = next++;
            }
        }
    }
    // Keep the original relative order of referenced vertices.
    next = 0;
    for (auto& r : remap) {
        if (r >= 0) {
            r = next++;
        }
    }
    Vertices V(next, 3);
    for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
        if (remap[v] >= 0) {
            V.row(remap[v]) = vertices.row(v);
        }
    }
    Faces F(faces.rows(), 3);
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            F(f, k) = remap.at(faces(f, k));
        }
    }
    return TriMesh(std::move(V), std::move(F));
}

MeshFormat format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") {
        return MeshFormat::obj;
    }
    if (ext == ".off") {
        return MeshFormat::off;
    }
    throw MeshError("unsupported mesh format '" + ext + "' (expected .obj or .off)");
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    return load_mesh(path, format_from_path(path));
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    std::ifstream in(path);
    if (!in) {
        throw MeshError("cannot open " + path.string());
    }
    try {
        return format == MeshFormat::obj ? read_obj(in) : read_off(in);
    } catch (const MeshError& e) {
        throw MeshError(path.string() + ": " + e.what());
    }
}

TriMesh read_obj(std::istream& in)
{
    RawMesh raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') {
            continue;
        }
        const std::string where = "OBJ line " + std::to_string(line_no);
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(ls >> p.x() >> p.y() >> p.z())) {
                throw MeshError(where + ": malformed vertex");
            }
            raw.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token) {
                // v, v/vt, v//vn, v/vt/vn
                const auto slash = token.find('/');
                int idx = 0;
                try {
                    idx = std::stoi(token.substr(0, slash));
                } catch (const std::exception&) {
                    throw MeshError(where + ": malformed face index '" + token + "'");
                }
                if (idx < 0) {
                    idx = static_cast<int>(raw.vertices.size()) + idx + 1;
                }
                if (idx <= 0) {
                    throw MeshError(where + ": invalid face index '" + token + "'");
                }
                poly.push_back(idx - 1);
            }
            add_polygon(raw, poly, where);
        }
    }
    if (raw.triangles.empty()) {
        throw MeshError("mesh has zero faces");
    }
    return finish(raw);
}

TriMesh read_off(std::istream& in)
{
    std::istringstream header(next_content_line(in));
    std::string magic;
    header >> magic;
    if (magic.rfind("OFF", 0) != 0) {
        throw MeshError("OFF: missing header");
    }
    long nv = -1, nf = -1, ne = 0;
    if (!(header >> nv)) {
        std::istringstream counts(next_content_line(in));
        counts >> nv >> nf >> ne;
    } else {
        header >> nf >> ne;
    }
    if (nv < 0 || nf < 0) {
        throw MeshError("OFF: malformed counts");
    }
    RawMesh raw;
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in));
        Eigen::Vector3d p;
        if (!(ls >> p.x() >> p.y() >> p.z())) {
            throw MeshError("OFF: malformed vertex " + std::to_string(i));
        }
        raw.vertices.push_back(p);
    }
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        int n = 0;
        ls >> n;
        std::vector<int> poly(std::max(n, 0));
        for (auto& v : poly) {
            if (!(ls >> v)) {
                throw MeshError("OFF: malformed face " + std::to_string(i));
            }
        }
        add_polygon(raw, poly, "OFF face " + std::to_string(i));
    }
    if (raw.triangles.empty()) {
        throw MeshError("mesh has zero faces");
    }
    return finish(raw);
}

void save_mesh(const std::filesystem::path& path, const Vertices& vertices, const Faces& faces)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    if (format_from_path(path) == MeshFormat::obj) {
        write_obj(out, vertices, faces);
    } else {
        write_off(out, vertices, faces);
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

void write_obj(std::ostream& out, const Vertices& vertices, const Faces& faces)
{
    out << std::setprecision(9);
    for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
        out << "v " << vertices(v, 0) << ' ' << vertices(v, 1) << ' ' << vertices(v, 2) << '\n';
    }
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        out << "f " << faces(f, 0) + 1 << ' ' << faces(f, 1) + 1 << ' ' << faces(f, 2) + 1 << '\n';
    }
}

void write_off(std::ostream& out, const Vertices& vertices, const Faces& faces)
{
    out << std::setprecision(9);
    out << "OFF\n" << vertices.rows() << ' ' << faces.rows() << " 0\n";
    for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
        out << vertices(v, 0) << ' ' << vertices(v, 1) << ' ' << vertices(v, 2) << '\n';
    }
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        out << "3 " << faces(f, 0) << ' ' << faces(f, 1) << ' ' << faces(f, 2) << '\n';
    }
}

}  // namespace tubeparam
