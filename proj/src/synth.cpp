#include "tubeparam/synth.hpp"

#include "tubeparam/geometry.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tubeparam {

namespace {

using nlohmann::ordered_json;

struct Frame
{
    Eigen::Vector3d center;
    Eigen::Vector3d normal;
    Eigen::Vector3d binormal;
};

Frame centerline(const TubeSpec& spec, double t)
{
    if (spec.family == TubeFamily::bent && spec.bend_angle != 0.0) {
        const double beta = spec.bend_angle;
        const double rho = spec.height / beta;
        const double a = beta * t;
        return {{rho * (1.0 - std::cos(a)), 0.0, rho * std::sin(a)},
                {std::cos(a), 0.0, -std::sin(a)},
                {0.0, 1.0, 0.0}};
    }
    return {{0.0, 0.0, spec.height * t}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
}

double radius_at(const TubeSpec& spec, double t)
{
    switch (spec.family) {
    case TubeFamily::tapered:
        return spec.radius * (1.0 + (spec.taper - 1.0) * t);
    case TubeFamily::wavy:
        return spec.radius * (1.0 + spec.wave_amplitude * std::sin(two_pi<double> * spec.wave_frequency * t));
    default:
        return spec.radius;
    }
}

Eigen::Vector3d face_cross(const Vertices& V, const Faces& F, int f)
{
    const Eigen::Vector3d a = V.row(F(f, 0)).transpose();
    const Eigen::Vector3d b = V.row(F(f, 1)).transpose();
    const Eigen::Vector3d c = V.row(F(f, 2)).transpose();
    return (b - a).cross(c - a);
}

ordered_json spec_to_json(const TubeSpec& s)
{
    return {{"id", s.id},
            {"family", to_string(s.family)},
            {"n_u", s.n_u},
            {"n_z", s.n_z},
            {"height", s.height},
            {"radius", s.radius},
            {"bend_angle", s.bend_angle},
            {"taper", s.taper},
            {"wave_amplitude", s.wave_amplitude},
            {"wave_frequency", s.wave_frequency},
            {"noise", s.noise},
            {"seed", s.seed}};
}

TubeSpec spec_from_json(const ordered_json& j, std::size_t index)
{
    TubeSpec s;
    const std::string label = "manifest record " + std::to_string(index);
    try {
        s.id = j.at("id").get<std::string>();
        s.family = tube_family_from_string(j.at("family").get<std::string>());
        s.n_u = j.value("n_u", s.n_u);
        s.n_z = j.value("n_z", s.n_z);
        s.height = j.value("height", s.height);
        s.radius = j.value("radius", s.radius);
        s.bend_angle = j.value("bend_angle", s.bend_angle);
        s.taper = j.value("taper", s.taper);
        s.wave_amplitude = j.value("wave_amplitude", s.wave_amplitude);
        s.wave_frequency = j.value("wave_frequency", s.wave_frequency);
        s.noise = j.value("noise", s.noise);
        s.seed = j.value("seed", s.seed);
    } catch (const std::exception& e) {
        const std::string id = j.is_object() && j.contains("id") && j["id"].is_string()
                                   ? " ('" + j["id"].get<std::string>() + "')"
                                   : "";
        throw std::invalid_argument(label + id + ": " + e.what());
    }
    s.validate();
    return s;
}

}  // namespace

TubeFamily tube_family_from_string(const std::string& name)
{
    if (name == "straight") {
        return TubeFamily::straight;
    }
    if (name == "bent") {
        return TubeFamily::bent;
    }
    if (name == "tapered") {
        return TubeFamily::tapered;
    }
    if (name == "wavy") {
        return TubeFamily::wavy;
    }
    throw std::invalid_argument("unknown tube family '" + name + "'");
}

std::string to_string(TubeFamily family)
{
    switch (family) {
    case TubeFamily::straight:
        return "straight";
    case TubeFamily::bent:
        return "bent";
    case TubeFamily::tapered:
        return "tapered";
    case TubeFamily::wavy:
        return "wavy";
    }
    return "straight";
}

void TubeSpec::validate() const
{
    auto fail = [&](const std::string& what) { throw std::invalid_argument("tube spec '" + id + "': " + what); };
    if (n_u < 8) {
        fail("n_u must be at least 8");
    }
    if (n_z < 4) {
        fail("n_z must be at least 4");
    }
    if (!(radius > 0.0) || !(height > 0.0)) {
        fail("radius and height must be positive");
    }
    if (!(noise >= 0.0)) {
        fail("noise must be non-negative");
    }
    if (family == TubeFamily::bent && bend_angle != 0.0
        && !(std::abs(bend_angle) < std::numbers::pi && radius < height / std::abs(bend_angle))) {
        fail("bend angle too large for the radius");
    }
    if (family == TubeFamily::tapered && !(taper > 0.0)) {
        fail("taper ratio must be positive");
    }
    if (family == TubeFamily::wavy && !(std::abs(wave_amplitude) < 1.0)) {
        fail("wave amplitude must be below 1");
    }
}

TriMesh generate_tube(const TubeSpec& spec)
{
    spec.validate();
    const int nu = spec.n_u, nz = spec.n_z;
    Vertices V(nu * nz, 3);
    for (int j = 0; j < nz; ++j) {
        const double t = static_cast<double>(j) / (nz - 1);
        const Frame frame = centerline(spec, t);
        const double r = radius_at(spec, t);
        for (int i = 0; i < nu; ++i) {
            const double u = two_pi<double> * i / nu;
            V.row(j * nu + i) = (frame.center + r * (std::cos(u) * frame.normal + std::sin(u) * frame.binormal)).transpose();
        }
    }
    Faces F(2 * nu * (nz - 1), 3);
    int f = 0;
    for (int j = 0; j + 1 < nz; ++j) {
        for (int i = 0; i < nu; ++i) {
            const int v00 = j * nu + i, v10 = j * nu + (i + 1) % nu;
            const int v01 = v00 + nu, v11 = v10 + nu;
            F.row(f++) << v00, v10, v11;
            F.row(f++) << v00, v11, v01;
        }
    }
    return TriMesh(std::move(V), std::move(F));
}

TriMesh add_boundary_noise(const TriMesh& mesh, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("add_boundary_noise: sigma must be non-negative");
    }
    if (sigma == 0.0) {
        return mesh;
    }
    const auto loops = extract_boundary_loops(mesh);
    double total = 0.0;
    int edges = 0;
    for (const auto& loop : loops) {
        total += loop.length();
        edges += loop.size();
    }
    if (edges == 0) {
        return mesh;
    }
    const double max_step = sigma * total / edges;

    std::vector<int> boundary;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (mesh.is_boundary_vertex(v)) {
            boundary.push_back(v);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::Vector3d> offsets;
    offsets.reserve(boundary.size());
    for (int v : boundary) {
        Eigen::Vector3d n = Eigen::Vector3d::Zero();
        for (int f : mesh.incident_faces(v)) {
            n += face_cross(mesh.vertices(), mesh.faces(), f);
        }
        n.normalize();
        Eigen::Index least = 0;
        n.cwiseAbs().minCoeff(&least);
        const Eigen::Vector3d axis = Eigen::Vector3d::Unit(least);
        const Eigen::Vector3d e1 = n.cross(axis).normalized();
        const Eigen::Vector3d e2 = n.cross(e1);
        const double angle = two_pi<double> * unit(rng);
        const double magnitude = max_step * unit(rng);
        offsets.push_back(magnitude * (std::cos(angle) * e1 + std::sin(angle) * e2));
    }

    std::vector<int> touched;
    for (int v : boundary) {
        for (int f : mesh.incident_faces(v)) {
            touched.push_back(f);
        }
    }
    double scale = 1.0;
    for (int attempt = 0; attempt <= 5; ++attempt, scale *= 0.5) {
        Vertices V = mesh.vertices();
        for (std::size_t k = 0; k < boundary.size(); ++k) {
            V.row(boundary[k]) += scale * offsets[k].transpose();
        }
        bool ok = true;
        for (int f : touched) {
            const Eigen::Vector3d before = face_cross(mesh.vertices(), mesh.faces(), f);
            const Eigen::Vector3d after = face_cross(V, mesh.faces(), f);
            if (!(after.dot(before) > 1e-3 * before.squaredNorm())) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return TriMesh(std::move(V), mesh.faces());
        }
    }
    throw MeshError("add_boundary_noise: displacement flips boundary faces even after halving 5 times");
}

TriMesh make_tube(const TubeSpec& spec)
{
    TriMesh mesh = generate_tube(spec);
    if (spec.noise > 0.0) {
        return add_boundary_noise(mesh, spec.noise, spec.seed);
    }
    return mesh;
}

std::vector<TubeSpec> default_corpus()
{
    constexpr double pi = std::numbers::pi;
    const std::array<double, 3> heights{2.5, 3.0, 3.5};
    const std::array<double, 3> bends{pi / 6, pi / 4, pi / 3};
    const std::array<double, 3> tapers{0.6, 0.75, 1.4};
    const std::array<double, 3> amplitudes{0.1, 0.15, 0.2};
    const std::array<double, 3> frequencies{1.0, 1.5, 2.0};
    const std::array<double, 4> noise_levels{0.2, 0.3, 0.4, 0.5};
    const std::array<std::pair<TubeFamily, int>, 4> noisy_counts{
        {{TubeFamily::straight, 7}, {TubeFamily::bent, 8}, {TubeFamily::tapered, 7}, {TubeFamily::wavy, 8}}};

    std::vector<TubeSpec> corpus;
    auto make = [&](TubeFamily family, int k, bool noisy) {
        TubeSpec s;
        s.family = family;
        s.height = heights[k % 3];
        s.radius = 1.0;
        // 5760 vertices per mesh
        s.n_u = 96;
        s.n_z = 60;
        switch (family) {
        case TubeFamily::bent:
            s.bend_angle = bends[k % 3];
            break;
        case TubeFamily::tapered:
            s.taper = tapers[k % 3];
            break;
        case TubeFamily::wavy:
            s.wave_amplitude = amplitudes[k % 3];
            s.wave_frequency = frequencies[(k / 3) % 3];
            break;
        default:
            break;
        }
        s.seed = 1000 + corpus.size();
        if (noisy) {
            s.noise = noise_levels[k % 4];
        }
        char id[32];
        std::snprintf(id, sizeof id, "%s_%s%02d", to_string(family).c_str(), noisy ? "noisy" : "clean", k);
        s.id = id;
        corpus.push_back(s);
    };
    for (auto family : {TubeFamily::straight, TubeFamily::bent, TubeFamily::tapered, TubeFamily::wavy}) {
        for (int k = 0; k < 3; ++k) {
            make(family, k, false);
        }
    }
    for (auto [family, count] : noisy_counts) {
        for (int k = 0; k < count; ++k) {
            make(family, k, true);
        }
    }
    return corpus;
}

std::string corpus_to_json(const std::vector<TubeSpec>& specs)
{
    ordered_json doc = ordered_json::array();
    for (const auto& s : specs) {
        doc.push_back(spec_to_json(s));
    }
    return doc.dump(2) + "\n";
}

std::vector<TubeSpec> corpus_from_json(const std::string& text)
{
    const ordered_json doc = ordered_json::parse(text);
    const ordered_json& list = doc.is_object() && doc.contains("meshes") ? doc["meshes"] : doc;
    if (!list.is_array()) {
        throw std::invalid_argument("manifest must be a JSON array of tube specs");
    }
    std::vector<TubeSpec> specs;
    for (std::size_t i = 0; i < list.size(); ++i) {
        specs.push_back(spec_from_json(list[i], i));
    }
    return specs;
}

std::vector<TubeSpec> load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read manifest " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return corpus_from_json(buffer.str());
}

}  // namespace tubeparam
