#pragma once

#include "tubeparam/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tubeparam {

enum class TubeFamily { straight, bent, tapered, wavy };

TubeFamily tube_family_from_string(const std::string& name);
std::string to_string(TubeFamily family);

struct TubeSpec
{
    std::string id;
    TubeFamily family = TubeFamily::straight;
    int n_u = 48;
    int n_z = 24;
    double height = 3.0;
    double radius = 1.0;
    /// Total turning angle of the centerline arc (bent), radians.
    double bend_angle = 0.0;
    /// End radius over start radius (tapered).
    double taper = 1.0;
    double wave_amplitude = 0.0;
    double wave_frequency = 1.0;
    /// Boundary noise as a fraction of the mean boundary edge length.
    double noise = 0.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the spec on bad parameters.
    void validate() const;
};

/// n_u x n_z grid around the family's centerline, faces oriented outward.
TriMesh generate_tube(const TubeSpec& spec);

/// Tangent-plane displacement of every boundary vertex by at most
/// sigma * (mean boundary edge length). Interior vertices are untouched.
TriMesh add_boundary_noise(const TriMesh& mesh, double sigma, std::uint64_t seed);

/// generate_tube followed by add_boundary_noise when spec.noise > 0.
TriMesh make_tube(const TubeSpec& spec);

/// The 42-mesh benchmark corpus: 12 clean and 30 noisy specs.
std::vector<TubeSpec> default_corpus();

std::string corpus_to_json(const std::vector<TubeSpec>& specs);
std::vector<TubeSpec> corpus_from_json(const std::string& text);
std::vector<TubeSpec> load_manifest(const std::filesystem::path& path);

}  // namespace tubeparam
