#include "tubeparam/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace tubeparam;

namespace {

TubeSpec spec_of(TubeFamily family)
{
    TubeSpec s;
    s.id = "t";
    s.family = family;
    s.n_u = 16;
    s.n_z = 8;
    return s;
}

}  // namespace

TEST_SUITE("synth")
{
    TEST_CASE("grid counts and topology of every family")
    {
        for (TubeFamily family : {TubeFamily::straight, TubeFamily::bent, TubeFamily::tapered, TubeFamily::wavy}) {
            TubeSpec s = spec_of(family);
            s.bend_angle = 1.0;
            s.taper = 0.5;
            s.wave_amplitude = 0.1;
            const TriMesh mesh = generate_tube(s);
            CHECK(mesh.num_vertices() == 128);
            CHECK(mesh.num_faces() == 224);
            CHECK(mesh.euler_characteristic() == 0);
            CHECK(extract_boundary_loops(mesh).size() == 2);
            CHECK_NOTHROW(check_nondegenerate(mesh));
        }
    }

    TEST_CASE("straight tube lies on the cylinder")
    {
        const TriMesh mesh = generate_tube(spec_of(TubeFamily::straight));
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            CHECK(mesh.vertices().row(v).head<2>().norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(mesh.vertices().col(2).minCoeff() == doctest::Approx(0.0));
        CHECK(mesh.vertices().col(2).maxCoeff() == doctest::Approx(3.0));
    }

    TEST_CASE("trivial family parameters reproduce the straight tube")
    {
        const Vertices straight = generate_tube(spec_of(TubeFamily::straight)).vertices();
        TubeSpec tapered = spec_of(TubeFamily::tapered);
        tapered.taper = 1.0;
        CHECK(generate_tube(tapered).vertices() == straight);
        TubeSpec wavy = spec_of(TubeFamily::wavy);
        wavy.wave_amplitude = 0.0;
        CHECK(generate_tube(wavy).vertices() == straight);
    }

    TEST_CASE("boundary noise")
    {
        const TriMesh mesh = generate_tube(spec_of(TubeFamily::straight));
        CHECK(add_boundary_noise(mesh, 0.0, 3).vertices() == mesh.vertices());
        const TriMesh a = add_boundary_noise(mesh, 0.05, 3);
        const TriMesh b = add_boundary_noise(mesh, 0.05, 3);
        CHECK(a.vertices() == b.vertices());
        CHECK(a.faces() == mesh.faces());
        CHECK(add_boundary_noise(mesh, 0.05, 4).vertices() != a.vertices());
        const double bound = 0.05 * 2.0 * std::sin(std::numbers::pi / 16) + 1e-12;
        int moved = 0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double shift = (a.vertices().row(v) - mesh.vertices().row(v)).norm();
            if (mesh.is_boundary_vertex(v)) {
                CHECK(shift <= bound);
                moved += shift > 0.0;
            } else {
                CHECK(shift == 0.0);
            }
        }
        CHECK(moved > 0);
        CHECK_THROWS_AS(add_boundary_noise(mesh, -1.0, 0), std::invalid_argument);
    }

    TEST_CASE("default corpus composition")
    {
        const auto corpus = default_corpus();
        REQUIRE(corpus.size() == 42);
        const auto clean = std::count_if(corpus.begin(), corpus.end(), [](const TubeSpec& s) { return s.noise == 0.0; });
        CHECK(clean == 12);
        std::vector<std::string> ids;
        for (const auto& s : corpus) {
            CHECK_NOTHROW(s.validate());
            ids.push_back(s.id);
        }
        std::sort(ids.begin(), ids.end());
        CHECK(std::unique(ids.begin(), ids.end()) == ids.end());
    }

    TEST_CASE("manifest JSON round trip")
    {
        const auto corpus = default_corpus();
        const auto back = corpus_from_json(corpus_to_json(corpus));
        REQUIRE(back.size() == corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            CHECK(make_tube(back[i]).vertices() == make_tube(corpus[i]).vertices());
        }
        CHECK(corpus_to_json(back) == corpus_to_json(corpus));
    }

    TEST_CASE("invalid specs are rejected by name")
    {
        CHECK_THROWS_WITH_AS(tube_family_from_string("spiral"), doctest::Contains("spiral"), std::invalid_argument);
        CHECK_THROWS_AS(corpus_from_json(R"([{"id": "x", "family": "spiral"}])"), std::invalid_argument);
        TubeSpec s = spec_of(TubeFamily::straight);
        s.n_u = 2;
        CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("'t'"), std::invalid_argument);
        CHECK_THROWS_AS(corpus_from_json("{}"), std::invalid_argument);
    }
}
