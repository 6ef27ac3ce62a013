#include "tubeparam/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace tubeparam {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

ReportRow error_row(const std::string& id, const std::string& stage)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {id, 0, 0, nan, nan, nan, 0, nan, nan, stage};
}

void check_rho(BendMode mode, double rho)
{
    if (mode == BendMode::major && !(rho > 0.0 && rho < 1.0)) {
        throw ConfigError("--rho must lie in (0, 1) for major bending");
    }
    if (mode == BendMode::minor && !(rho > 1.0 && std::isfinite(rho))) {
        throw ConfigError("--rho must be greater than 1 for minor bending");
    }
}

std::optional<BendMode> parse_bend(const std::string& name)
{
    if (name == "none") {
        return std::nullopt;
    }
    return bend_mode_from_string(name);
}

void write_face_csv(const fs::path& path, const DistortionReport& report)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.precision(10);
    out << "face,mean_deg\n";
    for (Eigen::Index f = 0; f < report.face_mean_deg.size(); ++f) {
        out << f << ',' << report.face_mean_deg[f] << '\n';
    }
}

/// Bent positions and the row of distortion added on top of the tube map.
ReportRow bend_row(const std::string& id, const TriMesh& mesh, const TubeCoords& tube, BendMode mode, double rho,
                   const fs::path& out_dir)
{
    const double delta_z = tube.z.maxCoeff() - tube.z.minCoeff();
    const double R = admissible_radius(mode, delta_z, rho);
    const BendResult bent = bend(mode, tube, R);
    save_mesh(out_dir / (id + ".bent.obj"), bent.positions, mesh.faces());
    const DistortionReport base = angular_distortion(mesh, tube.positions());
    const DistortionReport after = angular_distortion(mesh, bent.positions);
    ReportRow row = make_report_row(id, mesh, after, "bend_" + to_string(mode) + "_added");
    row.mean_deg = after.mean_deg - base.mean_deg;
    row.median_deg = after.median_deg - base.median_deg;
    row.max_deg = after.max_deg - base.max_deg;
    return row;
}

void write_rows(const fs::path& out_dir, const std::vector<ReportRow>& rows, ReportFormat format)
{
    emit_report(out_dir / (format == ReportFormat::csv ? "report.csv" : "report.json"), rows, format);
}

template <typename Task>
void run_parallel(std::size_t count, int threads, Task task)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                task(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace

int threads_from_env()
{
    const char* value = std::getenv("TUBEPARAM_THREADS");
    if (!value || !*value) {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (*end != '\0' || n < 1) {
        throw ConfigError("TUBEPARAM_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(n, 256));
}

std::vector<MeshSource> expand_inputs(const std::vector<fs::path>& inputs)
{
    std::vector<MeshSource> sources;
    for (const auto& path : inputs) {
        if (path.extension() == ".json") {
            for (auto& spec : load_manifest(path)) {
                sources.push_back({spec.id, {}, spec});
            }
        } else {
            sources.push_back({path.stem().string(), path, std::nullopt});
        }
    }
    return sources;
}

MeshOutcome process_mesh(const MeshSource& source, const RunConfig& config)
{
    MeshOutcome outcome;
    try {
        const TriMesh mesh = source.spec ? make_tube(*source.spec) : load_mesh(source.path);
        const LbsOptions options{config.strict_mu};
        TubeCoords tube;
        FixedDiagnostics diag;
        std::string stage;
        if (config.mode == PipelineMode::fixed) {
            FixedResult result = parameterize_fixed(mesh, config.d, options);
            tube = std::move(result.tube);
            diag = std::move(result.diagnostics);
            stage = "fixed";
        } else {
            FreeResult result = parameterize_free(mesh, config.extension, config.d, options);
            tube = std::move(result.tube);
            diag = std::move(result.diagnostics);
            stage = "free";
        }
        const fs::path& dir = config.out;
        const Vertices positions = tube.positions();
        save_mesh(dir / (source.id + ".tube.obj"), positions, mesh.faces());
        const DistortionReport report = angular_distortion(mesh, positions);
        write_face_csv(dir / (source.id + ".face_distortion.csv"), report);
        write_tube_sidecar(dir / (source.id + ".diag.json"), tube, diag, source.id);

        ReportRow row = make_report_row(source.id, mesh, report, stage);
        row.flipped_faces = diag.flipped_faces;
        // Beltrami summary of the glued parameterization in the (u, z) plane,
        // seam-crossing faces unwrapped.
        PlanarEmbedding uz(tube.size(), 2);
        uz.col(0) = tube.u;
        uz.col(1) = tube.z;
        const Faces& F = mesh.faces();
        FaceFrames frames(F.rows());
        for (Eigen::Index f = 0; f < F.rows(); ++f) {
            for (int k = 0; k < 3; ++k) {
                frames[f].row(k) = uz.row(F(f, k));
            }
            const double base = frames[f](0, 0);
            for (int k = 1; k < 3; ++k) {
                frames[f](k, 0) += two_pi<double> * std::round((base - frames[f](k, 0)) / two_pi<double>);
            }
        }
        const auto summary = beltrami_summary(beltrami_coefficient(face_flatten(mesh), frames), face_areas(mesh));
        row.mu_mean_sq = summary.mean_sq;
        row.mu_max = summary.max;
        outcome.rows.push_back(row);

        if (config.bend) {
            outcome.rows.push_back(bend_row(source.id, mesh, tube, *config.bend, config.rho, dir));
        }
    } catch (const std::exception& e) {
        outcome.error = e.what();
        outcome.rows = {error_row(source.id, "error")};
    }
    return outcome;
}

int cmd_param(const RunConfig& config)
{
    const auto sources = expand_inputs(config.inputs);
    fs::create_directories(config.out);
    std::vector<MeshOutcome> outcomes(sources.size());
    std::mutex log_mutex;
    run_parallel(sources.size(), config.threads, [&](std::size_t i) {
        outcomes[i] = process_mesh(sources[i], config);
        if (!outcomes[i].ok()) {
            std::lock_guard lock(log_mutex);
            std::cerr << sources[i].id << ": " << outcomes[i].error << '\n';
        }
    });
    std::vector<ReportRow> rows;
    bool failed = false;
    for (const auto& o : outcomes) {
        rows.insert(rows.end(), o.rows.begin(), o.rows.end());
        failed = failed || !o.ok();
    }
    write_rows(config.out, rows, config.report);
    return failed ? kExitMeshFailed : kExitOk;
}

int cmd_bend(const BendConfig& config)
{
    const std::string id = config.mesh.stem().string();
    fs::create_directories(config.out);
    std::vector<ReportRow> rows;
    int status = kExitOk;
    try {
        const TriMesh mesh = load_mesh(config.mesh);
        const TubeCoords tube = read_tube_sidecar(config.coords);
        if (tube.size() != mesh.num_vertices()) {
            throw MeshError("tube coordinates have " + std::to_string(tube.size()) + " entries for "
                            + std::to_string(mesh.num_vertices()) + " vertices");
        }
        if (config.mode) {
            rows.push_back(bend_row(id, mesh, tube, *config.mode, config.rho, config.out));
        } else {
            save_mesh(config.out / (id + ".bent.obj"), tube.positions(), mesh.faces());
            rows.push_back(make_report_row(id, mesh, DistortionReport{}, "bend_none_added"));
        }
    } catch (const std::exception& e) {
        std::cerr << id << ": " << e.what() << '\n';
        rows = {error_row(id, "error")};
        status = kExitMeshFailed;
    }
    write_rows(config.out, rows, config.report);
    return status;
}

int cmd_synth(const std::optional<fs::path>& manifest, const fs::path& out)
{
    const std::vector<TubeSpec> specs = manifest ? load_manifest(*manifest) : default_corpus();
    fs::create_directories(out);
    int status = kExitOk;
    for (const auto& spec : specs) {
        try {
            const TriMesh mesh = make_tube(spec);
            save_mesh(out / (spec.id + ".obj"), mesh.vertices(), mesh.faces());
        } catch (const std::exception& e) {
            std::cerr << spec.id << ": " << e.what() << '\n';
            status = kExitMeshFailed;
        }
    }
    std::ofstream(out / "manifest.json") << corpus_to_json(specs);
    return status;
}

void write_tube_sidecar(const fs::path& path, const TubeCoords& tube, const FixedDiagnostics& diag,
                        const std::string& mesh_id)
{
    ordered_json doc;
    doc["mesh_id"] = mesh_id;
    doc["L_star"] = diag.L_star;
    doc["seam_length"] = diag.seam_length;
    doc["distortion_init"] = diag.distortion_init;
    doc["distortion_corrected"] = diag.distortion_corrected;
    doc["flipped_faces"] = diag.flipped_faces;
    doc["strip_faces"] = diag.strip_faces;
    doc["clamped_faces"] = diag.clamped_faces;
    doc["length_at_endpoint"] = diag.length_at_endpoint;
    doc["timings"] = diag.timings;
    doc["u"] = std::vector<double>(tube.u.begin(), tube.u.end());
    doc["z"] = std::vector<double>(tube.z.begin(), tube.z.end());
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

TubeCoords read_tube_sidecar(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read tube coordinates " + path.string());
    }
    const ordered_json doc = ordered_json::parse(in);
    const auto u = doc.at("u").get<std::vector<double>>();
    const auto z = doc.at("z").get<std::vector<double>>();
    if (u.size() != z.size()) {
        throw std::runtime_error("tube coordinates: u and z differ in length");
    }
    TubeCoords tube;
    tube.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    tube.z = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    tube.L_star = doc.at("L_star").get<double>();
    return tube;
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Conformal tube parameterization"};
    app.require_subcommand(1);

    RunConfig run;
    std::vector<std::string> inputs;
    std::string mode = "fixed", bend_name = "none", report = "csv";
    std::optional<double> rho;
    auto* param = app.add_subcommand("param", "Parameterize tube meshes onto S^1 x [0, L]");
    param->add_option("inputs", inputs, "OBJ/OFF meshes or a JSON corpus manifest")->required();
    param->add_option("--mode", mode, "fixed or free boundary")->check(CLI::IsMember({"fixed", "free"}));
    param->add_option("--d", run.d, "Seam strip width in [0, 1]")->capture_default_str();
    param->add_option("--K", run.extension.K, "Extension layers (free mode)")->capture_default_str();
    param->add_option("--tau", run.extension.tau, "Normal blend of the extension direction")->capture_default_str();
    param->add_option("--omega", run.extension.omega, "Ring smoothing weight")->capture_default_str();
    param->add_option("--bend", bend_name, "Bend after parameterizing: none, major or minor")
        ->check(CLI::IsMember({"none", "major", "minor"}));
    param->add_option("--rho", rho, "Dimensionless bending radius");
    param->add_option("--out", run.out, "Output directory")->capture_default_str();
    param->add_option("--report", report, "Report format")->check(CLI::IsMember({"csv", "json"}));
    param->add_flag("--strict-mu", run.strict_mu, "Fail instead of clamping |mu| near 1");

    BendConfig bend_cfg;
    std::string bend_mode = "minor", bend_report = "csv";
    std::optional<double> bend_rho;
    auto* bend_cmd = app.add_subcommand("bend", "Bend a parameterized tube onto a torus");
    bend_cmd->add_option("mesh", bend_cfg.mesh, "Source mesh (OBJ/OFF)")->required();
    bend_cmd->add_option("--coords", bend_cfg.coords, "Tube coordinates (<id>.diag.json)")->required();
    bend_cmd->add_option("--bend", bend_mode, "none, major or minor")->check(CLI::IsMember({"none", "major", "minor"}));
    bend_cmd->add_option("--rho", bend_rho, "Dimensionless bending radius");
    bend_cmd->add_option("--out", bend_cfg.out, "Output directory")->capture_default_str();
    bend_cmd->add_option("--report", bend_report, "Report format")->check(CLI::IsMember({"csv", "json"}));

    std::optional<fs::path> manifest;
    fs::path synth_out = "corpus";
    auto* synth = app.add_subcommand("synth", "Generate the synthetic tube corpus");
    synth->add_option("--manifest", manifest, "JSON list of tube specs (default: built-in 42-mesh corpus)");
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (param->parsed()) {
            run.inputs.assign(inputs.begin(), inputs.end());
            run.mode = mode == "free" ? PipelineMode::free : PipelineMode::fixed;
            run.report = report_format_from_string(report);
            run.bend = parse_bend(bend_name);
            if (!(run.d >= 0.0 && run.d <= 1.0)) {
                throw ConfigError("--d must lie in [0, 1]");
            }
            try {
                run.extension.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            if (run.bend) {
                run.rho = rho.value_or(*run.bend == BendMode::minor ? 5.0 : 0.5);
                check_rho(*run.bend, run.rho);
            }
            run.threads = threads_from_env();
            std::vector<MeshSource> sources;
            try {
                sources = expand_inputs(run.inputs);
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
            return cmd_param(run);
        }
        if (bend_cmd->parsed()) {
            bend_cfg.mode = parse_bend(bend_mode);
            bend_cfg.report = report_format_from_string(bend_report);
            if (bend_cfg.mode) {
                bend_cfg.rho = bend_rho.value_or(*bend_cfg.mode == BendMode::minor ? 5.0 : 0.5);
                check_rho(*bend_cfg.mode, bend_cfg.rho);
            }
            return cmd_bend(bend_cfg);
        }
        if (synth->parsed()) {
            if (manifest) {
                try {
                    load_manifest(*manifest);
                } catch (const std::exception& e) {
                    throw ConfigError(e.what());
                }
            }
            return cmd_synth(manifest, synth_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMeshFailed;
    }
    return kExitConfig;
}

}  // namespace tubeparam
