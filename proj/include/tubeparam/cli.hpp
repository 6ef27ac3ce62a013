#pragma once

#include "tubeparam/bending.hpp"
#include "tubeparam/free_boundary.hpp"
#include "tubeparam/metrics.hpp"
#include "tubeparam/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tubeparam {

enum class PipelineMode { fixed, free };

struct RunConfig
{
    std::vector<std::filesystem::path> inputs;
    PipelineMode mode = PipelineMode::fixed;
    double d = 0.05;
    ExtensionConfig extension;
    /// Empty for no bending.
    std::optional<BendMode> bend;
    double rho = 5.0;
    std::filesystem::path out = "out";
    ReportFormat report = ReportFormat::csv;
    bool strict_mu = false;
    /// Worker threads for batches (TUBEPARAM_THREADS).
    int threads = 1;
};

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMeshFailed = 1;
inline constexpr int kExitConfig = 2;

/// Worker count from TUBEPARAM_THREADS (at least 1).
int threads_from_env();

/// A mesh to process: loaded from a file or generated from a spec.
struct MeshSource
{
    std::string id;
    std::filesystem::path path;
    std::optional<TubeSpec> spec;
};

/// Expands input paths; a .json input is read as a corpus manifest.
std::vector<MeshSource> expand_inputs(const std::vector<std::filesystem::path>& inputs);

struct MeshOutcome
{
    std::vector<ReportRow> rows;
    std::string error;
    bool ok() const { return error.empty(); }
};

/// Runs the pipeline on one mesh and writes its artifacts into config.out.
MeshOutcome process_mesh(const MeshSource& source, const RunConfig& config);

int cmd_param(const RunConfig& config);

struct BendConfig
{
    std::filesystem::path mesh;
    std::filesystem::path coords;
    std::optional<BendMode> mode = BendMode::minor;
    double rho = 5.0;
    std::filesystem::path out = "out";
    ReportFormat report = ReportFormat::csv;
};

int cmd_bend(const BendConfig& config);

int cmd_synth(const std::optional<std::filesystem::path>& manifest, const std::filesystem::path& out);

/// Tube coordinates saved next to a parameterized mesh.
void write_tube_sidecar(const std::filesystem::path& path, const TubeCoords& tube, const FixedDiagnostics& diag,
                        const std::string& mesh_id);
TubeCoords read_tube_sidecar(const std::filesystem::path& path);

/// Parses arguments and dispatches; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace tubeparam
