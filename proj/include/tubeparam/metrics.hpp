#pragma once

#include "tubeparam/beltrami.hpp"
#include "tubeparam/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tubeparam {

struct DistortionReport
{
    /// |image angle - source angle| per face corner in degrees, row f holds
    /// the corners of face f. Rows of excluded faces are NaN.
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> corner_deg;
    Eigen::VectorXd face_mean_deg;
    double mean_deg = 0.0;
    double median_deg = 0.0;
    double max_deg = 0.0;
    int flipped_faces = 0;
    /// Faces with a degenerate image, left out of the summaries.
    int excluded_faces = 0;
    double mu_mean_sq = 0.0;
    double mu_max = 0.0;
};

/// Per-corner angular distortion of a 3D image of the source surface.
DistortionReport angular_distortion(const TriMesh& source, const Vertices& image);
/// Same for a planar image; also counts faces with non-positive signed area
/// and fills the Beltrami summary.
DistortionReport angular_distortion(const TriMesh& source, const PlanarEmbedding& image);

struct BeltramiSummary
{
    double mean_sq = 0.0;
    double max = 0.0;
};

/// Area-weighted mean of |mu|^2 and max |mu|.
BeltramiSummary beltrami_summary(const BeltramiField& mu, const Eigen::VectorXd& areas);

double median(std::vector<double> values);

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& name);

struct ReportRow
{
    std::string mesh_id;
    int n_vertices = 0;
    int n_faces = 0;
    double mean_deg = 0.0;
    double median_deg = 0.0;
    double max_deg = 0.0;
    int flipped_faces = 0;
    double mu_mean_sq = 0.0;
    double mu_max = 0.0;
    std::string stage_label;
};

ReportRow make_report_row(const std::string& mesh_id, const TriMesh& mesh, const DistortionReport& report,
                          const std::string& stage_label);

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format);
void emit_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows, ReportFormat format);

/// One value per face, one per line.
void write_face_field(const std::filesystem::path& path, const Eigen::VectorXd& values);

}  // namespace tubeparam
