#include "tubeparam/metrics.hpp"

#include "tubeparam/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace tubeparam {

namespace {

constexpr double kDegenerateImage = 1e-12;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

template <int Dim, typename Image>
DistortionReport distortion_impl(const TriMesh& source, const Image& image, Eigen::VectorXd& image_area)
{
    if (image.rows() != source.num_vertices()) {
        throw std::invalid_argument("angular_distortion: image has " + std::to_string(image.rows())
                                    + " points for " + std::to_string(source.num_vertices()) + " vertices");
    }
    using Point = Eigen::Matrix<double, Dim, 1>;
    const Faces& F = source.faces();
    const Eigen::Index nf = F.rows();

    image_area.resize(nf);
    for (Eigen::Index f = 0; f < nf; ++f) {
        const Point a = image.row(F(f, 0)).transpose();
        const Point b = image.row(F(f, 1)).transpose();
        const Point c = image.row(F(f, 2)).transpose();
        if constexpr (Dim == 2) {
            image_area[f] = signed_area<double>(a, b, c);
        } else {
            image_area[f] = triangle_area<double>(a, b, c);
        }
    }
    const double threshold = kDegenerateImage * image_area.cwiseAbs().mean();

    DistortionReport report;
    report.corner_deg.setConstant(nf, 3, std::numeric_limits<double>::quiet_NaN());
    report.face_mean_deg.setConstant(nf, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> corners;
    corners.reserve(static_cast<std::size_t>(3 * nf));
    for (Eigen::Index f = 0; f < nf; ++f) {
        if (!(std::abs(image_area[f]) > threshold)) {
            ++report.excluded_faces;
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            const int o = F(f, k), i = F(f, (k + 1) % 3), j = F(f, (k + 2) % 3);
            const Eigen::Vector3d so = source.position(o), si = source.position(i), sj = source.position(j);
            const Point io = image.row(o).transpose(), ii = image.row(i).transpose(), ij = image.row(j).transpose();
            const double diff = std::abs(corner_angle(io, ii, ij) - corner_angle(so, si, sj)) * kRadToDeg;
            report.corner_deg(f, k) = diff;
            corners.push_back(diff);
        }
        report.face_mean_deg[f] = report.corner_deg.row(f).mean();
    }
    if (!corners.empty()) {
        double sum = 0.0;
        for (double c : corners) {
            sum += c;
            report.max_deg = std::max(report.max_deg, c);
        }
        report.mean_deg = sum / static_cast<double>(corners.size());
        report.median_deg = median(std::move(corners));
    }
    return report;
}

}  // namespace

DistortionReport angular_distortion(const TriMesh& source, const Vertices& image)
{
    Eigen::VectorXd area;
    return distortion_impl<3>(source, image, area);
}

DistortionReport angular_distortion(const TriMesh& source, const PlanarEmbedding& image)
{
    Eigen::VectorXd area;
    DistortionReport report = distortion_impl<2>(source, image, area);
    report.flipped_faces = static_cast<int>((area.array() <= 0.0).count());
    const auto mu = beltrami_coefficient(face_flatten(source), source.faces(), image);
    const auto summary = beltrami_summary(mu, face_areas(source));
    report.mu_mean_sq = summary.mean_sq;
    report.mu_max = summary.max;
    return report;
}

BeltramiSummary beltrami_summary(const BeltramiField& mu, const Eigen::VectorXd& areas)
{
    if (areas.size() != mu.size()) {
        throw std::invalid_argument("beltrami_summary: one area per face expected");
    }
    BeltramiSummary summary;
    const double total = areas.sum();
    if (mu.size() == 0 || !(total > 0.0)) {
        return summary;
    }
    double weighted = 0.0;
    for (Eigen::Index f = 0; f < mu.mu.size(); ++f) {
        const double m = std::abs(mu.mu[f]);
        weighted += areas[f] * m * m;
        summary.max = std::max(summary.max, m);
    }
    summary.mean_sq = weighted / total;
    return summary;
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

ReportFormat report_format_from_string(const std::string& name)
{
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "json") {
        return ReportFormat::json;
    }
    throw std::invalid_argument("unknown report format '" + name + "' (expected csv or json)");
}

ReportRow make_report_row(const std::string& mesh_id, const TriMesh& mesh, const DistortionReport& report,
                          const std::string& stage_label)
{
    return {mesh_id,         mesh.num_vertices(), mesh.num_faces(),  report.mean_deg,
            report.median_deg, report.max_deg,    report.flipped_faces, report.mu_mean_sq,
            report.mu_max,   stage_label};
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format)
{
    if (format == ReportFormat::json) {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            doc.push_back({{"mesh_id", r.mesh_id},
                           {"n_vertices", r.n_vertices},
                           {"n_faces", r.n_faces},
                           {"mean_deg", r.mean_deg},
                           {"median_deg", r.median_deg},
                           {"max_deg", r.max_deg},
                           {"flipped_faces", r.flipped_faces},
                           {"mu_mean_sq", r.mu_mean_sq},
                           {"mu_max", r.mu_max},
                           {"stage_label", r.stage_label}});
        }
        out << doc.dump(2) << '\n';
        return;
    }
    out << "mesh_id,n_vertices,n_faces,mean_deg,median_deg,max_deg,flipped_faces,mu_mean_sq,mu_max,stage_label\n";
    const auto old_precision = out.precision(10);
    for (const auto& r : rows) {
        out << r.mesh_id << ',' << r.n_vertices << ',' << r.n_faces << ',' << r.mean_deg << ',' << r.median_deg
            << ',' << r.max_deg << ',' << r.flipped_faces << ',' << r.mu_mean_sq << ',' << r.mu_max << ','
            << r.stage_label << '\n';
    }
    out.precision(old_precision);
}

void emit_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows, ReportFormat format)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write report " + path.string());
    }
    write_report(out, rows, format);
    if (!out) {
        throw std::runtime_error("failed writing report " + path.string());
    }
}

void write_face_field(const std::filesystem::path& path, const Eigen::VectorXd& values)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.precision(10);
    for (Eigen::Index f = 0; f < values.size(); ++f) {
        out << values[f] << '\n';
    }
}

}  // namespace tubeparam
