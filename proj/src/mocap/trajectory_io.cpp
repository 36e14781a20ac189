#include "gaitggm/mocap/trajectory_io.hpp"

#include "gaitggm/error.hpp"
#include "gaitggm/util/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace gaitggm::mocap {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
    throw ParseError(ErrorCode::MalformedTrajectory, line, msg);
}

}  // namespace

std::string write_trajectory_csv(const std::vector<std::string>& joints, const Eigen::MatrixXd& coords)
{
    if (coords.rows() != 3 * static_cast<Eigen::Index>(joints.size()))
        throw Error(ErrorCode::DimensionMismatch, "coordinate rows must be 3 per joint");
    std::string out = "frame";
    for (const auto& j : joints) out += "," + j + "_x," + j + "_y," + j + "_z";
    out += '\n';
    for (Eigen::Index f = 0; f < coords.cols(); ++f) {
        out += std::to_string(f);
        for (Eigen::Index r = 0; r < coords.rows(); ++r) {
            out += ',';
            out += util::format_double(coords(r, f));
        }
        out += '\n';
    }
    return out;
}

TrajectoryTable read_trajectory_csv(std::string_view text)
{
    TrajectoryTable table;
    std::vector<std::vector<double>> columns;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_done = false;
    std::size_t width = 0;

    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        auto line = util::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = util::split(line, ',');
        if (!header_done) {
            if (fields.empty() || util::trim(fields[0]) != "frame") fail(line_no, "header must start with 'frame'");
            if ((fields.size() - 1) % 3 != 0) fail(line_no, "header must hold x/y/z triplets");
            static constexpr const char* kSuffix[3] = {"_x", "_y", "_z"};
            for (std::size_t i = 1; i < fields.size(); i += 3) {
                std::string name;
                for (std::size_t c = 0; c < 3; ++c) {
                    const std::string f(util::trim(fields[i + c]));
                    if (f.size() <= 2 || f.compare(f.size() - 2, 2, kSuffix[c]) != 0)
                        fail(line_no, "column '" + f + "' should end in " + kSuffix[c]);
                    const auto stem = f.substr(0, f.size() - 2);
                    if (c == 0) name = stem;
                    else if (stem != name) fail(line_no, "column '" + f + "' breaks the triplet for '" + name + "'");
                }
                table.joints.push_back(name);
            }
            width = fields.size();
            columns.resize(width - 1);
            header_done = true;
            continue;
        }
        if (fields.size() != width)
            fail(line_no, "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        if (!util::parse_int(fields[0])) fail(line_no, "frame index must be an integer");
        for (std::size_t i = 1; i < width; ++i) {
            const auto v = util::parse_double(fields[i]);
            if (!v || !std::isfinite(*v)) fail(line_no, "bad coordinate '" + fields[i] + "'");
            columns[i - 1].push_back(*v);
        }
    }
    if (!header_done) fail(line_no, "empty trajectory table");

    const auto rows = static_cast<Eigen::Index>(columns.size());
    const auto frames = rows ? static_cast<Eigen::Index>(columns[0].size()) : 0;
    table.coords.resize(rows, frames);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index f = 0; f < frames; ++f) table.coords(r, f) = columns[static_cast<std::size_t>(r)][f];
    return table;
}

std::string write_sidecar_json(const MotionSequence& seq)
{
    json j;
    j["label"] = seq.label;
    j["frame_rate"] = seq.frame_rate;
    j["joints"] = seq.joints;
    j["root_joint"] = seq.root_joint;
    // The root path only needs storing once it no longer coincides with the root rows.
    const auto it = std::find(seq.joints.begin(), seq.joints.end(), seq.root_joint);
    const bool implicit = it != seq.joints.end() &&
                          seq.coords.middleRows(3 * (it - seq.joints.begin()), 3) == seq.root_path;
    if (!implicit) {
        json path = json::array();
        for (Eigen::Index c = 0; c < 3; ++c) {
            std::vector<double> row(seq.root_path.row(c).begin(), seq.root_path.row(c).end());
            path.push_back(row);
        }
        j["root_path"] = std::move(path);
    }
    return j.dump(2) + "\n";
}

MotionSequence read_trajectory(std::string_view csv, std::string_view sidecar_json)
{
    auto table = read_trajectory_csv(csv);
    json meta;
    try {
        meta = json::parse(sidecar_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedTrajectory, std::string("sidecar: ") + e.what());
    }
    try {
        const auto joints = meta.at("joints").get<std::vector<std::string>>();
        if (joints != table.joints)
            throw Error(ErrorCode::MalformedTrajectory, "sidecar joint order differs from the CSV header");
        auto seq = make_sequence(std::move(table.joints), std::move(table.coords), meta.value("label", ""),
                                 meta.value("frame_rate", 120.0), meta.value("root_joint", std::string("root")));
        if (meta.contains("root_path")) {
            const auto& path = meta.at("root_path");
            if (path.size() != 3) throw Error(ErrorCode::MalformedTrajectory, "root_path needs 3 rows");
            for (Eigen::Index c = 0; c < 3; ++c) {
                const auto row = path.at(static_cast<std::size_t>(c)).get<std::vector<double>>();
                if (static_cast<Eigen::Index>(row.size()) != seq.coords.cols())
                    throw Error(ErrorCode::MalformedTrajectory, "root_path length differs from frame count");
                for (Eigen::Index f = 0; f < seq.coords.cols(); ++f) seq.root_path(c, f) = row[f];
            }
        }
        seq.validate();
        return seq;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedTrajectory, std::string("sidecar: ") + e.what());
    }
}

std::string sidecar_path(const std::string& csv_path)
{
    if (csv_path.size() >= 4 && csv_path.compare(csv_path.size() - 4, 4, ".csv") == 0)
        return csv_path.substr(0, csv_path.size() - 4) + ".json";
    return csv_path + ".json";
}

void save_trajectory(const MotionSequence& seq, const std::string& stem)
{
    util::write_file(stem + ".csv", write_trajectory_csv(seq.joints, seq.coords));
    util::write_file(stem + ".json", write_sidecar_json(seq));
}

MotionSequence load_trajectory(const std::string& csv_path)
{
    return read_trajectory(util::read_file(csv_path), util::read_file(sidecar_path(csv_path)));
}

}  // namespace gaitggm::mocap
