#include "archive.hpp"

#include "gaitggm/error.hpp"
#include "gaitggm/granger/graph.hpp"
#include "gaitggm/mocap/trajectory_io.hpp"
#include "gaitggm/util/text.hpp"

namespace ggm_cli {

using gaitggm::Error;
using gaitggm::ErrorCode;
using nlohmann::json;

std::vector<std::pair<std::string, std::string>> render_cycle_archive(const CycleArchive& archive)
{
    std::vector<std::pair<std::string, std::string>> files;
    json cycles = json::array();
    for (std::size_t k = 0; k < archive.cycles.size(); ++k) {
        const auto& c = archive.cycles[k];
        const std::string file = c.id() + ".csv";
        json rec = k < archive.records.size() ? archive.records[k] : json::object();
        rec["id"] = c.id();
        rec["subject"] = c.subject_label;
        rec["sequence"] = c.sequence_id;
        rec["cycle_index"] = c.cycle_index;
        rec["frames"] = c.frames();
        rec["joints"] = c.joint_count();
        rec["file"] = file;
        cycles.push_back(std::move(rec));
        files.emplace_back(file, gaitggm::mocap::write_trajectory_csv(c.joints, c.coords));
    }
    json manifest = archive.extra;
    manifest["kind"] = "cycles";
    manifest["cycles"] = std::move(cycles);
    files.emplace_back("manifest.json", manifest.dump(2) + "\n");
    return files;
}

json read_manifest(const fs::path& dir, const std::string& kind)
{
    const auto path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(gaitggm::util::read_file(path.string()));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, path.string() + ": " + e.what());
    }
    if (manifest.value("kind", "") != kind)
        throw Error(ErrorCode::InvalidConfig, path.string() + " is not a " + kind + " archive manifest");
    return manifest;
}

CycleArchive read_cycle_archive(const fs::path& dir)
{
    const json manifest = read_manifest(dir, "cycles");
    CycleArchive archive;
    archive.extra = manifest;
    archive.extra.erase("cycles");
    try {
        for (const auto& rec : manifest.at("cycles")) {
            const auto file = dir / rec.at("file").get<std::string>();
            const auto table = gaitggm::mocap::read_trajectory_csv(gaitggm::util::read_file(file.string()));
            gaitggm::mocap::GaitCycle c;
            c.joints = table.joints;
            c.coords = table.coords;
            c.subject_label = rec.at("subject").get<std::string>();
            c.sequence_id = rec.at("sequence").get<std::string>();
            c.cycle_index = rec.at("cycle_index").get<std::size_t>();
            c.validate();
            archive.cycles.push_back(std::move(c));
            archive.records.push_back(rec);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, (dir / "manifest.json").string() + ": " + e.what());
    }
    return archive;
}

gaitggm::eval::LabeledFeatureSet read_graph_archive(const fs::path& dir)
{
    const json manifest = read_manifest(dir, "graphs");
    gaitggm::eval::LabeledFeatureSet set;
    try {
        set.joint_order = manifest.at("joint_order").get<std::vector<std::string>>();
        for (const auto& rec : manifest.at("graphs")) {
            const auto file = dir / rec.at("adjacency").get<std::string>();
            auto g = gaitggm::granger::read_adjacency_csv(gaitggm::util::read_file(file.string()), set.joint_order);
            g.source_cycle = rec.at("id").get<std::string>();
            set.graphs.push_back(std::move(g));
            set.labels.push_back(rec.at("subject").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, (dir / "manifest.json").string() + ": " + e.what());
    }
    return set;
}

void write_files(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, contents] : files) gaitggm::util::write_file((dir / name).string(), contents);
}

}  // namespace ggm_cli
