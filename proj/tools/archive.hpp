#pragma once

#include "gaitggm/eval/evaluation.hpp"
#include "gaitggm/mocap/motion.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ggm_cli {

namespace fs = std::filesystem;

/// Cycle archive: `<id>.csv` per cycle plus manifest.json.
/// manifest = {"kind": "cycles", "cycles": [{"id", "subject", "sequence", "cycle_index", "frames", "file", ...}], ...}
struct CycleArchive {
    std::vector<gaitggm::mocap::GaitCycle> cycles;
    std::vector<nlohmann::json> records;  // per-cycle manifest extras, same order as cycles
    nlohmann::json extra = nlohmann::json::object();
};

/// Serialises without touching the filesystem; path -> contents, manifest included.
std::vector<std::pair<std::string, std::string>> render_cycle_archive(const CycleArchive& archive);
CycleArchive read_cycle_archive(const fs::path& dir);

/// Graph archive: `<id>.adjacency.csv`, `<id>.dot`, `<id>.json` per cycle plus manifest.json.
gaitggm::eval::LabeledFeatureSet read_graph_archive(const fs::path& dir);

nlohmann::json read_manifest(const fs::path& dir, const std::string& kind);

/// Creates `dir` and writes every file. Existing files with the same names are replaced.
void write_files(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace ggm_cli
