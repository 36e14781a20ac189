#pragma once

// Canonical trajectory interchange: a CSV table
//   frame,<joint>_x,<joint>_y,<joint>_z,...
// with one row per frame, plus a JSON sidecar holding the subject label,
// frame rate, joint order and root joint. Values use 17 significant digits so
// a write/read cycle reproduces every double exactly.

#include "gaitggm/mocap/motion.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gaitggm::mocap {

struct TrajectoryTable {
    std::vector<std::string> joints;
    Eigen::MatrixXd coords;  // (3 * joints) x frames
};

std::string write_trajectory_csv(const std::vector<std::string>& joints, const Eigen::MatrixXd& coords);

/// Throws ParseError(MalformedTrajectory) on header/row inconsistencies.
TrajectoryTable read_trajectory_csv(std::string_view text);

std::string write_sidecar_json(const MotionSequence& seq);

/// CSV table + sidecar -> sequence. The sidecar joint order must match the CSV header.
MotionSequence read_trajectory(std::string_view csv, std::string_view sidecar_json);

/// `<stem>.csv` and `<stem>.json`.
void save_trajectory(const MotionSequence& seq, const std::string& stem);
MotionSequence load_trajectory(const std::string& csv_path);

/// Sidecar path for a CSV path: the `.csv` suffix replaced by `.json`.
std::string sidecar_path(const std::string& csv_path);

}  // namespace gaitggm::mocap
