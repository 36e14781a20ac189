#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace gaitggm::granger {

/// Directed Granger graph over joints. adjacency(j, i) == 1 means joint j
/// Granger-causes joint i; the diagonal is always zero.
struct CausalGraph {
    Eigen::MatrixXd adjacency;
    std::vector<std::string> joint_order;
    std::string source_cycle;

    std::size_t size() const noexcept { return joint_order.size(); }
    std::size_t edge_count() const;

    /// Entries binary, zero diagonal, square of joint_order.size(). Throws DimensionMismatch.
    void validate() const;
};

/// p rows of comma-separated 0/1.
std::string adjacency_csv(const CausalGraph& g);
CausalGraph read_adjacency_csv(std::string_view text, std::vector<std::string> joint_order);

/// Graphviz digraph; nodes listed in joint order with their names as labels.
std::string adjacency_dot(const CausalGraph& g);

}  // namespace gaitggm::granger
