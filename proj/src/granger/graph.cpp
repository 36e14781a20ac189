#include "gaitggm/granger/graph.hpp"

#include "gaitggm/error.hpp"
#include "gaitggm/util/text.hpp"

namespace gaitggm::granger {

std::size_t CausalGraph::edge_count() const
{
    return static_cast<std::size_t>((adjacency.array() != 0.0).count());
}

void CausalGraph::validate() const
{
    const auto p = static_cast<Eigen::Index>(joint_order.size());
    if (adjacency.rows() != p || adjacency.cols() != p)
        throw Error(ErrorCode::DimensionMismatch, "adjacency must be square over the joint order");
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < p; ++c) {
            const double v = adjacency(r, c);
            if (v != 0.0 && v != 1.0) throw Error(ErrorCode::DimensionMismatch, "adjacency entries must be 0/1");
            if (r == c && v != 0.0) throw Error(ErrorCode::DimensionMismatch, "self-loops are not allowed");
        }
}

std::string adjacency_csv(const CausalGraph& g)
{
    std::string out;
    for (Eigen::Index r = 0; r < g.adjacency.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.adjacency.cols(); ++c) {
            if (c) out += ',';
            out += g.adjacency(r, c) != 0.0 ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

CausalGraph read_adjacency_csv(std::string_view text, std::vector<std::string> joint_order)
{
    const auto p = static_cast<Eigen::Index>(joint_order.size());
    CausalGraph g;
    g.joint_order = std::move(joint_order);
    g.adjacency = Eigen::MatrixXd::Zero(p, p);
    Eigen::Index row = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = util::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = util::split(line, ',');
        if (row >= p || static_cast<Eigen::Index>(fields.size()) != p)
            throw ParseError(ErrorCode::DimensionMismatch, line_no, "adjacency shape does not match joint order");
        for (Eigen::Index c = 0; c < p; ++c) {
            const auto v = util::parse_int(fields[static_cast<std::size_t>(c)]);
            if (!v || (*v != 0 && *v != 1)) throw ParseError(ErrorCode::DimensionMismatch, line_no, "entries must be 0/1");
            g.adjacency(row, c) = static_cast<double>(*v);
        }
        ++row;
    }
    if (row != p) throw Error(ErrorCode::DimensionMismatch, "adjacency has too few rows");
    g.validate();
    return g;
}

std::string adjacency_dot(const CausalGraph& g)
{
    std::string out = "digraph ggm {\n  layout=circo;\n";
    for (std::size_t i = 0; i < g.joint_order.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + g.joint_order[i] + "\"];\n";
    for (Eigen::Index j = 0; j < g.adjacency.rows(); ++j)
        for (Eigen::Index i = 0; i < g.adjacency.cols(); ++i)
            if (g.adjacency(j, i) != 0.0) out += "  n" + std::to_string(j) + " -> n" + std::to_string(i) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace gaitggm::granger
