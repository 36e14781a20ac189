#include "gaitggm/error.hpp"
#include "gaitggm/mocap/acclaim.hpp"
#include "gaitggm/util/text.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>

namespace gaitggm::mocap {
namespace {

using util::iequals;
using util::split_ws;
using util::to_lower;

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
    throw ParseError(ErrorCode::MalformedAsf, line, msg);
}

double number(const std::string& tok, std::size_t line)
{
    const auto v = util::parse_double(tok);
    if (!v || !std::isfinite(*v)) fail(line, "expected a number, got '" + tok + "'");
    return *v;
}

Eigen::Vector3d vec3(const std::vector<std::string>& toks, std::size_t first, std::size_t line)
{
    if (toks.size() < first + 3) fail(line, "expected three numbers after '" + toks[0] + "'");
    return {number(toks[first], line), number(toks[first + 1], line), number(toks[first + 2], line)};
}

std::array<Axis, 3> axis_order(const std::string& tok, std::size_t line)
{
    const auto s = to_lower(tok);
    if (s.size() != 3) fail(line, "axis order must name three axes, got '" + tok + "'");
    std::array<Axis, 3> out{};
    bool seen[3] = {false, false, false};
    for (std::size_t i = 0; i < 3; ++i) {
        int a = s[i] == 'x' ? 0 : s[i] == 'y' ? 1 : s[i] == 'z' ? 2 : -1;
        if (a < 0 || seen[a]) fail(line, "invalid axis order '" + tok + "'");
        seen[a] = true;
        out[i] = static_cast<Axis>(a);
    }
    return out;
}

Dof dof_token(const std::string& tok, std::size_t line)
{
    static const std::map<std::string, Dof> table{
        {"rx", Dof::RX}, {"ry", Dof::RY}, {"rz", Dof::RZ},
        {"tx", Dof::TX}, {"ty", Dof::TY}, {"tz", Dof::TZ},
    };
    const auto it = table.find(to_lower(tok));
    if (it == table.end()) fail(line, "unsupported degree of freedom '" + tok + "'");
    return it->second;
}

struct PendingBone {
    Joint joint;
    std::size_t line = 0;
    bool has_name = false;
    bool has_direction = false;
    bool has_length = false;
};

enum class Section { None, Skip, Units, Root, BoneData, Hierarchy };

}  // namespace

Skeleton parse_asf(std::string_view text)
{
    Joint root;
    root.name = "root";
    Eigen::Vector3d root_position = Eigen::Vector3d::Zero();
    bool degrees = true;

    std::vector<Joint> bones;
    std::map<std::string, std::size_t> bone_index;
    std::optional<PendingBone> pending;
    bool in_limits = false;

    bool seen_root = false, seen_bonedata = false, seen_hierarchy = false;
    bool hierarchy_open = false, hierarchy_closed = false;
    std::vector<std::pair<std::string, std::size_t>> parents;  // child -> parent (index into all joints)
    std::map<std::string, std::size_t> parent_line;

    Section section = Section::None;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::size_t hierarchy_line = 0;

    const auto finish_bone = [&](std::size_t line) {
        auto& b = *pending;
        if (!b.has_name) fail(b.line, "bone without a name");
        if (!b.has_length) fail(b.line, "bone '" + b.joint.name + "' has no length");
        if (!b.has_direction) fail(b.line, "bone '" + b.joint.name + "' has no direction");
        if (b.joint.length < 0) fail(b.line, "bone '" + b.joint.name + "' has negative length");
        const double norm = b.joint.direction.norm();
        if (norm > 0) {
            b.joint.direction /= norm;
        } else if (b.joint.length == 0.0) {
            b.joint.direction = Eigen::Vector3d::UnitY();
        } else {
            fail(b.line, "bone '" + b.joint.name + "' has a zero direction vector");
        }
        if (iequals(b.joint.name, "root") || !bone_index.emplace(b.joint.name, bones.size() + 1).second)
            fail(line, "duplicate bone name '" + b.joint.name + "'");
        bones.push_back(std::move(b.joint));
        pending.reset();
    };

    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto toks = split_ws(raw);
        if (toks.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        const auto key = to_lower(toks[0]);

        if (key.front() == ':') {
            if (pending) fail(line_no, "section started inside an unterminated bone block");
            in_limits = false;
            if (key == ":root") {
                section = Section::Root;
                seen_root = true;
            } else if (key == ":bonedata") {
                section = Section::BoneData;
                seen_bonedata = true;
            } else if (key == ":hierarchy") {
                section = Section::Hierarchy;
                seen_hierarchy = true;
                hierarchy_line = line_no;
            } else if (key == ":units") {
                section = Section::Units;
            } else {
                section = Section::Skip;  // :version, :name, :documentation, ...
            }
            if (eol == text.size()) break;
            continue;
        }

        switch (section) {
        case Section::None:
            fail(line_no, "content before the first section");
        case Section::Skip:
            break;
        case Section::Units:
            if (key == "angle") {
                if (toks.size() < 2) fail(line_no, "angle unit missing");
                const auto unit = to_lower(toks[1]);
                if (unit == "deg" || unit == "degree" || unit == "degrees") degrees = true;
                else if (unit == "rad" || unit == "radian" || unit == "radians") degrees = false;
                else fail(line_no, "unknown angle unit '" + toks[1] + "'");
            } else if (toks.size() >= 2) {
                number(toks[1], line_no);
            }
            break;
        case Section::Root:
            if (key == "order") {
                root.dof.clear();
                for (std::size_t i = 1; i < toks.size(); ++i) root.dof.push_back(dof_token(toks[i], line_no));
            } else if (key == "axis") {
                if (toks.size() < 2) fail(line_no, "root axis order missing");
                root.axis_order = axis_order(toks[1], line_no);
            } else if (key == "position") {
                root_position = vec3(toks, 1, line_no);
            } else if (key == "orientation") {
                root.axis_angles = vec3(toks, 1, line_no);
            } else {
                fail(line_no, "unknown root field '" + toks[0] + "'");
            }
            break;
        case Section::BoneData:
            if (key == "begin") {
                if (pending) fail(line_no, "nested 'begin'");
                pending.emplace();
                pending->line = line_no;
                in_limits = false;
                break;
            }
            if (key == "end") {
                if (!pending) fail(line_no, "'end' without 'begin'");
                finish_bone(line_no);
                in_limits = false;
                break;
            }
            if (!pending) fail(line_no, "bone field outside a begin/end block");
            if (key == "id") {
                if (toks.size() < 2 || !util::parse_int(toks[1])) fail(line_no, "bone id must be an integer");
            } else if (key == "name") {
                if (toks.size() < 2) fail(line_no, "bone name missing");
                pending->joint.name = toks[1];
                pending->has_name = true;
            } else if (key == "direction") {
                pending->joint.direction = vec3(toks, 1, line_no);
                pending->has_direction = true;
            } else if (key == "length") {
                if (toks.size() < 2) fail(line_no, "bone length missing");
                pending->joint.length = number(toks[1], line_no);
                pending->has_length = true;
            } else if (key == "axis") {
                pending->joint.axis_angles = vec3(toks, 1, line_no);
                if (toks.size() < 5) fail(line_no, "bone axis order missing");
                pending->joint.axis_order = axis_order(toks[4], line_no);
            } else if (key == "dof") {
                pending->joint.dof.clear();
                for (std::size_t i = 1; i < toks.size(); ++i)
                    pending->joint.dof.push_back(dof_token(toks[i], line_no));
            } else if (key == "limits") {
                in_limits = true;
            } else if (in_limits && key.front() == '(') {
                // continuation of a multi-line limits block
            } else if (key == "bodymass" || key == "cofmass") {
                if (toks.size() < 2) fail(line_no, "value missing for '" + toks[0] + "'");
                number(toks[1], line_no);
            } else {
                fail(line_no, "unknown bone field '" + toks[0] + "'");
            }
            break;
        case Section::Hierarchy:
            if (key == "begin") {
                if (hierarchy_open || hierarchy_closed) fail(line_no, "repeated hierarchy block");
                hierarchy_open = true;
                break;
            }
            if (key == "end") {
                if (!hierarchy_open) fail(line_no, "'end' without 'begin' in hierarchy");
                hierarchy_open = false;
                hierarchy_closed = true;
                break;
            }
            if (!hierarchy_open) fail(line_no, "hierarchy entry outside begin/end");
            {
                std::size_t parent = 0;
                if (!iequals(toks[0], "root")) {
                    const auto it = bone_index.find(toks[0]);
                    if (it == bone_index.end()) fail(line_no, "unknown parent '" + toks[0] + "'");
                    parent = it->second;
                }
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    if (bone_index.find(toks[i]) == bone_index.end())
                        fail(line_no, "unknown child '" + toks[i] + "'");
                    if (!parent_line.emplace(toks[i], line_no).second)
                        fail(line_no, "bone '" + toks[i] + "' has more than one parent");
                    parents.emplace_back(toks[i], parent);
                }
            }
            break;
        }
        if (eol == text.size()) break;
    }

    if (pending) fail(pending->line, "unterminated bone block");
    if (!seen_root) fail(line_no, "missing :root section");
    if (!seen_bonedata) fail(line_no, "missing :bonedata section");
    if (!seen_hierarchy) fail(line_no, "missing :hierarchy section");
    if (hierarchy_open) fail(line_no, "unterminated hierarchy block");

    for (const auto& [name, parent] : parents) bones[bone_index.at(name) - 1].parent = parent;
    for (const auto& b : bones)
        if (!b.parent) fail(hierarchy_line, "bone '" + b.name + "' does not appear in the hierarchy");

    root.length = 0.0;
    root.direction = Eigen::Vector3d::UnitY();
    std::vector<Joint> joints;
    joints.reserve(bones.size() + 1);
    joints.push_back(std::move(root));
    for (auto& b : bones) joints.push_back(std::move(b));
    try {
        return Skeleton(std::move(joints), degrees, root_position);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(hierarchy_line, e.what());
    }
}

}  // namespace gaitggm::mocap
