#include "gaitggm/error.hpp"
#include "gaitggm/mocap/acclaim.hpp"
#include "gaitggm/util/text.hpp"

#include <cmath>
#include <string>

namespace gaitggm::mocap {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
    throw ParseError(ErrorCode::MalformedAmc, line, msg);
}

}  // namespace

MotionChannels parse_amc(std::string_view text, const Skeleton& skeleton)
{
    MotionChannels out;
    out.degrees = skeleton.angles_in_degrees();
    const std::size_t n_joints = skeleton.size();

    // Rows accumulate per frame; converted to matrices at the end.
    std::vector<std::vector<double>> flat(n_joints);
    std::vector<std::size_t> seen_in_frame(n_joints, 0);
    std::size_t frame_start_line = 0;
    long long current = 0;
    bool in_frame = false;

    const auto close_frame = [&](std::size_t line) {
        for (std::size_t j = 0; j < n_joints; ++j) {
            const auto& joint = skeleton.joint(j);
            if (!joint.dof.empty() && seen_in_frame[j] == 0)
                fail(line, "frame " + std::to_string(current) + " lacks joint '" + joint.name + "'");
        }
        std::fill(seen_in_frame.begin(), seen_in_frame.end(), 0);
        ++out.frames;
    };

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto toks = util::split_ws(raw);
        if (toks.empty()) continue;

        if (toks[0].front() == ':') {
            if (in_frame) fail(line_no, "header keyword inside motion data");
            const auto key = util::to_lower(toks[0]);
            if (key == ":degrees") out.degrees = true;
            else if (key == ":radians") out.degrees = false;
            continue;
        }

        if (toks.size() == 1) {
            if (const auto idx = util::parse_int(toks[0])) {
                if (in_frame) {
                    close_frame(line_no);
                    if (*idx != current + 1)
                        fail(line_no, "frame index gap: " + std::to_string(current) + " followed by " +
                                          std::to_string(*idx));
                } else {
                    out.first_frame = *idx;
                }
                current = *idx;
                in_frame = true;
                frame_start_line = line_no;
                continue;
            }
        }

        if (!in_frame) fail(line_no, "channel data before the first frame index");
        const auto j = skeleton.find(toks[0]);
        if (!j) fail(line_no, "unknown joint '" + toks[0] + "'");
        const auto& joint = skeleton.joint(*j);
        if (toks.size() - 1 != joint.dof.size())
            fail(line_no, "joint '" + joint.name + "' expects " + std::to_string(joint.dof.size()) +
                              " channels, got " + std::to_string(toks.size() - 1));
        if (seen_in_frame[*j]++ > 0) fail(line_no, "joint '" + joint.name + "' repeated within a frame");
        for (std::size_t k = 1; k < toks.size(); ++k) {
            const auto v = util::parse_double(toks[k]);
            if (!v || !std::isfinite(*v)) fail(line_no, "non-numeric channel value '" + toks[k] + "'");
            flat[*j].push_back(*v);
        }
    }
    if (in_frame) close_frame(frame_start_line);

    out.values.resize(n_joints);
    for (std::size_t j = 0; j < n_joints; ++j) {
        const auto dofs = skeleton.joint(j).dof.size();
        auto& m = out.values[j];
        m.resize(static_cast<Eigen::Index>(out.frames), static_cast<Eigen::Index>(dofs));
        for (std::size_t f = 0; f < out.frames; ++f)
            for (std::size_t k = 0; k < dofs; ++k)
                m(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(k)) = flat[j][f * dofs + k];
    }
    return out;
}

}  // namespace gaitggm::mocap
