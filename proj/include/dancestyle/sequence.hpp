#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace dancestyle {

/// A keypoint; the third component is zero for 2D data.
using Point = std::array<double, 3>;

/// T frames of N_j keypoints with 2 or 3 coordinates each, stored flat in
/// frame-major, joint-minor, coordinate-innermost order.
struct MotionSequence {
    std::string video_id;
    double fps = 0.0;
    int dims = 3;
    std::vector<std::string> joint_names;
    std::vector<double> coords;

    std::size_t joint_count() const { return joint_names.size(); }
    std::size_t frame_count() const {
        const std::size_t stride = joint_names.size() * static_cast<std::size_t>(dims);
        return stride == 0 ? 0 : coords.size() / stride;
    }
    double dt() const { return 1.0 / fps; }

    double& at(std::size_t t, std::size_t j, std::size_t d) {
        return coords[(t * joint_count() + j) * static_cast<std::size_t>(dims) + d];
    }
    double at(std::size_t t, std::size_t j, std::size_t d) const {
        return coords[(t * joint_count() + j) * static_cast<std::size_t>(dims) + d];
    }

    Point point(std::size_t t, std::size_t j) const {
        Point p{0.0, 0.0, 0.0};
        for (int d = 0; d < dims; ++d) p[static_cast<std::size_t>(d)] = at(t, j, static_cast<std::size_t>(d));
        return p;
    }

    std::size_t joint_index(std::string_view name) const {
        for (std::size_t j = 0; j < joint_names.size(); ++j)
            if (joint_names[j] == name) return j;
        return joint_names.size();
    }
};

/// Checks the MotionSequence invariants; throws DataError naming the problem.
inline void validate(const MotionSequence& seq) {
    const std::string where = seq.video_id.empty() ? "sequence" : seq.video_id;
    if (!(std::isfinite(seq.fps) && seq.fps > 0.0)) throw DataError(where + ": fps must be finite and > 0");
    if (seq.dims != 2 && seq.dims != 3) throw DataError(where + ": dims must be 2 or 3");
    if (seq.joint_names.empty()) throw DataError(where + ": joint_names is empty");
    std::unordered_set<std::string> seen;
    for (const auto& name : seq.joint_names) {
        if (name.empty()) throw DataError(where + ": empty joint name");
        if (!seen.insert(name).second) throw DataError(where + ": duplicate joint name '" + name + "'");
    }
    const std::size_t stride = seq.joint_count() * static_cast<std::size_t>(seq.dims);
    if (seq.coords.size() % stride != 0) throw DataError(where + ": coordinate count is not a multiple of joints x dims");
    if (seq.frame_count() < 3) throw DataError(where + ": T < 3 (got " + std::to_string(seq.frame_count()) + " frames)");
    for (std::size_t i = 0; i < seq.coords.size(); ++i) {
        if (!std::isfinite(seq.coords[i])) {
            const std::size_t frame = i / stride;
            const std::size_t joint = (i % stride) / static_cast<std::size_t>(seq.dims);
            throw DataError(where + ": non-finite coordinate at frame " + std::to_string(frame) + ", joint '" +
                            seq.joint_names[joint] + "'");
        }
    }
}

/// Parses the canonical sequence JSON document. `source` is used in error messages.
inline MotionSequence parse_sequence_text(std::string_view text, const std::string& source = "sequence") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(source + ": invalid JSON: " + e.what());
    }
    auto fail = [&](const std::string& field, const std::string& msg) -> DataError {
        return DataError(source + ": field '" + field + "': " + msg);
    };
    if (!doc.is_object()) throw DataError(source + ": top-level value must be an object");
    for (const char* key : {"format_version", "video_id", "fps", "dims", "joint_names", "frames"})
        if (!doc.contains(key)) throw fail(key, "missing");
    if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != 1)
        throw fail("format_version", "must be 1");
    if (!doc["video_id"].is_string()) throw fail("video_id", "must be a string");
    if (!doc["fps"].is_number()) throw fail("fps", "must be a number");
    if (!doc["dims"].is_number_integer()) throw fail("dims", "must be 2 or 3");
    if (!doc["joint_names"].is_array()) throw fail("joint_names", "must be an array of strings");
    if (!doc["frames"].is_array()) throw fail("frames", "must be an array");

    MotionSequence seq;
    seq.video_id = doc["video_id"].get<std::string>();
    seq.fps = doc["fps"].get<double>();
    seq.dims = doc["dims"].get<int>();
    if (seq.dims != 2 && seq.dims != 3) throw fail("dims", "must be 2 or 3");
    for (const auto& name : doc["joint_names"]) {
        if (!name.is_string()) throw fail("joint_names", "must be an array of strings");
        seq.joint_names.push_back(name.get<std::string>());
    }
    const auto& frames = doc["frames"];
    const std::size_t n_joints = seq.joint_names.size();
    const auto dims = static_cast<std::size_t>(seq.dims);
    if (frames.size() < 3) throw DataError(source + ": T < 3 (got " + std::to_string(frames.size()) + " frames)");
    seq.coords.reserve(frames.size() * n_joints * dims);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const std::string field = "frames[" + std::to_string(t) + "]";
        const auto& frame = frames[t];
        if (!frame.is_array()) throw fail(field, "must be an array of joints");
        if (frame.size() != n_joints)
            throw fail(field, "expected " + std::to_string(n_joints) + " joints, got " + std::to_string(frame.size()));
        for (std::size_t j = 0; j < n_joints; ++j) {
            const auto& joint = frame[j];
            if (!joint.is_array() || joint.size() != dims)
                throw fail(field + "[" + std::to_string(j) + "]", "expected " + std::to_string(dims) + " coordinates");
            for (const auto& c : joint) {
                if (!c.is_number()) throw fail(field + "[" + std::to_string(j) + "]", "coordinate must be a number");
                seq.coords.push_back(c.get<double>());
            }
        }
    }
    if (seq.video_id.empty()) seq.video_id = source;
    validate(seq);
    return seq;
}

inline MotionSequence parse_sequence(const std::filesystem::path& path) {
    return parse_sequence_text(read_text_file(path), path.string());
}

inline std::string sequence_to_json(const MotionSequence& seq) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["video_id"] = seq.video_id;
    doc["fps"] = seq.fps;
    doc["dims"] = seq.dims;
    doc["joint_names"] = seq.joint_names;
    nlohmann::json frames = nlohmann::json::array();
    const std::size_t dims = static_cast<std::size_t>(seq.dims);
    for (std::size_t t = 0; t < seq.frame_count(); ++t) {
        nlohmann::json frame = nlohmann::json::array();
        for (std::size_t j = 0; j < seq.joint_count(); ++j) {
            nlohmann::json joint = nlohmann::json::array();
            for (std::size_t d = 0; d < dims; ++d) joint.push_back(seq.at(t, j, d));
            frame.push_back(std::move(joint));
        }
        frames.push_back(std::move(frame));
    }
    doc["frames"] = std::move(frames);
    return doc.dump();
}

inline void write_sequence(const MotionSequence& seq, const std::filesystem::path& path) {
    validate(seq);
    write_text_file(path, sequence_to_json(seq));
}

/// Drops one coordinate axis of a 3D sequence (e.g. depth) to obtain a 2D one.
inline MotionSequence project_to_2d(const MotionSequence& seq, int drop_axis = 2) {
    if (seq.dims == 2) return seq;
    MotionSequence out = seq;
    out.dims = 2;
    out.coords.clear();
    out.coords.reserve(seq.frame_count() * seq.joint_count() * 2);
    for (std::size_t t = 0; t < seq.frame_count(); ++t)
        for (std::size_t j = 0; j < seq.joint_count(); ++j)
            for (int d = 0; d < 3; ++d)
                if (d != drop_axis) out.coords.push_back(seq.at(t, j, static_cast<std::size_t>(d)));
    return out;
}

// ---------------------------------------------------------------------------
// Joint roles

enum class Role : std::size_t {
    hip_left,
    hip_right,
    shoulder_left,
    shoulder_right,
    hand_left,
    hand_right,
    foot_left,
    foot_right,
};

inline constexpr std::size_t kRoleCount = 8;

inline constexpr std::array<std::string_view, kRoleCount> kRoleNames = {
    "hip_left", "hip_right", "shoulder_left", "shoulder_right", "hand_left", "hand_right", "foot_left", "foot_right",
};

/// Maps the eight anatomical roles used by the features onto joint names.
struct JointRoleMap {
    std::array<std::string, kRoleCount> joints;
    int vertical_axis = 1;

    const std::string& operator[](Role r) const { return joints[static_cast<std::size_t>(r)]; }
    std::string& operator[](Role r) { return joints[static_cast<std::size_t>(r)]; }
};

/// Role map for 17-joint COCO skeletons; hands and feet map to wrists and ankles.
inline JointRoleMap coco_role_map() {
    JointRoleMap map;
    map[Role::hip_left] = "left_hip";
    map[Role::hip_right] = "right_hip";
    map[Role::shoulder_left] = "left_shoulder";
    map[Role::shoulder_right] = "right_shoulder";
    map[Role::hand_left] = "left_wrist";
    map[Role::hand_right] = "right_wrist";
    map[Role::foot_left] = "left_ankle";
    map[Role::foot_right] = "right_ankle";
    return map;
}

inline const std::vector<std::string>& coco_joint_names() {
    static const std::vector<std::string> names = {
        "nose",       "left_eye",    "right_eye",      "left_ear",        "right_ear",   "left_shoulder",
        "right_shoulder", "left_elbow", "right_elbow", "left_wrist",    "right_wrist", "left_hip",
        "right_hip",  "left_knee",   "right_knee",     "left_ankle",      "right_ankle",
    };
    return names;
}

/// Role map checks: every role named, vertical axis valid, names distinct.
/// A single pelvis joint may serve as both hips (its midpoint is itself).
inline void validate(const JointRoleMap& map) {
    if (map.vertical_axis < 0 || map.vertical_axis > 2) throw DataError("role map: vertical_axis must be 0, 1 or 2");
    for (std::size_t r = 0; r < kRoleCount; ++r)
        if (map.joints[r].empty()) throw DataError("role map: role '" + std::string(kRoleNames[r]) + "' is unassigned");
    for (std::size_t a = 0; a < kRoleCount; ++a) {
        for (std::size_t b = a + 1; b < kRoleCount; ++b) {
            const bool hips = a == static_cast<std::size_t>(Role::hip_left) && b == static_cast<std::size_t>(Role::hip_right);
            if (!hips && map.joints[a] == map.joints[b])
                throw DataError("role map: roles '" + std::string(kRoleNames[a]) + "' and '" + std::string(kRoleNames[b]) +
                                "' share joint '" + map.joints[a] + "'");
        }
    }
}

inline JointRoleMap parse_role_map_text(std::string_view text, const std::string& source = "role map") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(source + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("roles") || !doc["roles"].is_object())
        throw DataError(source + ": expected an object with a 'roles' object");
    JointRoleMap map;
    for (const auto& [key, value] : doc["roles"].items()) {
        std::size_t r = 0;
        while (r < kRoleCount && kRoleNames[r] != key) ++r;
        if (r == kRoleCount) throw DataError(source + ": unknown role '" + key + "'");
        if (!value.is_string()) throw DataError(source + ": role '" + key + "' must map to a joint name");
        map.joints[r] = value.get<std::string>();
    }
    if (doc.contains("vertical_axis")) {
        if (!doc["vertical_axis"].is_number_integer()) throw DataError(source + ": vertical_axis must be 0, 1 or 2");
        map.vertical_axis = doc["vertical_axis"].get<int>();
    }
    try {
        validate(map);
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what());
    }
    return map;
}

inline JointRoleMap load_role_map(const std::filesystem::path& path) {
    return parse_role_map_text(read_text_file(path), path.string());
}

inline std::string role_map_to_json(const JointRoleMap& map) {
    nlohmann::json roles = nlohmann::json::object();
    for (std::size_t r = 0; r < kRoleCount; ++r) roles[std::string(kRoleNames[r])] = map.joints[r];
    nlohmann::json doc;
    doc["roles"] = roles;
    doc["vertical_axis"] = map.vertical_axis;
    return doc.dump(2);
}

/// Role map resolved against a concrete joint list.
struct ResolvedRoles {
    std::array<std::size_t, kRoleCount> index{};
    int vertical_axis = 1;

    std::size_t operator[](Role r) const { return index[static_cast<std::size_t>(r)]; }
};

inline ResolvedRoles resolve_roles(const JointRoleMap& map, const MotionSequence& seq) {
    validate(map);
    ResolvedRoles resolved;
    resolved.vertical_axis = map.vertical_axis;
    for (std::size_t r = 0; r < kRoleCount; ++r) {
        const std::size_t j = seq.joint_index(map.joints[r]);
        if (j == seq.joint_count())
            throw DataError(seq.video_id + ": joint '" + map.joints[r] + "' for role '" + std::string(kRoleNames[r]) +
                            "' not found");
        resolved.index[r] = j;
    }
    return resolved;
}

}  // namespace dancestyle
