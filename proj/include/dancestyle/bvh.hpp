#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "sequence.hpp"
#include "text.hpp"

namespace dancestyle {
namespace bvh {

enum class Channel { x_position, y_position, z_position, x_rotation, y_rotation, z_rotation };

struct Joint {
    std::string name;
    int parent = -1;
    std::array<double, 3> offset{};
    std::vector<Channel> channels;
    std::size_t channel_offset = 0;  // index of this joint's first value in a frame row
};

struct Document {
    std::vector<Joint> joints;  // declaration order; parents precede children
    std::size_t channel_count = 0;
    double frame_time = 0.0;
    std::vector<std::vector<double>> frames;
};

namespace detail {

struct Token {
    std::string_view text;
    std::size_t line;
};

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (ch == '{' || ch == '}') {
            tokens.push_back({text.substr(i, 1), line});
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '{' && text[j] != '}')
                ++j;
            tokens.push_back({text.substr(i, j - i), line});
            i = j;
        }
    }
    return tokens;
}

inline Channel parse_channel(const Token& tok) {
    static constexpr std::array<std::pair<std::string_view, Channel>, 6> names = {{
        {"Xposition", Channel::x_position},
        {"Yposition", Channel::y_position},
        {"Zposition", Channel::z_position},
        {"Xrotation", Channel::x_rotation},
        {"Yrotation", Channel::y_rotation},
        {"Zrotation", Channel::z_rotation},
    }};
    for (const auto& [name, channel] : names)
        if (name == tok.text) return channel;
    throw DataError("BVH line " + std::to_string(tok.line) + ": unsupported channel '" + std::string(tok.text) + "'");
}

class HierarchyParser {
public:
    HierarchyParser(const std::vector<Token>& tokens, std::size_t pos) : tokens_(tokens), pos_(pos) {}

    std::size_t position() const { return pos_; }

    void parse_joint_body(Document& doc, int index) {
        expect("{");
        if (!at("OFFSET")) fail("missing OFFSET for joint '" + doc.joints[static_cast<std::size_t>(index)].name + "'");
        ++pos_;
        for (auto& v : doc.joints[static_cast<std::size_t>(index)].offset) v = number();
        if (!at("CHANNELS")) fail("missing CHANNELS for joint '" + doc.joints[static_cast<std::size_t>(index)].name + "'");
        ++pos_;
        const double count = number();
        if (count < 0 || count > 6 || count != std::floor(count)) fail("invalid channel count");
        auto& joint = doc.joints[static_cast<std::size_t>(index)];
        joint.channel_offset = doc.channel_count;
        for (int c = 0; c < static_cast<int>(count); ++c) joint.channels.push_back(parse_channel(next()));
        doc.channel_count += joint.channels.size();

        while (true) {
            if (pos_ >= tokens_.size()) fail("unbalanced braces: unexpected end of hierarchy");
            if (at("}")) {
                ++pos_;
                return;
            }
            if (at("JOINT")) {
                ++pos_;
                add_joint(doc, index, std::string(next().text));
            } else if (at("End")) {
                ++pos_;
                if (!at("Site")) fail("expected 'Site' after 'End'");
                ++pos_;
                skip_end_site();
            } else {
                fail("unexpected token '" + std::string(tokens_[pos_].text) + "'");
            }
        }
    }

    void add_joint(Document& doc, int parent, std::string name) {
        Joint joint;
        joint.name = std::move(name);
        joint.parent = parent;
        doc.joints.push_back(std::move(joint));
        parse_joint_body(doc, static_cast<int>(doc.joints.size() - 1));
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const std::size_t line = pos_ < tokens_.size() ? tokens_[pos_].line : (tokens_.empty() ? 0 : tokens_.back().line);
        throw DataError("BVH line " + std::to_string(line) + ": " + msg);
    }

    bool at(std::string_view text) const { return pos_ < tokens_.size() && tokens_[pos_].text == text; }

    const Token& next() {
        if (pos_ >= tokens_.size()) fail("unexpected end of input");
        return tokens_[pos_++];
    }

    void expect(std::string_view text) {
        if (!at(text)) fail("expected '" + std::string(text) + "'");
        ++pos_;
    }

    double number() {
        const Token& tok = next();
        const auto value = parse_double(tok.text);
        if (!value) throw DataError("BVH line " + std::to_string(tok.line) + ": expected a number, got '" +
                                    std::string(tok.text) + "'");
        return *value;
    }

private:
    void skip_end_site() {
        expect("{");
        if (!at("OFFSET")) fail("missing OFFSET in End Site");
        ++pos_;
        for (int i = 0; i < 3; ++i) number();
        expect("}");
    }

    const std::vector<Token>& tokens_;
    std::size_t pos_;
};

}  // namespace detail

/// Parses HIERARCHY and MOTION sections. Frame rows are line-delimited and must
/// carry exactly one value per declared channel.
inline Document parse_document(std::string_view text) {
    const auto motion_at = text.find("MOTION");
    if (motion_at == std::string_view::npos) throw DataError("BVH: missing MOTION section");
    const std::string_view hierarchy_text = text.substr(0, motion_at);
    const auto tokens = detail::tokenize(hierarchy_text);

    Document doc;
    detail::HierarchyParser parser(tokens, 0);
    if (!parser.at("HIERARCHY")) parser.fail("missing HIERARCHY section");
    parser.next();
    if (!parser.at("ROOT")) parser.fail("expected ROOT");
    parser.next();
    parser.add_joint(doc, -1, std::string(parser.next().text));
    if (parser.position() != tokens.size()) {
        if (parser.at("ROOT")) parser.fail("multiple roots are not supported");
        parser.fail("unbalanced braces: trailing tokens after root joint");
    }

    // MOTION section: header lines then one row per frame.
    const auto lines = csv::lines(text.substr(motion_at));
    std::size_t li = 1;
    long declared_frames = -1;
    std::size_t header_line = 0;
    auto line_no = [&](std::size_t i) {
        return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(motion_at), '\n')) +
               lines[i].first;
    };
    for (; li < lines.size(); ++li) {
        std::string_view line = lines[li].second;
        const auto first = line.find_first_not_of(" \t");
        line.remove_prefix(first);
        if (line.starts_with("Frames:")) {
            const auto v = parse_double(line.substr(7));
            if (!v || *v < 0 || *v != std::floor(*v)) throw DataError("BVH line " + std::to_string(line_no(li)) + ": bad frame count");
            declared_frames = static_cast<long>(*v);
        } else if (line.starts_with("Frame Time:")) {
            const auto v = parse_double(line.substr(11));
            if (!v || !(*v > 0)) throw DataError("BVH line " + std::to_string(line_no(li)) + ": bad frame time");
            doc.frame_time = *v;
            header_line = li;
            ++li;
            break;
        } else {
            throw DataError("BVH line " + std::to_string(line_no(li)) + ": expected 'Frames:' or 'Frame Time:'");
        }
    }
    if (doc.frame_time <= 0.0 || header_line == 0) throw DataError("BVH: missing 'Frame Time:' line");
    for (; li < lines.size(); ++li) {
        std::vector<double> row;
        row.reserve(doc.channel_count);
        std::string_view line = lines[li].second;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            const auto v = parse_double(line.substr(i, j - i));
            if (!v || !std::isfinite(*v))
                throw DataError("BVH line " + std::to_string(line_no(li)) + ": invalid number '" +
                                std::string(line.substr(i, j - i)) + "'");
            row.push_back(*v);
            i = j;
        }
        if (row.size() != doc.channel_count)
            throw DataError("BVH line " + std::to_string(line_no(li)) + ": frame row has " + std::to_string(row.size()) +
                            " values, expected " + std::to_string(doc.channel_count));
        doc.frames.push_back(std::move(row));
    }
    if (declared_frames >= 0 && static_cast<std::size_t>(declared_frames) != doc.frames.size())
        throw DataError("BVH: header declares " + std::to_string(declared_frames) + " frames, found " +
                        std::to_string(doc.frames.size()));
    return doc;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return out;
}

/// Rotation about a coordinate axis (0=x, 1=y, 2=z), angle in degrees.
inline Mat3 axis_rotation(int axis, double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    switch (axis) {
        case 0: return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
        case 1: return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
        default: return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
    }
}

/// World positions of every joint for one frame row, in declaration order.
/// Local transform: translate(offset + position channels) * R_1 * R_2 * R_3,
/// with the rotations multiplied in the declared channel order.
inline std::vector<Point> forward_kinematics(const Document& doc, const std::vector<double>& row) {
    std::vector<Point> positions(doc.joints.size());
    std::vector<Mat3> rotations(doc.joints.size());
    for (std::size_t j = 0; j < doc.joints.size(); ++j) {
        const Joint& joint = doc.joints[j];
        Point local = joint.offset;
        Mat3 rot{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        for (std::size_t c = 0; c < joint.channels.size(); ++c) {
            const double v = row[joint.channel_offset + c];
            switch (joint.channels[c]) {
                case Channel::x_position: local[0] += v; break;
                case Channel::y_position: local[1] += v; break;
                case Channel::z_position: local[2] += v; break;
                case Channel::x_rotation: rot = multiply(rot, axis_rotation(0, v)); break;
                case Channel::y_rotation: rot = multiply(rot, axis_rotation(1, v)); break;
                case Channel::z_rotation: rot = multiply(rot, axis_rotation(2, v)); break;
            }
        }
        if (joint.parent < 0) {
            positions[j] = local;
            rotations[j] = rot;
        } else {
            const auto p = static_cast<std::size_t>(joint.parent);
            const Mat3& pr = rotations[p];
            for (int i = 0; i < 3; ++i)
                positions[j][i] = positions[p][i] + pr[i][0] * local[0] + pr[i][1] * local[1] + pr[i][2] * local[2];
            rotations[j] = multiply(pr, rot);
        }
    }
    return positions;
}

}  // namespace bvh

/// Parses a BVH document into a 3D MotionSequence holding the joints named by
/// `roles` plus `extra_joints`, in declaration order. fps = 1 / Frame Time.
inline MotionSequence parse_bvh(std::string_view text, const JointRoleMap& roles,
                                const std::vector<std::string>& extra_joints = {}, const std::string& video_id = "bvh") {
    const bvh::Document doc = bvh::parse_document(text);

    std::vector<std::string> wanted(roles.joints.begin(), roles.joints.end());
    wanted.insert(wanted.end(), extra_joints.begin(), extra_joints.end());
    for (const auto& name : wanted) {
        const bool found = std::any_of(doc.joints.begin(), doc.joints.end(), [&](const bvh::Joint& j) { return j.name == name; });
        if (!found) throw DataError(video_id + ": BVH has no joint named '" + name + "'");
    }
    std::vector<std::size_t> keep;
    MotionSequence seq;
    seq.video_id = video_id;
    seq.fps = 1.0 / doc.frame_time;
    seq.dims = 3;
    for (std::size_t j = 0; j < doc.joints.size(); ++j) {
        if (std::find(wanted.begin(), wanted.end(), doc.joints[j].name) != wanted.end()) {
            keep.push_back(j);
            seq.joint_names.push_back(doc.joints[j].name);
        }
    }
    seq.coords.reserve(doc.frames.size() * keep.size() * 3);
    for (const auto& row : doc.frames) {
        const auto positions = bvh::forward_kinematics(doc, row);
        for (std::size_t j : keep)
            for (double v : positions[j]) seq.coords.push_back(v);
    }
    validate(seq);
    return seq;
}

}  // namespace dancestyle
