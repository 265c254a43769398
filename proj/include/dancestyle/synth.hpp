#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "manifest.hpp"
#include "rng.hpp"
#include "sequence.hpp"

namespace dancestyle {

/// Parameters of a synthetic dance dataset.
struct SynthSpec {
    std::size_t n_classes = 4;
    std::size_t videos_per_class = 20;
    std::size_t frames = 600;
    double fps = 60.0;
    int dims = 3;
    double noise_std = 0.0;
    std::uint64_t seed = 42;
    std::vector<double> frequencies;  // Hz per class; empty uses class_signature's ladder
};

struct SynthDataset {
    std::vector<MotionSequence> sequences;
    DatasetManifest manifest;  // paths are file names relative to the output directory
};

/// Rhythmic signature of one class.
struct ClassSignature {
    double frequency = 1.0;                // Hz
    std::array<double, 4> amplitude{};     // left wrist, right wrist, left ankle, right ankle
    std::array<double, 4> phase{};         // radians
    bool spins = false;                    // slow whole-body rotation about the vertical axis
};

inline ClassSignature class_signature(std::size_t c) {
    ClassSignature sig;
    sig.frequency = 0.8 + 0.55 * static_cast<double>(c);
    for (std::size_t l = 0; l < 4; ++l) {
        sig.amplitude[l] = 0.15 + 0.12 * static_cast<double>((c + 2 * l) % 4);
        sig.phase[l] = 0.5 * std::numbers::pi * static_cast<double>((c * (l + 1)) % 4);
    }
    sig.spins = c % 4 == 1;
    return sig;
}

inline std::string synth_label(std::size_t c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "style_%02zu", c);
    return buf;
}

inline std::string synth_video_id(std::size_t c, std::size_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%02zu_v%03zu", c, v);
    return buf;
}

namespace synth_detail {

// Rest pose, metres: x lateral (left positive), y up, z forward. The upper body
// leans slightly forward so the torso axis has a ground-plane component.
inline const std::array<Point, 17>& rest_pose() {
    static const std::array<Point, 17> pose = {{
        {0.00, 1.60, 0.14},   // nose
        {0.03, 1.63, 0.13},   // left_eye
        {-0.03, 1.63, 0.13},  // right_eye
        {0.07, 1.62, 0.08},   // left_ear
        {-0.07, 1.62, 0.08},  // right_ear
        {0.18, 1.42, 0.06},   // left_shoulder
        {-0.18, 1.42, 0.06},  // right_shoulder
        {0.22, 1.15, 0.05},   // left_elbow
        {-0.22, 1.15, 0.05},  // right_elbow
        {0.24, 0.90, 0.07},   // left_wrist
        {-0.24, 0.90, 0.07},  // right_wrist
        {0.10, 0.95, 0.00},   // left_hip
        {-0.10, 0.95, 0.00},  // right_hip
        {0.11, 0.52, 0.02},   // left_knee
        {-0.11, 0.52, 0.02},  // right_knee
        {0.11, 0.08, 0.00},   // left_ankle
        {-0.11, 0.08, 0.00},  // right_ankle
    }};
    return pose;
}

// joint index of each extremity, the joint that follows it at half amplitude,
// and its swing direction
struct Limb {
    std::size_t extremity;
    std::size_t middle;
    Point direction;
};

inline const std::array<Limb, 4>& limbs() {
    static const std::array<Limb, 4> l = {{
        {9, 7, {0.55, 0.75, 0.35}},
        {10, 8, {-0.55, 0.75, 0.35}},
        {15, 13, {0.10, 0.45, 0.88}},
        {16, 14, {-0.10, 0.45, 0.88}},
    }};
    return l;
}

}  // namespace synth_detail

/// One synthetic video of class `c`; all randomness comes from `rng`.
inline MotionSequence synth_sequence(const SynthSpec& spec, std::size_t c, std::size_t v, Rng& rng) {
    using synth_detail::limbs;
    using synth_detail::rest_pose;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ClassSignature sig = class_signature(c);
    if (!spec.frequencies.empty()) sig.frequency = spec.frequencies.at(c);
    const double freq = sig.frequency * (1.0 + 0.01 * rng.uniform(-1.0, 1.0));
    std::array<double, 4> amp{};
    for (std::size_t l = 0; l < 4; ++l) amp[l] = sig.amplitude[l] * (1.0 + 0.08 * rng.uniform(-1.0, 1.0));
    const double phase0 = rng.uniform(0.0, two_pi);
    const double facing0 = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double root_x = rng.uniform(-1.0, 1.0);
    const double root_z = rng.uniform(-1.0, 1.0);
    const double spin_rate = two_pi * 0.25;

    MotionSequence seq;
    seq.video_id = synth_video_id(c, v);
    seq.fps = spec.fps;
    seq.dims = 3;
    seq.joint_names = coco_joint_names();
    seq.coords.reserve(spec.frames * 17 * 3);
    std::array<Point, 17> pose{};
    for (std::size_t t = 0; t < spec.frames; ++t) {
        const double time = static_cast<double>(t) / spec.fps;
        pose = rest_pose();
        for (std::size_t l = 0; l < 4; ++l) {
            const auto& limb = limbs()[l];
            const double s = amp[l] * std::sin(two_pi * freq * time + sig.phase[l] + phase0);
            for (std::size_t d = 0; d < 3; ++d) {
                pose[limb.extremity][d] += s * limb.direction[d];
                pose[limb.middle][d] += 0.5 * s * limb.direction[d];
            }
        }
        // lateral torso sway: shoulders and head shift together
        const double sway = 0.03 * std::sin(std::numbers::pi * freq * time + phase0);
        for (std::size_t j = 0; j <= 6; ++j) pose[j][0] += sway;

        const double facing = sig.spins ? facing0 + spin_rate * time
                                        : facing0 + 0.25 * std::sin(std::numbers::pi * freq * time + phase0);
        const double cs = std::cos(facing);
        const double sn = std::sin(facing);
        const double bounce = 0.03 * std::sin(2.0 * two_pi * freq * time + phase0);
        const double wander_x = root_x + 0.1 * std::sin(0.2 * time);
        const double wander_z = root_z + 0.1 * std::cos(0.2 * time);
        for (const Point& p : pose) {
            const double x = p[0] * cs + p[2] * sn + wander_x;
            const double y = p[1] + bounce;
            const double z = -p[0] * sn + p[2] * cs + wander_z;
            seq.coords.push_back(x);
            seq.coords.push_back(y);
            seq.coords.push_back(z);
        }
    }
    if (spec.noise_std > 0.0)
        for (double& coord : seq.coords) coord += rng.normal(0.0, spec.noise_std);
    if (spec.dims == 2) seq = project_to_2d(seq, 2);
    return seq;
}

/// Generates videos_per_class videos per class; each video is its own group.
inline SynthDataset generate(const SynthSpec& spec) {
    if (spec.n_classes == 0) throw DataError("synth: need at least one class");
    if (spec.videos_per_class == 0) throw DataError("synth: videos_per_class = 0 gives an empty manifest");
    if (spec.frames < 3) throw DataError("synth: need at least 3 frames");
    if (!(spec.fps > 0.0) || !std::isfinite(spec.fps)) throw DataError("synth: fps must be > 0");
    if (spec.dims != 2 && spec.dims != 3) throw DataError("synth: dims must be 2 or 3");
    if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std)) throw DataError("synth: noise must be >= 0");
    if (!spec.frequencies.empty() && spec.frequencies.size() != spec.n_classes)
        throw DataError("synth: need one frequency per class");
    for (double f : spec.frequencies)
        if (!(f > 0.0) || !std::isfinite(f)) throw DataError("synth: frequencies must be > 0");

    SynthDataset out;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        for (std::size_t v = 0; v < spec.videos_per_class; ++v) {
            Rng rng(spec.seed ^ splitmix64(c * 1000003ULL + v + 1));
            MotionSequence seq = synth_sequence(spec, c, v, rng);
            ManifestEntry entry;
            entry.path = seq.video_id + ".json";
            entry.label = synth_label(c);
            entry.group_id = "g_" + seq.video_id;
            entry.video_id = seq.video_id;
            out.manifest.entries.push_back(std::move(entry));
            out.sequences.push_back(std::move(seq));
        }
    }
    return out;
}

/// Writes one canonical JSON per video plus manifest.csv into `dir`.
inline std::filesystem::path write_dataset(const SynthDataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < data.sequences.size(); ++i)
        write_sequence(data.sequences[i], dir / data.manifest.entries[i].path);
    const auto manifest_path = dir / "manifest.csv";
    DatasetManifest relative = data.manifest;
    for (auto& e : relative.entries) e.path = dir / e.path;
    write_manifest(relative, manifest_path);
    return manifest_path;
}

}  // namespace dancestyle
