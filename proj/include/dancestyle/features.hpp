#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "sequence.hpp"
#include "spectral.hpp"

namespace dancestyle {

using Signal = std::vector<double>;

// ---------------------------------------------------------------------------
// Frame-wise body, shape and space features

inline double distance(const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline Point midpoint(const Point& a, const Point& b) {
    return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

/// Midpoint of the two hip keypoints of frame t.
inline Point hip_center(const MotionSequence& seq, std::size_t t, const ResolvedRoles& roles) {
    return midpoint(seq.point(t, roles[Role::hip_left]), seq.point(t, roles[Role::hip_right]));
}

/// Distance of every joint (hips included) from the hip center; N_j signals of length T.
inline std::vector<Signal> joint_hip_distances(const MotionSequence& seq, const ResolvedRoles& roles) {
    const std::size_t T = seq.frame_count();
    std::vector<Signal> out(seq.joint_count(), Signal(T));
    for (std::size_t t = 0; t < T; ++t) {
        const Point hip = hip_center(seq, t, roles);
        for (std::size_t j = 0; j < seq.joint_count(); ++j) out[j][t] = distance(seq.point(t, j), hip);
    }
    return out;
}

struct ExtremitySignals {
    Signal hands;
    Signal feet;
    Signal cross;  // mean of the two hand-to-opposite-foot distances
};

inline ExtremitySignals extremity_distances(const MotionSequence& seq, const ResolvedRoles& roles) {
    const std::size_t T = seq.frame_count();
    ExtremitySignals out{Signal(T), Signal(T), Signal(T)};
    for (std::size_t t = 0; t < T; ++t) {
        const Point hl = seq.point(t, roles[Role::hand_left]);
        const Point hr = seq.point(t, roles[Role::hand_right]);
        const Point fl = seq.point(t, roles[Role::foot_left]);
        const Point fr = seq.point(t, roles[Role::foot_right]);
        out.hands[t] = distance(hr, hl);
        out.feet[t] = distance(fr, fl);
        out.cross[t] = 0.5 * (distance(hr, fl) + distance(hl, fr));
    }
    return out;
}

/// Removes 2*pi jumps: whenever a raw step exceeds pi in magnitude, the
/// running offset changes by -+2*pi so every output step lies in (-pi, pi].
inline Signal unwrap_angles(std::span<const double> raw) {
    Signal out(raw.begin(), raw.end());
    if (raw.empty()) return out;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double offset = 0.0;
    for (std::size_t t = 1; t < raw.size(); ++t) {
        const double delta = raw[t] - raw[t - 1];
        if (std::abs(delta) > std::numbers::pi) offset -= two_pi * std::round(delta / two_pi);
        out[t] = raw[t] + offset;
    }
    return out;
}

/// Ground-plane axes (first, second) for a vertical axis; yaw = atan2(first, second).
inline std::array<std::size_t, 2> ground_axes(int vertical_axis) {
    switch (vertical_axis) {
        case 0: return {1, 2};
        case 2: return {0, 1};
        default: return {0, 2};
    }
}

/// Unwrapped torso yaw. The chest center is the shoulder midpoint; a frame whose
/// torso axis has no ground-plane component keeps the previous angle (0 at t=0).
inline Signal torso_yaw(const MotionSequence& seq, const ResolvedRoles& roles) {
    if (seq.dims != 3) throw DataError(seq.video_id + ": torso yaw needs 3D keypoints");
    const auto [a, b] = ground_axes(roles.vertical_axis);
    const std::size_t T = seq.frame_count();
    Signal raw(T);
    double previous = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const Point chest = midpoint(seq.point(t, roles[Role::shoulder_left]), seq.point(t, roles[Role::shoulder_right]));
        const Point hip = hip_center(seq, t, roles);
        const double oa = chest[a] - hip[a];
        const double ob = chest[b] - hip[b];
        if (oa == 0.0 && ob == 0.0) {
            raw[t] = previous;
        } else {
            raw[t] = std::atan2(oa, ob);
        }
        previous = raw[t];
    }
    return unwrap_angles(raw);
}

// ---------------------------------------------------------------------------
// Temporal and spectral derivatives

/// Forward differences divided by dt; output length is input length - 1.
inline Signal velocity(std::span<const double> signal, double dt) {
    if (!(dt > 0.0)) throw DataError("velocity: dt must be > 0");
    if (signal.size() < 2) throw DataError("velocity: need at least 2 samples");
    Signal out(signal.size() - 1);
    for (std::size_t t = 1; t < signal.size(); ++t) out[t - 1] = (signal[t] - signal[t - 1]) / dt;
    return out;
}

inline Signal acceleration(std::span<const double> vel, double dt) { return velocity(vel, dt); }

/// |FFT(x - mean(x))| over all T bins.
inline Signal spectral_channel(std::span<const double> signal) {
    if (signal.empty()) throw DataError("spectral_channel: empty signal");
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(signal.size());
    Signal centered(signal.size());
    for (std::size_t t = 0; t < signal.size(); ++t) centered[t] = signal[t] - mean;
    return magnitudes(fft(centered));
}

// ---------------------------------------------------------------------------
// Segment aggregation

struct SegmentStat {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

/// Segment s covers [floor(s*L/N_s), floor((s+1)*L/N_s)).
inline std::vector<SegmentStat> segment_aggregate(std::span<const double> signal, std::size_t segments) {
    const std::size_t L = signal.size();
    if (segments == 0) throw DataError("segment_aggregate: segment count must be >= 1");
    if (L < segments)
        throw DataError("segment_aggregate: signal length " + std::to_string(L) + " < segment count " +
                        std::to_string(segments));
    std::vector<SegmentStat> out(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t begin = s * L / segments;
        const std::size_t end = (s + 1) * L / segments;
        const auto n = static_cast<double>(end - begin);
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += signal[i];
        mean /= n;
        double var = 0.0;
        for (std::size_t i = begin; i < end; ++i) var += (signal[i] - mean) * (signal[i] - mean);
        out[s] = {mean, std::sqrt(var / n)};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full per-video extraction

enum class SignalKind : std::size_t { f, v, a, fft };

inline constexpr std::array<std::string_view, 4> kKindNames = {"f", "v", "a", "fft"};
inline constexpr std::array<std::string_view, 2> kStatNames = {"mean", "std"};

/// Per-channel frame signal f with its velocity, acceleration and spectral magnitude.
struct FeatureSignals {
    std::vector<std::string> channel_names;
    std::vector<Signal> f;
    std::vector<Signal> v;
    std::vector<Signal> a;
    std::vector<Signal> fmag;

    std::size_t channel_count() const { return channel_names.size(); }
};

/// Channels: d_<joint> for every joint, e_hands, e_feet, e_cross, and yaw (3D only).
inline FeatureSignals compute_signals(const MotionSequence& seq, const ResolvedRoles& roles) {
    validate(seq);
    FeatureSignals out;
    auto distances = joint_hip_distances(seq, roles);
    for (std::size_t j = 0; j < seq.joint_count(); ++j) {
        out.channel_names.push_back("d_" + seq.joint_names[j]);
        out.f.push_back(std::move(distances[j]));
    }
    auto extremities = extremity_distances(seq, roles);
    out.channel_names.emplace_back("e_hands");
    out.f.push_back(std::move(extremities.hands));
    out.channel_names.emplace_back("e_feet");
    out.f.push_back(std::move(extremities.feet));
    out.channel_names.emplace_back("e_cross");
    out.f.push_back(std::move(extremities.cross));
    if (seq.dims == 3) {
        out.channel_names.emplace_back("yaw");
        out.f.push_back(torso_yaw(seq, roles));
    }
    const double dt = seq.dt();
    for (const auto& f : out.f) {
        out.v.push_back(velocity(f, dt));
        out.a.push_back(acceleration(out.v.back(), dt));
        out.fmag.push_back(spectral_channel(f));
    }
    return out;
}

struct ExtractionOptions {
    std::size_t segments = 10;
    bool include_fft = true;
};

struct SegmentFeatureVector {
    std::string video_id;
    std::size_t segment_index = 0;
    std::vector<double> values;
    std::string label;
    std::string group_id;
};

inline std::vector<SignalKind> active_kinds(bool include_fft) {
    if (include_fft) return {SignalKind::f, SignalKind::v, SignalKind::a, SignalKind::fft};
    return {SignalKind::f, SignalKind::v, SignalKind::a};
}

/// Column names of one segment row: `<channel>|<kind>|<stat>`, channel-major.
inline std::vector<std::string> segment_column_names(const std::vector<std::string>& channels, bool include_fft = true) {
    std::vector<std::string> names;
    for (const auto& channel : channels)
        for (SignalKind kind : active_kinds(include_fft))
            for (std::string_view stat : kStatNames)
                names.push_back(channel + "|" + std::string(kKindNames[static_cast<std::size_t>(kind)]) + "|" +
                                std::string(stat));
    return names;
}

/// Fully qualified feature name `<channel>|<kind>|<stat>|s<idx>`.
inline std::string segment_feature_name(std::string_view column, std::size_t segment) {
    return std::string(column) + "|s" + std::to_string(segment);
}

/// One descriptor per segment; each of f, v, a, |F| is segmented over its own length.
inline std::vector<SegmentFeatureVector> extract_segment_features(const FeatureSignals& signals, const std::string& video_id,
                                                                  const ExtractionOptions& options = {}) {
    const std::size_t segments = options.segments;
    if (segments == 0) throw DataError(video_id + ": segment count must be >= 1");
    if (signals.channel_count() == 0 || signals.a.front().size() < segments)
        throw DataError(video_id + ": sequence too short for " + std::to_string(segments) + " segments (need T - 2 >= N_s)");
    const auto kinds = active_kinds(options.include_fft);
    std::vector<SegmentFeatureVector> out(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        out[s].video_id = video_id;
        out[s].segment_index = s;
        out[s].values.reserve(signals.channel_count() * kinds.size() * 2);
    }
    for (std::size_t c = 0; c < signals.channel_count(); ++c) {
        for (SignalKind kind : kinds) {
            const Signal* source = nullptr;
            switch (kind) {
                case SignalKind::f: source = &signals.f[c]; break;
                case SignalKind::v: source = &signals.v[c]; break;
                case SignalKind::a: source = &signals.a[c]; break;
                case SignalKind::fft: source = &signals.fmag[c]; break;
            }
            const auto stats = segment_aggregate(*source, segments);
            for (std::size_t s = 0; s < segments; ++s) {
                out[s].values.push_back(stats[s].mean);
                out[s].values.push_back(stats[s].std);
            }
        }
    }
    return out;
}

inline std::vector<SegmentFeatureVector> extract_segment_features(const MotionSequence& seq, const JointRoleMap& role_map,
                                                                  const ExtractionOptions& options = {}) {
    validate(seq);
    if (seq.frame_count() < options.segments + 2)
        throw DataError(seq.video_id + ": sequence too short for " + std::to_string(options.segments) +
                        " segments (need T - 2 >= N_s)");
    const ResolvedRoles roles = resolve_roles(role_map, seq);
    return extract_segment_features(compute_signals(seq, roles), seq.video_id, options);
}

}  // namespace dancestyle
