#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "config.hpp"
#include "evaluation.hpp"
#include "feature_table.hpp"
#include "features.hpp"
#include "manifest.hpp"
#include "sequence.hpp"

namespace dancestyle {

/// Channel names produced by compute_signals for a sequence layout.
inline std::vector<std::string> channel_names(const std::vector<std::string>& joint_names, int dims) {
    std::vector<std::string> names;
    for (const auto& j : joint_names) names.push_back("d_" + j);
    names.insert(names.end(), {"e_hands", "e_feet", "e_cross"});
    if (dims == 3) names.emplace_back("yaw");
    return names;
}

/// Brings a sequence to the configured dimensionality (3D -> 2D drops the depth axis).
inline MotionSequence conform_dims(const MotionSequence& seq, int dims) {
    if (seq.dims == dims) return seq;
    if (dims == 2) return project_to_2d(seq, 2);
    throw DataError(seq.video_id + ": 3D features requested but the sequence is 2D");
}

struct ExtractionFailure {
    std::string path;
    std::string message;
};

/// Flattened per-frame coordinates of the first `frames` frames: one row per video.
inline FeatureTable raw_keypoint_table(const std::vector<MotionSequence>& sequences, const DatasetManifest& manifest) {
    FeatureTable table;
    if (sequences.empty()) return table;
    std::size_t frames = sequences.front().frame_count();
    for (const auto& s : sequences) frames = std::min(frames, s.frame_count());
    const auto& ref = sequences.front();
    static constexpr std::array<char, 3> axes = {'x', 'y', 'z'};
    for (std::size_t t = 0; t < frames; ++t)
        for (const auto& joint : ref.joint_names)
            for (int d = 0; d < ref.dims; ++d)
                table.feature_names.push_back(joint + "|" + axes[static_cast<std::size_t>(d)] + "|t" + std::to_string(t));
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const auto& s = sequences[i];
        if (s.joint_names != ref.joint_names || s.dims != ref.dims)
            throw DataError(s.video_id + ": raw keypoint mode needs identical joint layouts across videos");
        SegmentFeatureVector row;
        row.video_id = manifest.entries[i].video_id;
        row.label = manifest.entries[i].label;
        row.group_id = manifest.entries[i].group_id;
        row.values.assign(s.coords.begin(), s.coords.begin() + static_cast<long>(frames * s.joint_count() * static_cast<std::size_t>(s.dims)));
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Runs feature extraction over every manifest entry. Files that fail are
/// collected in `failures` and skipped; rows are sorted by (video_id, segment).
inline FeatureTable extract_features(const DatasetManifest& manifest, const JointRoleMap& roles, const RunConfig& config,
                                     std::vector<ExtractionFailure>& failures) {
    config.validate();
    if (manifest.entries.empty()) throw DataError("extract: manifest has no entries");
    std::vector<MotionSequence> loaded;
    DatasetManifest kept;
    for (const auto& entry : manifest.entries) {
        try {
            MotionSequence seq = conform_dims(parse_sequence(entry.path), config.dims);
            seq.video_id = entry.video_id;
            loaded.push_back(std::move(seq));
            kept.entries.push_back(entry);
        } catch (const DataError& e) {
            failures.push_back({entry.path.string(), e.what()});
        }
    }

    FeatureTable table;
    if (config.raw_keypoints) {
        table = raw_keypoint_table(loaded, kept);
        table.sort_rows();
        return table;
    }
    ExtractionOptions options;
    options.segments = config.segments;
    options.include_fft = config.include_fft;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        const auto& seq = loaded[i];
        const auto& entry = kept.entries[i];
        try {
            auto columns = segment_column_names(channel_names(seq.joint_names, seq.dims), options.include_fft);
            if (table.feature_names.empty()) {
                table.feature_names = std::move(columns);
            } else if (columns != table.feature_names) {
                throw DataError(seq.video_id + ": joint layout differs from earlier videos");
            }
            for (auto& row : extract_segment_features(seq, roles, options)) {
                row.label = entry.label;
                row.group_id = entry.group_id;
                table.rows.push_back(std::move(row));
            }
        } catch (const DataError& e) {
            failures.push_back({entry.path.string(), e.what()});
        }
    }
    table.sort_rows();
    return table;
}

/// Grouped k-fold evaluation of a feature table under `config`.
inline EvaluationReport run_crossval(const FeatureTable& table, const RunConfig& config) {
    config.validate();
    std::vector<std::string> groups;
    groups.reserve(table.rows.size());
    for (const auto& row : table.rows) groups.push_back(row.group_id);
    const FoldPlan plan = grouped_kfold(groups, config.folds, config.seed);
    return cross_validate(table, config.model_spec(), plan, parse_eval_mode(config.eval_mode), to_json(config));
}

}  // namespace dancestyle
