#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace dancestyle {

struct ManifestEntry {
    std::filesystem::path path;  // resolved against the manifest's directory when loaded
    std::string label;
    std::string group_id;
    std::string video_id;
    std::optional<std::string> level;  // "basic" or "advanced"
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    /// video_id -> group_id; throws if a video maps to two groups.
    std::map<std::string, std::string> group_of_video() const {
        std::map<std::string, std::string> out;
        for (const auto& e : entries) {
            auto [it, inserted] = out.emplace(e.video_id, e.group_id);
            if (!inserted && it->second != e.group_id)
                throw DataError("manifest: video '" + e.video_id + "' belongs to two groups");
        }
        return out;
    }
};

inline constexpr std::array<std::string_view, 5> kManifestColumns = {"path", "label", "group_id", "video_id", "level"};

struct ManifestOptions {
    bool require_paths = true;   // every path must exist
    bool require_labels = true;  // stubs written by convert-bvh have empty labels
};

/// Parses manifest CSV text. Relative paths are resolved against `base_dir`.
inline DatasetManifest parse_manifest_text(std::string_view text, const std::filesystem::path& base_dir,
                                           const std::string& source = "manifest", ManifestOptions options = {}) {
    const auto lines = csv::lines(text);
    if (lines.empty()) throw DataError(source + ": empty manifest (no header)");
    const auto header = csv::split_record(lines.front().second);
    // level is optional; the other columns are required
    std::array<std::size_t, 5> column{};
    for (std::size_t c = 0; c < kManifestColumns.size(); ++c) {
        const auto it = std::find(header.begin(), header.end(), kManifestColumns[c]);
        if (it == header.end() && c < 4)
            throw DataError(source + ": missing column '" + std::string(kManifestColumns[c]) + "'");
        column[c] = static_cast<std::size_t>(it - header.begin());
    }
    const bool has_level = column[4] < header.size();
    if (lines.size() == 1) throw DataError(source + ": empty manifest (no entries)");

    DatasetManifest manifest;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = source + " line " + std::to_string(lines[i].first);
        const auto fields = csv::split_record(lines[i].second);
        if (fields.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        ManifestEntry entry;
        entry.path = fields[column[0]];
        entry.label = fields[column[1]];
        entry.group_id = fields[column[2]];
        entry.video_id = fields[column[3]];
        const std::string level = has_level ? fields[column[4]] : std::string();
        if (entry.path.empty()) throw DataError(where + ": empty path");
        if (entry.video_id.empty()) throw DataError(where + ": empty video_id");
        if (entry.group_id.empty()) throw DataError(where + ": empty group_id");
        if (options.require_labels && entry.label.empty())
            throw DataError(where + ": empty label for video '" + entry.video_id + "'");
        if (!level.empty()) {
            if (level != "basic" && level != "advanced")
                throw DataError(where + ": level must be 'basic', 'advanced' or empty, got '" + level + "'");
            entry.level = level;
        }
        if (!seen.insert(entry.video_id).second)
            throw DataError(source + ": duplicate video_id '" + entry.video_id + "'");
        if (entry.path.is_relative()) entry.path = base_dir / entry.path;
        if (options.require_paths && !std::filesystem::exists(entry.path))
            throw DataError(where + ": file not found: " + entry.path.string());
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path, ManifestOptions options = {}) {
    return parse_manifest_text(read_text_file(path), path.parent_path(), path.string(), options);
}

/// Writes a manifest; paths are written relative to the manifest's directory when possible.
inline void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::string out = "path,label,group_id,video_id,level\n";
    const auto base = path.parent_path();
    for (const auto& e : manifest.entries) {
        std::filesystem::path p = e.path;
        if (p.is_absolute() && !base.empty()) {
            const auto rel = p.lexically_relative(std::filesystem::absolute(base));
            if (!rel.empty()) p = rel;
        } else if (!base.empty()) {
            const auto rel = p.lexically_relative(base);
            if (!rel.empty() && *rel.begin() != "..") p = rel;
        }
        out += csv::escape(p.generic_string()) + ',' + csv::escape(e.label) + ',' + csv::escape(e.group_id) + ',' +
               csv::escape(e.video_id) + ',' + csv::escape(e.level.value_or("")) + '\n';
    }
    write_text_file(path, out);
}

/// Keeps only entries at the given level ("basic"/"advanced"); an empty filter keeps all.
inline DatasetManifest filter_level(const DatasetManifest& manifest, std::string_view level) {
    if (level.empty()) return manifest;
    DatasetManifest out;
    for (const auto& e : manifest.entries)
        if (e.level && *e.level == level) out.entries.push_back(e);
    return out;
}

}  // namespace dancestyle
