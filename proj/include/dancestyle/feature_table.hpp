#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "text.hpp"

namespace dancestyle {

/// Segment-level feature matrix: one row per (video, segment).
struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<SegmentFeatureVector> rows;

    void sort_rows() {
        std::sort(rows.begin(), rows.end(), [](const SegmentFeatureVector& a, const SegmentFeatureVector& b) {
            return std::tie(a.video_id, a.segment_index) < std::tie(b.video_id, b.segment_index);
        });
    }
};

inline constexpr std::array<std::string_view, 4> kFeatureKeyColumns = {"video_id", "segment_index", "label", "group_id"};

inline std::string feature_table_to_csv(const FeatureTable& table) {
    std::string out;
    out += "video_id,segment_index,label,group_id";
    for (const auto& name : table.feature_names) out += ',' + csv::escape(name);
    out += '\n';
    for (const auto& row : table.rows) {
        out += csv::escape(row.video_id) + ',' + std::to_string(row.segment_index) + ',' + csv::escape(row.label) + ',' +
               csv::escape(row.group_id);
        for (double v : row.values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline FeatureTable parse_feature_table(std::string_view text, const std::string& source = "features") {
    const auto lines = csv::lines(text);
    if (lines.empty()) throw DataError(source + ": empty feature table");
    const auto header = csv::split_record(lines.front().second);
    if (header.size() < kFeatureKeyColumns.size() + 1)
        throw DataError(source + ": header must be video_id,segment_index,label,group_id followed by feature columns");
    for (std::size_t c = 0; c < kFeatureKeyColumns.size(); ++c)
        if (header[c] != kFeatureKeyColumns[c])
            throw DataError(source + ": column " + std::to_string(c + 1) + " must be '" + std::string(kFeatureKeyColumns[c]) +
                            "', got '" + header[c] + "'");
    FeatureTable table;
    table.feature_names.assign(header.begin() + 4, header.end());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = source + " line " + std::to_string(lines[i].first);
        const auto fields = csv::split_record(lines[i].second);
        if (fields.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        SegmentFeatureVector row;
        row.video_id = fields[0];
        const auto seg = parse_double(fields[1]);
        if (!seg || *seg < 0 || *seg != static_cast<double>(static_cast<std::size_t>(*seg)))
            throw DataError(where + ": invalid segment_index '" + fields[1] + "'");
        row.segment_index = static_cast<std::size_t>(*seg);
        row.label = fields[2];
        row.group_id = fields[3];
        if (row.video_id.empty() || row.label.empty() || row.group_id.empty())
            throw DataError(where + ": video_id, label and group_id must be non-empty");
        row.values.reserve(fields.size() - 4);
        for (std::size_t c = 4; c < fields.size(); ++c) {
            const auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw DataError(where + ": invalid value '" + fields[c] + "' in column '" + header[c] + "'");
            row.values.push_back(*v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw DataError(source + ": feature table has no rows");
    return table;
}

inline FeatureTable load_feature_table(const std::filesystem::path& path) {
    return parse_feature_table(read_text_file(path), path.string());
}

inline void write_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
    write_text_file(path, feature_table_to_csv(table));
}

}  // namespace dancestyle
