#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>

#include "evaluation.hpp"
#include "text.hpp"

namespace dancestyle {

/// `accuracy: MM.MM ± SS.SS`
inline std::string accuracy_line(const EvaluationReport& report) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "accuracy: %.2f \xC2\xB1 %.2f", report.mean, report.std);
    return buffer;
}

inline std::string xml_escape(std::string_view text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

/// Row-normalized confusion heatmap, true class on the y axis.
inline std::string confusion_svg(const ConfusionMatrix& matrix, std::string_view title = "Confusion matrix (%)") {
    const std::size_t C = matrix.class_names.size();
    const auto pct = matrix.row_percentages();
    constexpr int cell = 56;
    std::size_t longest = 4;
    for (const auto& name : matrix.class_names) longest = std::max(longest, name.size());
    const int margin_left = 30 + static_cast<int>(longest) * 7;
    const int margin_top = 50;
    const int margin_bottom = 30 + static_cast<int>(longest) * 7;
    const int width = margin_left + static_cast<int>(C) * cell + 20;
    const int height = margin_top + static_cast<int>(C) * cell + margin_bottom;

    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\" "
                  "font-family=\"sans-serif\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">%s</text>\n", width / 2,
                  xml_escape(title).c_str());
    svg += buf;
    for (std::size_t i = 0; i < C; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            const double v = pct[i][j];
            // white -> dark blue
            const double t = v / 100.0;
            const int r = static_cast<int>(247 - t * (247 - 8));
            const int g = static_cast<int>(251 - t * (251 - 48));
            const int b = static_cast<int>(255 - t * (255 - 107));
            const int x = margin_left + static_cast<int>(j) * cell;
            const int y = margin_top + static_cast<int>(i) * cell;
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\" stroke=\"#999\"/>\n", x, y,
                          cell, cell, r, g, b);
            svg += buf;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\" fill=\"%s\">%.1f</text>\n",
                          x + cell / 2, y + cell / 2 + 4, t > 0.5 ? "white" : "black", v);
            svg += buf;
        }
    }
    for (std::size_t i = 0; i < C; ++i) {
        const std::string label = xml_escape(matrix.class_names[i]);
        std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"end\">%s</text>\n",
                      margin_left - 6, margin_top + static_cast<int>(i) * cell + cell / 2 + 4, label.c_str());
        svg += buf;
        const int x = margin_left + static_cast<int>(i) * cell + cell / 2;
        const int y = margin_top + static_cast<int>(C) * cell + 8;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"end\" transform=\"rotate(-60 %d %d)\">%s</text>\n",
                      x, y, x, y, label.c_str());
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf), "<text x=\"14\" y=\"%d\" font-size=\"12\" transform=\"rotate(-90 14 %d)\" "
                                    "text-anchor=\"middle\">true</text>\n",
                  margin_top + static_cast<int>(C) * cell / 2, margin_top + static_cast<int>(C) * cell / 2);
    svg += buf;
    std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\">predicted</text>\n",
                  margin_left + static_cast<int>(C) * cell / 2, height - 8);
    svg += buf;
    svg += "</svg>\n";
    return svg;
}

/// `feature,importance` rows, highest first.
inline std::string importances_csv(const EvaluationReport& report) {
    auto sorted = report.importances;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
    std::string out = "feature,importance\n";
    for (const auto& [name, score] : sorted) out += csv::escape(name) + ',' + format_double(score) + '\n';
    return out;
}

}  // namespace dancestyle
