#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "classifiers/model.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "text.hpp"

namespace dancestyle {

/// Defaults for extraction and evaluation. JSON field names match the member names.
struct RunConfig {
    std::size_t segments = 10;
    std::string model = "gradient_boosting";
    nlohmann::json hyperparameters = nlohmann::json::object();
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    std::string eval_mode = "mv";
    int dims = 3;
    std::string role_map;  // empty: COCO default
    bool include_fft = true;
    bool raw_keypoints = false;
    std::string level;  // empty: all levels

    void validate() const {
        if (segments < 1) throw DataError("config: segments must be >= 1");
        if (folds < 2) throw DataError("config: folds must be >= 2");
        if (dims != 2 && dims != 3) throw DataError("config: dims must be 2 or 3");
        if (!level.empty() && level != "basic" && level != "advanced")
            throw DataError("config: level must be basic, advanced or empty");
        parse_model_kind(model);
        parse_eval_mode(eval_mode);
    }

    ModelSpec model_spec() const {
        ModelSpec spec;
        spec.kind = parse_model_kind(model);
        spec.seed = seed;
        apply_hyperparameters(spec, hyperparameters);
        return spec;
    }
};

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"segments", c.segments},       {"model", c.model},
            {"hyperparameters", c.hyperparameters}, {"folds", c.folds},
            {"seed", c.seed},               {"eval_mode", c.eval_mode},
            {"dims", c.dims},               {"role_map", c.role_map},
            {"include_fft", c.include_fft}, {"raw_keypoints", c.raw_keypoints},
            {"level", c.level}};
}

inline RunConfig parse_run_config(std::string_view text, const std::string& source = "config") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(source + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw DataError(source + ": expected a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "segments") c.segments = value.get<std::size_t>();
            else if (key == "model") c.model = value.get<std::string>();
            else if (key == "hyperparameters") c.hyperparameters = value;
            else if (key == "folds") c.folds = value.get<std::size_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "eval_mode") c.eval_mode = value.get<std::string>();
            else if (key == "dims") c.dims = value.get<int>();
            else if (key == "role_map") c.role_map = value.get<std::string>();
            else if (key == "include_fft") c.include_fft = value.get<bool>();
            else if (key == "raw_keypoints") c.raw_keypoints = value.get<bool>();
            else if (key == "level") c.level = value.get<std::string>();
            else throw DataError(source + ": unknown field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(source + ": wrong value type: " + e.what());
    }
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    RunConfig c = parse_run_config(read_text_file(path), path.string());
    // role map paths are relative to the config file
    if (!c.role_map.empty() && std::filesystem::path(c.role_map).is_relative())
        c.role_map = (path.parent_path() / c.role_map).string();
    return c;
}

}  // namespace dancestyle
