#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classifiers/model.hpp"
#include "error.hpp"
#include "feature_table.hpp"
#include "rng.hpp"

namespace dancestyle {

/// k disjoint sets of group ids; fold i is the test set of split i.
struct FoldPlan {
    std::vector<std::vector<std::string>> folds;
    std::uint64_t seed = 0;

    std::size_t k() const { return folds.size(); }
};

/// Shuffles the distinct groups with a seeded Rng and deals them round-robin into k folds.
inline FoldPlan grouped_kfold(std::span<const std::string> groups, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw EvaluationError("grouped_kfold: need k >= 2 folds");
    std::vector<std::string> distinct(groups.begin(), groups.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < k)
        throw EvaluationError("grouped_kfold: " + std::to_string(distinct.size()) + " groups cannot fill " +
                              std::to_string(k) + " folds");
    Rng rng(seed);
    rng.shuffle(std::span<std::string>(distinct));
    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);
    for (std::size_t i = 0; i < distinct.size(); ++i) plan.folds[i % k].push_back(distinct[i]);
    return plan;
}

/// Most frequent label; ties go to the highest summed probability, then the lowest index.
inline int majority_vote(std::span<const int> labels, const Matrix& probas) {
    if (labels.empty()) throw EvaluationError("majority_vote: no segments");
    const std::size_t C = probas.cols;
    std::vector<std::size_t> votes(C, 0);
    std::vector<double> mass(C, 0.0);
    for (std::size_t s = 0; s < labels.size(); ++s) {
        if (labels[s] < 0 || static_cast<std::size_t>(labels[s]) >= C) throw EvaluationError("majority_vote: label out of range");
        ++votes[static_cast<std::size_t>(labels[s])];
        for (std::size_t c = 0; c < C; ++c) mass[c] += probas(s, c);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && mass[c] > mass[best])) best = c;
    }
    return static_cast<int>(best);
}

struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::vector<std::size_t>> counts;  // counts[true][predicted]

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts)
            for (auto c : row) t += c;
        return t;
    }
    std::size_t trace() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
        return t;
    }
    double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(total()); }

    /// Percent of each true class predicted as each class; empty rows stay zero.
    std::vector<std::vector<double>> row_percentages() const {
        std::vector<std::vector<double>> out(counts.size(), std::vector<double>(counts.size(), 0.0));
        for (std::size_t i = 0; i < counts.size(); ++i) {
            std::size_t row_total = 0;
            for (auto c : counts[i]) row_total += c;
            if (row_total == 0) continue;
            for (std::size_t j = 0; j < counts.size(); ++j)
                out[i][j] = 100.0 * static_cast<double>(counts[i][j]) / static_cast<double>(row_total);
        }
        return out;
    }
};

inline ConfusionMatrix confusion(std::span<const std::string> predictions, std::span<const std::string> labels,
                                 const std::vector<std::string>& class_names) {
    if (predictions.size() != labels.size()) throw EvaluationError("confusion: predictions and labels differ in length");
    auto index_of = [&](const std::string& name) {
        const auto it = std::find(class_names.begin(), class_names.end(), name);
        if (it == class_names.end()) throw EvaluationError("confusion: unknown class '" + name + "'");
        return static_cast<std::size_t>(it - class_names.begin());
    };
    ConfusionMatrix m;
    m.class_names = class_names;
    m.counts.assign(class_names.size(), std::vector<std::size_t>(class_names.size(), 0));
    for (std::size_t i = 0; i < labels.size(); ++i) ++m.counts[index_of(labels[i])][index_of(predictions[i])];
    return m;
}

enum class EvalMode { majority_vote, temporal_integration };

inline std::string_view to_string(EvalMode mode) { return mode == EvalMode::majority_vote ? "mv" : "ti"; }

inline EvalMode parse_eval_mode(std::string_view name) {
    if (name == "mv") return EvalMode::majority_vote;
    if (name == "ti") return EvalMode::temporal_integration;
    throw DataError("unknown eval mode '" + std::string(name) + "' (expected mv or ti)");
}

struct VideoPrediction {
    std::string video_id;
    std::string group_id;
    std::size_t fold = 0;
    std::string truth;
    std::string predicted;
};

struct EvaluationReport {
    nlohmann::json config;
    std::vector<double> per_fold_accuracy;  // percent
    double mean = 0.0;                      // percent
    double std = 0.0;                       // population std, percent
    ConfusionMatrix confusion;
    std::vector<std::pair<std::string, double>> importances;  // descending; empty for non-tree models
    std::vector<VideoPrediction> predictions;
    std::vector<std::size_t> train_samples_per_fold;
};

namespace evaluation_detail {

struct Video {
    std::string video_id;
    std::string label;
    std::string group_id;
    std::vector<const SegmentFeatureVector*> segments;  // ordered by segment index
};

inline std::vector<Video> collect_videos(const FeatureTable& table) {
    std::map<std::string, Video> by_id;
    for (const auto& row : table.rows) {
        if (row.values.size() != table.feature_names.size())
            throw EvaluationError("video '" + row.video_id + "': row width does not match feature columns");
        auto [it, inserted] = by_id.try_emplace(row.video_id);
        Video& v = it->second;
        if (inserted) {
            v.video_id = row.video_id;
            v.label = row.label;
            v.group_id = row.group_id;
        } else if (v.label != row.label) {
            throw EvaluationError("video '" + row.video_id + "' has inconsistent labels");
        } else if (v.group_id != row.group_id) {
            throw EvaluationError("video '" + row.video_id + "' has inconsistent group ids");
        }
        v.segments.push_back(&row);
    }
    std::vector<Video> videos;
    std::size_t expected = 0;
    for (auto& [id, v] : by_id) {
        std::sort(v.segments.begin(), v.segments.end(),
                  [](const auto* a, const auto* b) { return a->segment_index < b->segment_index; });
        for (std::size_t s = 0; s < v.segments.size(); ++s)
            if (v.segments[s]->segment_index != s)
                throw EvaluationError("video '" + id + "': missing or duplicate segment " + std::to_string(s));
        if (expected == 0) expected = v.segments.size();
        if (v.segments.size() != expected)
            throw EvaluationError("video '" + id + "' has " + std::to_string(v.segments.size()) + " segments, expected " +
                                  std::to_string(expected));
        videos.push_back(std::move(v));
    }
    return videos;
}

}  // namespace evaluation_detail

/// Grouped cross-validation at video level.
///
/// mv: every segment is a sample; a video's label is the majority vote of its
/// segment predictions. ti: a video's segment vectors are concatenated in
/// segment order into one sample, giving one prediction per video.
/// Throws LeakageError if any group lands on both sides of a split.
inline EvaluationReport cross_validate(const FeatureTable& table, const ModelSpec& spec, const FoldPlan& plan, EvalMode mode,
                                       const nlohmann::json& extra_config = nlohmann::json::object()) {
    using evaluation_detail::Video;
    const std::vector<Video> videos = evaluation_detail::collect_videos(table);
    if (videos.empty()) throw EvaluationError("cross_validate: no videos");
    const std::size_t n_segments = videos.front().segments.size();

    std::vector<std::string> class_names;
    for (const auto& v : videos) class_names.push_back(v.label);
    std::sort(class_names.begin(), class_names.end());
    class_names.erase(std::unique(class_names.begin(), class_names.end()), class_names.end());
    if (class_names.size() < 2) throw EvaluationError("cross_validate: need at least 2 classes");
    auto class_index = [&](const std::string& label) {
        return static_cast<int>(std::lower_bound(class_names.begin(), class_names.end(), label) - class_names.begin());
    };

    std::set<std::string> data_groups;
    for (const auto& v : videos) data_groups.insert(v.group_id);
    std::set<std::string> plan_groups;
    for (const auto& fold : plan.folds) plan_groups.insert(fold.begin(), fold.end());
    for (const auto& g : data_groups)
        if (!plan_groups.count(g)) throw EvaluationError("fold plan does not assign group '" + g + "'");
    for (const auto& g : plan_groups)
        if (!data_groups.count(g)) throw EvaluationError("fold plan names unknown group '" + g + "'");
    if (plan.k() < 2) throw EvaluationError("fold plan needs at least 2 folds");

    std::vector<std::string> feature_names;
    if (mode == EvalMode::majority_vote) {
        feature_names = table.feature_names;
    } else {
        for (std::size_t s = 0; s < n_segments; ++s)
            for (const auto& name : table.feature_names) feature_names.push_back(segment_feature_name(name, s));
    }

    EvaluationReport report;
    report.confusion.class_names = class_names;
    report.confusion.counts.assign(class_names.size(), std::vector<std::size_t>(class_names.size(), 0));
    std::vector<double> importance_sum;
    const bool tree_model = spec.kind == ModelKind::random_forest || spec.kind == ModelKind::gradient_boosting;

    for (std::size_t fold = 0; fold < plan.k(); ++fold) {
        const std::set<std::string> test_groups(plan.folds[fold].begin(), plan.folds[fold].end());
        std::set<std::string> train_groups;
        for (std::size_t other = 0; other < plan.k(); ++other)
            if (other != fold) train_groups.insert(plan.folds[other].begin(), plan.folds[other].end());
        for (const auto& g : test_groups)
            if (train_groups.count(g))
                throw LeakageError("fold " + std::to_string(fold) + ": group '" + g + "' is in both train and test");

        LabeledMatrix train;
        train.class_names = class_names;
        train.feature_names = feature_names;
        train.X.cols = feature_names.size();
        std::vector<const Video*> test_videos;
        for (const auto& v : videos) {
            const bool in_test = test_groups.count(v.group_id) > 0;
            const bool in_train = train_groups.count(v.group_id) > 0;
            if (in_test && in_train) throw LeakageError("video '" + v.video_id + "' is in both train and test");
            if (in_test) {
                test_videos.push_back(&v);
                continue;
            }
            if (mode == EvalMode::majority_vote) {
                for (const auto* seg : v.segments) {
                    train.X.append_row(seg->values);
                    train.y.push_back(class_index(v.label));
                }
            } else {
                std::vector<double> joined;
                joined.reserve(feature_names.size());
                for (const auto* seg : v.segments) joined.insert(joined.end(), seg->values.begin(), seg->values.end());
                train.X.append_row(joined);
                train.y.push_back(class_index(v.label));
            }
        }
        report.train_samples_per_fold.push_back(train.X.rows);
        if (test_videos.empty()) throw EvaluationError("fold " + std::to_string(fold) + " has no test videos");
        const TrainedModel model = fit(spec, train);

        std::size_t correct = 0;
        for (const Video* v : test_videos) {
            int predicted = 0;
            if (mode == EvalMode::majority_vote) {
                Matrix X(0, feature_names.size());
                for (const auto* seg : v->segments) X.append_row(seg->values);
                const Matrix proba = predict_proba(model, X);
                std::vector<int> labels(X.rows);
                for (std::size_t s = 0; s < X.rows; ++s) labels[s] = static_cast<int>(argmax(proba.row(s)));
                predicted = majority_vote(labels, proba);
            } else {
                Matrix X(0, feature_names.size());
                std::vector<double> joined;
                for (const auto* seg : v->segments) joined.insert(joined.end(), seg->values.begin(), seg->values.end());
                X.append_row(joined);
                predicted = static_cast<int>(argmax(predict_proba(model, X).row(0)));
            }
            const int truth = class_index(v->label);
            if (predicted == truth) ++correct;
            ++report.confusion.counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
            report.predictions.push_back(
                {v->video_id, v->group_id, fold, v->label, class_names[static_cast<std::size_t>(predicted)]});
        }
        report.per_fold_accuracy.push_back(100.0 * static_cast<double>(correct) / static_cast<double>(test_videos.size()));

        if (tree_model) {
            const auto scores = feature_importance(model);
            if (importance_sum.empty()) importance_sum.assign(scores.size(), 0.0);
            for (std::size_t f = 0; f < scores.size(); ++f) importance_sum[f] += scores[f];
        }
    }

    double sum = 0.0;
    for (double a : report.per_fold_accuracy) sum += a;
    report.mean = sum / static_cast<double>(report.per_fold_accuracy.size());
    double var = 0.0;
    for (double a : report.per_fold_accuracy) var += (a - report.mean) * (a - report.mean);
    report.std = std::sqrt(var / static_cast<double>(report.per_fold_accuracy.size()));

    if (tree_model) {
        for (std::size_t f = 0; f < importance_sum.size(); ++f)
            report.importances.emplace_back(feature_names[f], importance_sum[f] / static_cast<double>(plan.k()));
        std::stable_sort(report.importances.begin(), report.importances.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
    }

    report.config = extra_config.is_object() ? extra_config : nlohmann::json::object();
    report.config["model"] = std::string(to_string(spec.kind));
    report.config["hyperparameters"] = hyperparameters_to_json(spec);
    report.config["seed"] = spec.seed;
    report.config["folds"] = plan.k();
    report.config["fold_seed"] = plan.seed;
    report.config["segments"] = n_segments;
    report.config["eval_mode"] = std::string(to_string(mode));
    return report;
}

inline nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json j;
    j["config"] = report.config;
    j["per_fold_accuracy"] = report.per_fold_accuracy;
    j["mean"] = report.mean;
    j["std"] = report.std;
    j["confusion"] = {{"class_names", report.confusion.class_names}, {"counts", report.confusion.counts}};
    if (!report.importances.empty()) {
        nlohmann::json imp = nlohmann::json::array();
        for (const auto& [name, score] : report.importances) imp.push_back({{"feature", name}, {"score", score}});
        j["importances"] = imp;
    }
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : report.predictions)
        preds.push_back({{"video_id", p.video_id},
                         {"group_id", p.group_id},
                         {"fold", p.fold},
                         {"true", p.truth},
                         {"predicted", p.predicted}});
    j["predictions"] = preds;
    j["train_samples_per_fold"] = report.train_samples_per_fold;
    return j;
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
    try {
        EvaluationReport r;
        r.config = j.at("config");
        r.per_fold_accuracy = j.at("per_fold_accuracy").get<std::vector<double>>();
        r.mean = j.at("mean").get<double>();
        r.std = j.at("std").get<double>();
        r.confusion.class_names = j.at("confusion").at("class_names").get<std::vector<std::string>>();
        r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
        const std::size_t C = r.confusion.class_names.size();
        if (r.confusion.counts.size() != C) throw DataError("report: confusion matrix shape mismatch");
        for (const auto& row : r.confusion.counts)
            if (row.size() != C) throw DataError("report: confusion matrix shape mismatch");
        if (j.contains("importances"))
            for (const auto& e : j.at("importances"))
                r.importances.emplace_back(e.at("feature").get<std::string>(), e.at("score").get<double>());
        if (j.contains("predictions"))
            for (const auto& p : j.at("predictions"))
                r.predictions.push_back({p.at("video_id").get<std::string>(), p.at("group_id").get<std::string>(),
                                         p.at("fold").get<std::size_t>(), p.at("true").get<std::string>(),
                                         p.at("predicted").get<std::string>()});
        if (j.contains("train_samples_per_fold"))
            r.train_samples_per_fold = j.at("train_samples_per_fold").get<std::vector<std::size_t>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report: malformed document: ") + e.what());
    }
}

}  // namespace dancestyle
