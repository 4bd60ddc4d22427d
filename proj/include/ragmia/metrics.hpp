#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ragmia/error.hpp"

namespace ragmia {

struct ScoredLabels {
    std::vector<double> scores;
    std::vector<int> labels;  // {0,1}

    void validate(bool need_both_classes) const {
        if (scores.size() != labels.size())
            throw ValidationError("ScoredLabels: score/label length mismatch");
        if (scores.empty()) throw ValidationError("ScoredLabels: empty");
        for (double s : scores)
            if (!std::isfinite(s)) throw ValidationError("ScoredLabels: non-finite score");
        if (need_both_classes) {
            bool pos = false, neg = false;
            for (int y : labels) (y == 1 ? pos : neg) = true;
            if (!pos || !neg) throw ValidationError("ScoredLabels: need both classes");
        }
    }
};

/// Mann-Whitney AUC with midrank tie handling: ties between a positive and
/// a negative score count 0.5.
inline double roc_auc(const ScoredLabels& data) {
    data.validate(true);
    const std::size_t n = data.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && data.scores[order[j]] == data.scores[order[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (data.labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    for (int y : data.labels) n_pos += (y == 1);
    std::size_t n_neg = n - n_pos;
    return (rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Area under the precision-recall step curve; descending-score sweep with
/// tied scores processed as one block, step (right-continuous) interpolation.
inline double pr_auc(const ScoredLabels& data) {
    data.validate(false);
    std::size_t n_pos = 0;
    for (int y : data.labels) n_pos += (y == 1);
    if (n_pos == 0) throw ValidationError("pr_auc: no positive labels");

    const std::size_t n = data.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.scores[a] > data.scores[b]; });

    double area = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, predicted = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && data.scores[order[j]] == data.scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            ++predicted;
            if (data.labels[order[k]] == 1) ++tp;
        }
        double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        double precision = static_cast<double>(tp) / static_cast<double>(predicted);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

struct ClassificationMetrics {
    double accuracy;
    double precision;
    double recall;
    double f1;
    bool zero_denominator_flag = false;
};

inline ClassificationMetrics classification_metrics(const std::vector<int>& predictions,
                                                    const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw ValidationError("classification_metrics: length mismatch");
    if (predictions.empty()) throw ValidationError("classification_metrics: empty");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == 1)
            (labels[i] == 1 ? tp : fp)++;
        else
            (labels[i] == 1 ? fn : tn)++;
    }
    ClassificationMetrics m{};
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(predictions.size());
    if (tp + fp == 0) {
        // no predicted positives: vacuously precise only when there were
        // also no actual positives
        m.precision = (tp + fn == 0) ? 1.0 : 0.0;
        m.zero_denominator_flag = true;
    } else {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        m.recall = 0.0;
        m.zero_denominator_flag = true;
    } else {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

struct AttackReport {
    std::string attack;
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::string config_fingerprint;
    nlohmann::json extra;  // attack-specific detail (train objective etc.)
};

inline nlohmann::json report_to_json(const AttackReport& r) {
    nlohmann::json j = {
        {"attack", r.attack},   {"roc_auc", r.roc_auc},     {"pr_auc", r.pr_auc},
        {"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall},
        {"f1", r.f1},           {"n_train", r.n_train},     {"n_test", r.n_test},
        {"config_fingerprint", r.config_fingerprint},
    };
    if (!r.extra.is_null()) j["extra"] = r.extra;
    return j;
}

inline AttackReport report_from_json(const nlohmann::json& j) {
    AttackReport r;
    r.attack = j.at("attack").get<std::string>();
    r.roc_auc = j.at("roc_auc").get<double>();
    r.pr_auc = j.at("pr_auc").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    if (j.contains("extra")) r.extra = j["extra"];
    return r;
}

inline std::string report_csv_header() {
    return "attack,roc_auc,pr_auc,accuracy,precision,recall,f1";
}

inline std::string report_csv_row(const AttackReport& r) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed << r.attack << ',' << r.roc_auc << ',' << r.pr_auc << ',' << r.accuracy
        << ',' << r.precision << ',' << r.recall << ',' << r.f1;
    return out.str();
}

}  // namespace ragmia
