/*
 Copyright 2026 The vsa authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "vsa/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vsa/errors.hpp"

namespace vsa {

std::vector<int> decode(std::span<const double> scores, LabelMode mode, double threshold,
                        std::size_t vocab_size, bool fallback_top1) {
    if (scores.size() != vocab_size) {
        throw InputError("decode: score vector length " + std::to_string(scores.size()) +
                         " does not match vocabulary size " + std::to_string(vocab_size));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    std::vector<int> out;
    if (mode == LabelMode::single_label) {
        out.push_back(static_cast<int>(best));
        return out;
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InputError("multi-label decode threshold must lie in (0,1)");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] >= threshold) out.push_back(static_cast<int>(i));
    }
    if (out.empty() && fallback_top1) out.push_back(static_cast<int>(best));
    return out;
}

namespace {

struct Counts {
    long long tp = 0, fp = 0, fn = 0;
};

PerLabelMetrics metrics_from_counts(const Counts& c) {
    PerLabelMetrics m;
    m.support = c.tp + c.fn;
    m.precision = (c.tp + c.fp) == 0 ? 0.0
                                     : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.recall =
        (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0
                                           : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

// Pairs predictions with truth records by image path, duplicates matched in
// order of appearance. Reports missing and extra paths together.
std::vector<const PredictionRecord*> align_by_path(const Dataset& truth,
                                                   const std::vector<PredictionRecord>& preds) {
    std::map<std::string, std::vector<const PredictionRecord*>> by_path;
    for (const PredictionRecord& p : preds) by_path[p.image_path].push_back(&p);

    std::vector<const PredictionRecord*> aligned;
    std::vector<std::string> missing;
    aligned.reserve(truth.records.size());
    for (const ImageRecord& rec : truth.records) {
        auto it = by_path.find(rec.image_path);
        if (it == by_path.end() || it->second.empty()) {
            missing.push_back(rec.image_path);
            continue;
        }
        aligned.push_back(it->second.front());
        it->second.erase(it->second.begin());
    }
    std::vector<std::string> extra;
    for (const auto& [path, remaining] : by_path) {
        for (std::size_t i = 0; i < remaining.size(); ++i) extra.push_back(path);
    }
    if (!missing.empty() || !extra.empty()) {
        std::ostringstream os;
        os << "predictions do not cover the truth manifest:";
        if (!missing.empty()) {
            os << " missing " << missing.size() << " path(s):";
            for (const std::string& p : missing) os << " " << p;
        }
        if (!extra.empty()) {
            os << " extra " << extra.size() << " path(s):";
            for (const std::string& p : extra) os << " " << p;
        }
        throw InputError(os.str());
    }
    return aligned;
}

} // namespace

MetricsReport weighted_f1(const Dataset& truth, const std::vector<PredictionRecord>& preds,
                          std::optional<double> threshold_used) {
    const std::vector<const PredictionRecord*> aligned = align_by_path(truth, preds);
    const std::size_t n_labels = truth.spec.num_labels();

    std::vector<Counts> counts(n_labels);
    for (std::size_t i = 0; i < truth.records.size(); ++i) {
        const ImageRecord& rec = truth.records[i];
        const PredictionRecord& pred = *aligned[i];
        for (std::size_t label = 0; label < n_labels; ++label) {
            const bool in_truth = rec.has_label(static_cast<int>(label));
            const bool in_pred = std::binary_search(pred.decoded.begin(), pred.decoded.end(),
                                                    static_cast<int>(label));
            if (in_truth && in_pred) {
                counts[label].tp += 1;
            } else if (!in_truth && in_pred) {
                counts[label].fp += 1;
            } else if (in_truth && !in_pred) {
                counts[label].fn += 1;
            }
        }
    }

    MetricsReport report;
    report.task_id = truth.spec.id;
    report.labels = truth.spec.labels;
    report.record_count = static_cast<long long>(truth.records.size());
    report.threshold = truth.spec.mode == LabelMode::multi_label ? threshold_used : std::nullopt;

    double weighted_sum = 0.0;
    long long total_support = 0;
    for (std::size_t label = 0; label < n_labels; ++label) {
        const PerLabelMetrics m = metrics_from_counts(counts[label]);
        weighted_sum += m.f1 * static_cast<double>(m.support);
        total_support += m.support;
        report.per_label.push_back(m);
    }
    report.weighted_f1 = total_support == 0 ? 0.0 : weighted_sum / static_cast<double>(total_support);
    return report;
}

ThresholdSweep sweep_threshold(const Dataset& truth,
                               const std::vector<std::vector<double>>& scores,
                               const std::vector<double>& grid) {
    if (truth.spec.mode != LabelMode::multi_label) {
        throw InputError("threshold sweep applies to multi-label tasks only");
    }
    if (grid.empty()) {
        throw InputError("threshold sweep grid must be non-empty");
    }
    if (scores.size() != truth.records.size()) {
        throw InputError("threshold sweep: " + std::to_string(scores.size()) +
                         " score vectors for " + std::to_string(truth.records.size()) + " records");
    }

    ThresholdSweep sweep;
    double best_f1 = -1.0;
    for (double t : grid) {
        if (!(t > 0.0 && t < 1.0)) {
            throw InputError("threshold sweep grid values must lie in (0,1)");
        }
        std::vector<PredictionRecord> preds;
        preds.reserve(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            PredictionRecord p;
            p.image_path = truth.records[i].image_path;
            p.scores = scores[i];
            p.decoded = decode(scores[i], LabelMode::multi_label, t, truth.spec.num_labels());
            preds.push_back(std::move(p));
        }
        const double f1 = weighted_f1(truth, preds, t).weighted_f1;
        sweep.points.emplace_back(t, f1);
        if (f1 > best_f1 || (f1 == best_f1 && t < sweep.recommended)) {
            best_f1 = f1;
            sweep.recommended = t;
        }
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::ordered_json metrics_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["task_id"] = to_string(report.task_id);
    nlohmann::ordered_json per_label;
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        const PerLabelMetrics& m = report.per_label[i];
        per_label[report.labels[i]] = {{"precision", m.precision},
                                       {"recall", m.recall},
                                       {"f1", m.f1},
                                       {"support", m.support}};
    }
    j["per_label"] = per_label;
    j["weighted_f1"] = report.weighted_f1;
    j["record_count"] = report.record_count;
    if (report.threshold) j["threshold"] = *report.threshold;
    return j;
}

MetricsReport metrics_from_json(const nlohmann::ordered_json& j) {
    MetricsReport report;
    try {
        report.task_id = parse_task_id(j.at("task_id").get<std::string>());
        for (const auto& [label, m] : j.at("per_label").items()) {
            report.labels.push_back(label);
            PerLabelMetrics pm;
            pm.precision = m.at("precision").get<double>();
            pm.recall = m.at("recall").get<double>();
            pm.f1 = m.at("f1").get<double>();
            pm.support = m.at("support").get<long long>();
            report.per_label.push_back(pm);
        }
        report.weighted_f1 = j.at("weighted_f1").get<double>();
        report.record_count = j.at("record_count").get<long long>();
        if (j.contains("threshold")) report.threshold = j["threshold"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed metrics report JSON: ") + e.what());
    }
    return report;
}

void save_metrics(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write metrics report: " + path.string());
    out << metrics_to_json(report).dump(2) << "\n";
    if (!out.good()) throw InputError("failed writing metrics report: " + path.string());
}

MetricsReport load_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("metrics report not found: " + path.string());
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed metrics report " + path.string() + ": " + e.what());
    }
    return metrics_from_json(j);
}

namespace {

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

void save_predictions(const std::vector<PredictionRecord>& preds, const TaskSpec& spec,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write predictions file: " + path.string());
    out << "image_path,scores,decoded\n";
    for (const PredictionRecord& p : preds) {
        if (p.scores.size() != spec.num_labels()) {
            throw InputError("prediction for " + p.image_path + " has " +
                             std::to_string(p.scores.size()) + " scores, expected " +
                             std::to_string(spec.num_labels()));
        }
        out << p.image_path << ",";
        for (std::size_t i = 0; i < p.scores.size(); ++i) {
            if (i > 0) out << ';';
            out << format_score(p.scores[i]);
        }
        out << ",";
        for (std::size_t i = 0; i < p.decoded.size(); ++i) {
            if (i > 0) out << ';';
            out << spec.labels[static_cast<std::size_t>(p.decoded[i])];
        }
        out << "\n";
    }
    if (!out.good()) throw InputError("failed writing predictions file: " + path.string());
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               const TaskSpec& spec) {
    std::ifstream in(path);
    if (!in) throw InputError("predictions file not found: " + path.string());
    // Same convention as manifests: relative image paths resolve against the
    // file's own directory.
    const std::filesystem::path base = path.parent_path();

    std::vector<PredictionRecord> preds;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cols.push_back(cur);

        if (!header_seen) {
            if (cols.size() != 3 || to_lower(trim(cols[0])) != "image_path" ||
                to_lower(trim(cols[1])) != "scores" || to_lower(trim(cols[2])) != "decoded") {
                throw InputError(path.string() + ":" + std::to_string(row) +
                                 ": expected header 'image_path,scores,decoded'");
            }
            header_seen = true;
            continue;
        }
        if (cols.size() != 3) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": expected 3 columns, got " +
                             std::to_string(cols.size()));
        }

        PredictionRecord p;
        const std::filesystem::path raw(trim(cols[0]));
        p.image_path = raw.is_absolute() ? raw.string() : (base / raw).string();
        std::stringstream score_stream(cols[1]);
        std::string token;
        while (std::getline(score_stream, token, ';')) {
            try {
                p.scores.push_back(std::stod(trim(token)));
            } catch (const std::exception&) {
                throw InputError(path.string() + ":" + std::to_string(row) + ": bad score '" + token +
                                 "'");
            }
        }
        if (p.scores.size() != spec.num_labels()) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": " +
                             std::to_string(p.scores.size()) + " scores, expected " +
                             std::to_string(spec.num_labels()));
        }
        std::stringstream label_stream(cols[2]);
        while (std::getline(label_stream, token, ';')) {
            const std::string name = trim(token);
            if (name.empty()) continue;
            const int id = spec.resolve_label(name);
            if (id < 0) {
                throw InputError(path.string() + ":" + std::to_string(row) + ": unknown label '" +
                                 name + "' for " + to_string(spec.id));
            }
            p.decoded.push_back(id);
        }
        std::sort(p.decoded.begin(), p.decoded.end());
        p.decoded.erase(std::unique(p.decoded.begin(), p.decoded.end()), p.decoded.end());
        preds.push_back(std::move(p));
    }
    if (!header_seen) {
        throw InputError(path.string() + ": empty predictions file (missing header)");
    }
    return preds;
}

} // namespace vsa
