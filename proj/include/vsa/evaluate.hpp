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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsa/losses.hpp"
#include "vsa/manifest.hpp"

namespace vsa {

// Per-image score vector (vocabulary order) and the label set decoded from
// it, stored as sorted vocabulary indices.
struct PredictionRecord {
    std::string image_path;
    std::vector<double> scores;
    std::vector<int> decoded;
};

// Single-label: argmax, ties broken toward the lowest vocabulary index.
// Multi-label: every label whose score reaches the threshold; empty sets are
// allowed unless fallback_top1 forces the argmax label into them. Threshold
// must lie in (0,1) for multi-label decoding.
std::vector<int> decode(std::span<const double> scores, LabelMode mode, double threshold,
                        std::size_t vocab_size, bool fallback_top1 = false);

struct PerLabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0;
};

struct MetricsReport {
    TaskId task_id = TaskId::task1;
    std::vector<std::string> labels; // vocabulary order
    std::vector<PerLabelMetrics> per_label;
    double weighted_f1 = 0.0;
    long long record_count = 0;
    // Set when the decode threshold is known (multi-label only).
    std::optional<double> threshold;
};

// One-vs-rest confusion counts per label; F1 weighted by ground-truth
// support. Conventions: precision = 0 when TP+FP = 0, recall = 0 when
// TP+FN = 0, F1 = 0 when precision+recall = 0; zero-support labels carry
// zero weight. preds must cover exactly the truth's image paths.
MetricsReport weighted_f1(const Dataset& truth, const std::vector<PredictionRecord>& preds,
                          std::optional<double> threshold_used = std::nullopt);

struct ThresholdSweep {
    std::vector<std::pair<double, double>> points; // (threshold, weighted F1)
    double recommended = 0.5;                      // argmax, ties -> smallest
};

// Re-decodes `scores` (aligned with truth record order) at every grid point.
ThresholdSweep sweep_threshold(const Dataset& truth,
                               const std::vector<std::vector<double>>& scores,
                               const std::vector<double>& grid);

nlohmann::ordered_json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::ordered_json& j);
void save_metrics(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport load_metrics(const std::filesystem::path& path);

// Predictions CSV: header `image_path,scores,decoded`, scores `;`-separated
// decimals in vocabulary order, decoded `;`-separated label names.
void save_predictions(const std::vector<PredictionRecord>& preds, const TaskSpec& spec,
                      const std::filesystem::path& path);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               const TaskSpec& spec);

} // namespace vsa
