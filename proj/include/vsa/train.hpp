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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsa/augment.hpp"
#include "vsa/balance.hpp"
#include "vsa/manifest.hpp"
#include "vsa/model.hpp"

namespace vsa {

struct TrainConfig {
    TaskSpec task;
    ModelConfig model;
    int epochs = 50;            // fixed-length fine-tune, no early stopping
    double learning_rate = 1e-4;
    std::string optimizer = "adam";
    int batch_size = 32;
    std::uint64_t seed = 0;
    // Deterministic mode: single-threaded batch prep and zeroed wall-clock
    // fields, so two identical runs produce byte-identical logs.
    bool deterministic = false;
    double dev_fraction = 0.0;  // used only when no dev manifest is given
    double threshold = 0.5;     // decode threshold for dev evaluation (multi-label)
    BalanceConfig balance;
    AugmentConfig augment;
    std::optional<std::filesystem::path> weights_dir;

    void validate() const;
};

struct TrainLogEntry {
    int epoch = 0;
    double train_loss = 0.0;
    std::optional<double> dev_loss;        // absent when there is no dev split
    std::optional<double> dev_weighted_f1; // likewise
    double wall_clock_seconds = 0.0;
};

struct RunArtifacts {
    std::filesystem::path run_dir;
    std::filesystem::path final_checkpoint; // .vsw path; sidecar sits next to it
    std::filesystem::path best_checkpoint;
    std::filesystem::path log_path;
    std::vector<TrainLogEntry> log;
    int best_epoch = 0;
    std::optional<double> best_dev_weighted_f1;
};

// Full pipeline: load -> (train split only) balance -> augment -> fine-tune
// for cfg.epochs, evaluating on dev after each epoch when a dev split
// exists. Best checkpoint = highest dev weighted F1, ties to the earliest
// epoch; without a dev split the final weights double as best. Writes
// `config.json`, `log.jsonl`, `ckpt-final.*`, `ckpt-best.*` and `meta.json`
// into run_dir.
RunArtifacts train(const TrainConfig& cfg, const std::filesystem::path& train_manifest,
                   const std::optional<std::filesystem::path>& dev_manifest,
                   const std::filesystem::path& run_dir);

// The two experiment arms: identical hyperparameters (50 epochs, Adam,
// lr 1e-4), differing only in backbone (inception_v3 vs vgg19).
std::pair<TrainConfig, TrainConfig> make_run_pair(const TaskSpec& task);

// Per-group seeded split used when no dev manifest is supplied. Groups by
// class (single-label) or by label-set signature (multi-label); each group
// contributes floor(group_size * dev_fraction) records to dev.
void stratified_split(const Dataset& ds, double dev_fraction, std::uint64_t seed,
                      Dataset* train_out, Dataset* dev_out);

// Decodes a record, applies its transform chain, resizes to the model input
// and normalizes into dst (3*input_size*input_size floats, CHW). Returns
// false with a reason instead of throwing when the image can't be read.
bool materialize_record(const ImageRecord& rec, int input_size, const Normalization& norm,
                        float* dst, std::string* error);

} // namespace vsa
