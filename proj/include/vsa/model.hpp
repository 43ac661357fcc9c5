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

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsa/losses.hpp"
#include "vsa/manifest.hpp"
#include "vsa/nn/layers.hpp"

namespace vsa {

enum class Backbone { inception_v3, vgg19, toy };

Backbone parse_backbone(const std::string& s);
std::string to_string(Backbone b);
int backbone_input_size(Backbone b); // 299 / 224 / 64

// Per-channel input statistics of the backbone's original training recipe.
struct Normalization {
    std::array<float, 3> mean{0.5f, 0.5f, 0.5f};
    std::array<float, 3> stddev{0.5f, 0.5f, 0.5f};
};

Normalization backbone_normalization(Backbone b);

// 256 for the full-size backbones, 32 for the test-scale one.
int default_head_hidden_units(Backbone b);

struct ModelConfig {
    Backbone backbone = Backbone::toy;
    bool pretrained = false;
    HeadMode head_mode = HeadMode::softmax;
    int num_outputs = 0;
    bool freeze_backbone = false;
    std::optional<int> head_hidden_units; // absent: backbone default

    int hidden_units() const {
        return head_hidden_units.value_or(default_head_hidden_units(backbone));
    }
    void validate() const;
};

// A backbone feature extractor with the classifier replaced by
// global pooling -> optional hidden layer with ReLU -> linear output layer.
// Softmax/sigmoid is applied outside, at scoring time; training works from
// the logits.
class Model {
public:
    Model(const ModelConfig& cfg, std::uint64_t init_seed);

    // input is a normalized (N, 3, S, S) batch with S = input_size().
    nn::Tensor forward_logits(const nn::Tensor& input, bool train);
    // Propagates d loss / d logits back through head and backbone,
    // accumulating parameter gradients.
    nn::Tensor backward(const nn::Tensor& dlogits);

    // Activation per head mode: softmax rows summing to 1, or elementwise
    // sigmoid values in [0,1]. One vector per sample.
    std::vector<std::vector<double>> scores_from_logits(const nn::Tensor& logits) const;
    std::vector<std::vector<double>> forward_scores(const nn::Tensor& input);

    std::vector<nn::ParamRef> parameters();
    std::vector<nn::BufferRef> buffers();
    // freeze_backbone=true selects only the head parameters.
    std::vector<nn::ParamRef> trainable_parameters(bool freeze_backbone);
    std::vector<nn::ParamRef> trainable_parameters() {
        return trainable_parameters(cfg_.freeze_backbone);
    }

    const ModelConfig& config() const { return cfg_; }
    int input_size() const { return backbone_input_size(cfg_.backbone); }
    Normalization normalization() const { return backbone_normalization(cfg_.backbone); }
    int feature_channels() const { return feature_channels_; }

    void save_weights(const std::filesystem::path& path) const;
    // backbone_only loads just backbone.* entries (pretrained feature
    // extractors); otherwise every parameter and buffer must be present.
    void load_weights(const std::filesystem::path& path, bool backbone_only = false);

private:
    ModelConfig cfg_;
    std::unique_ptr<nn::Layer> backbone_;
    int feature_channels_ = 0;
    nn::Sequential head_;
    bool backbone_was_training_ = false;
};

// Builds the configured model. pretrained=true for the full-size backbones
// loads ImageNet-derived weights from `weights_dir` (or $VSA_WEIGHTS_DIR);
// a missing weights file is an error explaining how to provision it offline.
// The test-scale backbone is always randomly initialized.
std::unique_ptr<Model> build_model(const ModelConfig& cfg, std::uint64_t init_seed,
                                   const std::optional<std::filesystem::path>& weights_dir = {});

// Weights file + self-describing JSON sidecar. `base` is the checkpoint path
// without extension; files written are `<base>.vsw` and `<base>.meta.json`.
void save_checkpoint(const Model& model, const TaskSpec& task, double threshold,
                     const nlohmann::json& extra_meta, const std::filesystem::path& base);

struct LoadedCheckpoint {
    std::unique_ptr<Model> model;
    TaskSpec task;
    double threshold = 0.5;
    nlohmann::json meta;
};

// Accepts either the `.vsw` path or the extensionless base.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace vsa
