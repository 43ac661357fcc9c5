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

#include "vsa/model.hpp"

#include <cstdlib>
#include <fstream>
#include <map>

#include "backbones.hpp"
#include "vsa/errors.hpp"
#include "vsa/rng.hpp"

namespace vsa {

Backbone parse_backbone(const std::string& s) {
    const std::string t = to_lower(trim(s));
    if (t == "inception_v3" || t == "inception-v3" || t == "inceptionv3") {
        return Backbone::inception_v3;
    }
    if (t == "vgg19" || t == "vgg-19" || t == "vggnet19") return Backbone::vgg19;
    if (t == "toy") return Backbone::toy;
    throw InputError("unknown backbone '" + s + "' (expected inception_v3, vgg19 or toy)");
}

std::string to_string(Backbone b) {
    switch (b) {
        case Backbone::inception_v3: return "inception_v3";
        case Backbone::vgg19: return "vgg19";
        case Backbone::toy: return "toy";
    }
    return "backbone?";
}

int backbone_input_size(Backbone b) {
    switch (b) {
        case Backbone::inception_v3: return 299;
        case Backbone::vgg19: return 224;
        case Backbone::toy: return 64;
    }
    return 0;
}

Normalization backbone_normalization(Backbone b) {
    Normalization norm;
    if (b == Backbone::toy) {
        norm.mean = {0.5f, 0.5f, 0.5f};
        norm.stddev = {0.5f, 0.5f, 0.5f};
    } else {
        // ImageNet channel statistics used by both full-size backbones.
        norm.mean = {0.485f, 0.456f, 0.406f};
        norm.stddev = {0.229f, 0.224f, 0.225f};
    }
    return norm;
}

int default_head_hidden_units(Backbone b) {
    return b == Backbone::toy ? 32 : 256;
}

void ModelConfig::validate() const {
    if (num_outputs <= 0) {
        throw InputError("model config: num_outputs must be positive, got " +
                         std::to_string(num_outputs));
    }
    if (head_hidden_units && *head_hidden_units < 0) {
        throw InputError("model config: head_hidden_units must be >= 0");
    }
}

Model::Model(const ModelConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(derive_seed(init_seed, "model-init"));

    BackboneNet net;
    switch (cfg_.backbone) {
        case Backbone::toy: net = make_toy_backbone(rng); break;
        case Backbone::vgg19: net = make_vgg19_backbone(rng); break;
        case Backbone::inception_v3: net = make_inception_v3_backbone(rng); break;
    }
    backbone_ = std::move(net.features);
    feature_channels_ = net.feature_channels;

    head_.add("gap", std::make_unique<nn::GlobalAvgPool>());
    int in_f = feature_channels_;
    if (cfg_.hidden_units() > 0) {
        head_.add("hidden", std::make_unique<nn::Dense>(in_f, cfg_.hidden_units(), rng));
        head_.add("relu", std::make_unique<nn::ReLU>());
        in_f = cfg_.hidden_units();
    }
    // Zero-initialized output layer: fresh heads start from the uniform
    // prediction instead of random logits.
    head_.add("out", std::make_unique<nn::Dense>(in_f, cfg_.num_outputs, rng, true));
}

nn::Tensor Model::forward_logits(const nn::Tensor& input, bool train) {
    const int s = input_size();
    if (input.c != 3 || input.h != s || input.w != s) {
        throw InputError("model input must be (N,3," + std::to_string(s) + "," + std::to_string(s) +
                         "), got " + input.shape_str());
    }
    backbone_was_training_ = train && !cfg_.freeze_backbone;
    nn::Tensor feats = backbone_->forward(input, backbone_was_training_);
    return head_.forward(feats, train);
}

nn::Tensor Model::backward(const nn::Tensor& dlogits) {
    nn::Tensor dfeat = head_.backward(dlogits);
    if (!backbone_was_training_) return nn::Tensor();
    return backbone_->backward(dfeat);
}

std::vector<std::vector<double>> Model::scores_from_logits(const nn::Tensor& logits) const {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(logits.n));
    for (int i = 0; i < logits.n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(cfg_.num_outputs));
        const float* src = logits.sample(i);
        for (int k = 0; k < cfg_.num_outputs; ++k) row[static_cast<std::size_t>(k)] = src[k];
        if (cfg_.head_mode == HeadMode::softmax) {
            row = softmax(row);
        } else {
            for (double& z : row) z = sigmoid(z);
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<double>> Model::forward_scores(const nn::Tensor& input) {
    return scores_from_logits(forward_logits(input, false));
}

std::vector<nn::ParamRef> Model::parameters() {
    std::vector<nn::ParamRef> out;
    backbone_->collect_params("backbone", out);
    head_.collect_params("head", out);
    return out;
}

std::vector<nn::BufferRef> Model::buffers() {
    std::vector<nn::BufferRef> out;
    backbone_->collect_buffers("backbone", out);
    head_.collect_buffers("head", out);
    return out;
}

std::vector<nn::ParamRef> Model::trainable_parameters(bool freeze_backbone) {
    if (!freeze_backbone) return parameters();
    std::vector<nn::ParamRef> out;
    head_.collect_params("head", out);
    return out;
}

// ---------------------------------------------------------------------------
// Weights container: magic, version, count, then (name, dims, float32 data)
// per tensor. Little-endian, matching every platform this builds on.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'V', 'S', 'A', 'W'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw InputError("truncated weights file: " + path);
    }
    return v;
}

void write_tensor(std::ofstream& out, const std::string& name, const nn::Tensor& t) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, 4);
    for (int d : {t.n, t.c, t.h, t.w}) write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
}

std::map<std::string, nn::Tensor> read_weights_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("weights file not found or unreadable: " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw InputError("not a weights file (bad magic): " + path.string());
    }
    const std::uint32_t version = read_u32(in, path.string());
    if (version != kFormatVersion) {
        throw InputError("unsupported weights format version " + std::to_string(version) + " in " +
                         path.string());
    }
    const std::uint32_t count = read_u32(in, path.string());
    std::map<std::string, nn::Tensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32(in, path.string());
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) {
            throw InputError("truncated weights file: " + path.string());
        }
        const std::uint32_t ndim = read_u32(in, path.string());
        if (ndim != 4) {
            throw InputError("unexpected tensor rank in " + path.string() + " for " + name);
        }
        int dims[4];
        for (int& d : dims) d = static_cast<int>(read_u32(in, path.string()));
        nn::Tensor t(dims[0], dims[1], dims[2], dims[3]);
        if (!in.read(reinterpret_cast<char*>(t.data()),
                     static_cast<std::streamsize>(t.size() * sizeof(float)))) {
            throw InputError("truncated weights file: " + path.string());
        }
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

} // namespace

void Model::save_weights(const std::filesystem::path& path) const {
    auto* self = const_cast<Model*>(this);
    const std::vector<nn::ParamRef> params = self->parameters();
    const std::vector<nn::BufferRef> bufs = self->buffers();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw TrainingError("cannot open weights file for writing: " + path.string());
    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u32(out, static_cast<std::uint32_t>(params.size() + bufs.size()));
    for (const auto& [name, p] : params) write_tensor(out, name, p->value);
    for (const auto& [name, t] : bufs) write_tensor(out, name, *t);
    out.flush();
    if (!out.good()) throw TrainingError("failed writing weights file: " + path.string());
}

void Model::load_weights(const std::filesystem::path& path, bool backbone_only) {
    const std::map<std::string, nn::Tensor> stored = read_weights_file(path);

    std::vector<std::pair<std::string, nn::Tensor*>> targets;
    for (const auto& [name, p] : parameters()) targets.emplace_back(name, &p->value);
    for (const auto& [name, t] : buffers()) targets.emplace_back(name, t);

    std::size_t matched = 0;
    for (auto& [name, dst] : targets) {
        if (backbone_only && name.rfind("backbone.", 0) != 0) continue;
        const auto it = stored.find(name);
        if (it == stored.end()) {
            throw InputError("weights file " + path.string() + " is missing tensor '" + name + "'");
        }
        if (!it->second.same_shape(*dst)) {
            throw InputError("shape mismatch for tensor '" + name + "' in " + path.string() +
                             ": file has " + it->second.shape_str() + ", model expects " +
                             dst->shape_str());
        }
        dst->v = it->second.v;
        ++matched;
    }
    if (matched == 0) {
        throw InputError("weights file " + path.string() + " contains no matching tensors");
    }
}

std::unique_ptr<Model> build_model(const ModelConfig& cfg, std::uint64_t init_seed,
                                   const std::optional<std::filesystem::path>& weights_dir) {
    cfg.validate();
    auto model = std::make_unique<Model>(cfg, init_seed);
    if (cfg.pretrained && cfg.backbone != Backbone::toy) {
        std::filesystem::path dir;
        if (weights_dir) {
            dir = *weights_dir;
        } else if (const char* env = std::getenv("VSA_WEIGHTS_DIR")) {
            dir = env;
        } else {
            dir = std::filesystem::path(".") / "weights";
        }
        const std::filesystem::path file = dir / (to_string(cfg.backbone) + ".vsw");
        if (!std::filesystem::exists(file)) {
            throw InputError(
                "pretrained weights for " + to_string(cfg.backbone) + " not found at " +
                file.string() +
                " and cannot be fetched (no network access assumed). Provision them offline: "
                "convert the backbone's ImageNet weights into the .vsw container described in the "
                "README and place the file at that path, or point --weights-dir / VSA_WEIGHTS_DIR "
                "at the directory holding it. Pass pretrained=false to train from random "
                "initialization instead.");
        }
        model->load_weights(file, /*backbone_only=*/true);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

void save_checkpoint(const Model& model, const TaskSpec& task, double threshold,
                     const nlohmann::json& extra_meta, const std::filesystem::path& base) {
    std::filesystem::path weights = base;
    weights += ".vsw";
    model.save_weights(weights);

    const ModelConfig& cfg = model.config();
    const Normalization norm = model.normalization();
    nlohmann::ordered_json meta;
    meta["version"] = 1;
    meta["task"] = to_string(task.id);
    meta["labels"] = task.labels;
    meta["backbone"] = to_string(cfg.backbone);
    meta["head_mode"] = to_string(cfg.head_mode);
    meta["num_outputs"] = cfg.num_outputs;
    meta["head_hidden_units"] = cfg.hidden_units();
    meta["freeze_backbone"] = cfg.freeze_backbone;
    meta["pretrained"] = cfg.pretrained;
    meta["normalization"] = {{"mean", norm.mean}, {"stddev", norm.stddev}};
    meta["threshold"] = threshold;
    for (const auto& [key, value] : extra_meta.items()) meta[key] = value;

    std::filesystem::path meta_path = base;
    meta_path += ".meta.json";
    std::ofstream out(meta_path);
    if (!out) throw TrainingError("cannot write checkpoint metadata: " + meta_path.string());
    out << meta.dump(2) << "\n";
    if (!out.good()) throw TrainingError("failed writing checkpoint metadata: " + meta_path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::filesystem::path base = path;
    if (base.extension() == ".vsw") base.replace_extension();
    std::filesystem::path weights = base;
    weights += ".vsw";
    std::filesystem::path meta_path = base;
    meta_path += ".meta.json";

    std::ifstream in(meta_path);
    if (!in) {
        throw InputError("checkpoint metadata not found: " + meta_path.string() +
                         " (expected next to " + weights.string() + ")");
    }
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed checkpoint metadata " + meta_path.string() + ": " + e.what());
    }

    LoadedCheckpoint ckpt;
    try {
        ckpt.task.id = parse_task_id(meta.at("task").get<std::string>());
        ckpt.task.labels = meta.at("labels").get<std::vector<std::string>>();
        const HeadMode mode = parse_head_mode(meta.at("head_mode").get<std::string>());
        ckpt.task.mode =
            mode == HeadMode::softmax ? LabelMode::single_label : LabelMode::multi_label;

        ModelConfig cfg;
        cfg.backbone = parse_backbone(meta.at("backbone").get<std::string>());
        cfg.head_mode = mode;
        cfg.num_outputs = meta.at("num_outputs").get<int>();
        cfg.head_hidden_units = meta.at("head_hidden_units").get<int>();
        cfg.freeze_backbone = meta.value("freeze_backbone", false);
        cfg.pretrained = false; // weights come from the checkpoint itself
        ckpt.threshold = meta.value("threshold", 0.5);
        ckpt.meta = meta;
        ckpt.model = std::make_unique<Model>(cfg, 0);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("incomplete checkpoint metadata " + meta_path.string() + ": " + e.what());
    }
    if (static_cast<int>(ckpt.task.labels.size()) != ckpt.model->config().num_outputs) {
        throw InputError("checkpoint metadata inconsistent: " + std::to_string(ckpt.task.labels.size()) +
                         " labels vs num_outputs " +
                         std::to_string(ckpt.model->config().num_outputs));
    }
    ckpt.model->load_weights(weights);
    return ckpt;
}

} // namespace vsa
