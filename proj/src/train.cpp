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

#include "vsa/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vsa/config.hpp"
#include "vsa/errors.hpp"
#include "vsa/evaluate.hpp"
#include "vsa/nn/optim.hpp"
#include "vsa/rng.hpp"

namespace vsa {

void TrainConfig::validate() const {
    if (task.labels.empty()) {
        throw InputError("train config: task vocabulary is empty");
    }
    if (epochs < 1) {
        throw InputError("train config: at least one epoch required, got " +
                         std::to_string(epochs));
    }
    if (batch_size < 1) {
        throw InputError("train config: batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw InputError("train config: learning_rate must be positive");
    }
    if (optimizer != "adam") {
        throw InputError("train config: unsupported optimizer '" + optimizer +
                         "' (only adam is available)");
    }
    if (dev_fraction < 0.0 || dev_fraction >= 1.0) {
        throw InputError("train config: dev_fraction must lie in [0,1)");
    }
    if (task.mode == LabelMode::multi_label && !(threshold > 0.0 && threshold < 1.0)) {
        throw InputError("train config: decode threshold must lie in (0,1)");
    }
    model.validate();
    if (model.num_outputs != static_cast<int>(task.num_labels())) {
        throw InputError("train config: model num_outputs " + std::to_string(model.num_outputs) +
                         " does not match task vocabulary size " +
                         std::to_string(task.num_labels()));
    }
    const bool softmax = model.head_mode == HeadMode::softmax;
    if (softmax != (task.mode == LabelMode::single_label)) {
        throw InputError("train config: head mode " + to_string(model.head_mode) +
                         " does not match " +
                         (task.mode == LabelMode::single_label ? "single" : "multi") +
                         "-label task mode");
    }
    if (balance.max_replication_factor < 1.0) {
        throw InputError("train config: balance.max_replication_factor must be >= 1");
    }
    augment.validate();
}

bool materialize_record(const ImageRecord& rec, int input_size, const Normalization& norm,
                        float* dst, std::string* error) {
    ImageTensor img;
    try {
        img = decode_image(rec.image_path);
        img = apply_chain(img, rec.transforms);
    } catch (const Error& e) {
        if (error != nullptr) *error = e.what();
        return false;
    }
    img = resize_bilinear(img, input_size, input_size);
    const std::size_t plane = static_cast<std::size_t>(input_size) * input_size;
    for (int c = 0; c < 3; ++c) {
        const float mean = norm.mean[static_cast<std::size_t>(c)];
        const float inv_std = 1.0f / norm.stddev[static_cast<std::size_t>(c)];
        const float* src = img.data.data() + static_cast<std::size_t>(c) * plane;
        float* out = dst + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) out[i] = (src[i] - mean) * inv_std;
    }
    return true;
}

void stratified_split(const Dataset& ds, double dev_fraction, std::uint64_t seed,
                      Dataset* train_out, Dataset* dev_out) {
    if (dev_fraction < 0.0 || dev_fraction >= 1.0) {
        throw InputError("dev_fraction must lie in [0,1)");
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        std::ostringstream key;
        for (int id : ds.records[i].label_ids) key << id << ",";
        groups[key.str()].push_back(i);
    }

    std::set<std::size_t> dev_indices;
    for (auto& [key, indices] : groups) {
        Rng rng(derive_seed(seed, "split-group", detail::fnv1a(key)));
        rng.shuffle(indices);
        const std::size_t n_dev =
            static_cast<std::size_t>(std::floor(static_cast<double>(indices.size()) * dev_fraction));
        for (std::size_t k = 0; k < n_dev; ++k) dev_indices.insert(indices[k]);
    }

    *train_out = Dataset{ds.spec, Split::train, {}};
    *dev_out = Dataset{ds.spec, Split::dev, {}};
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        if (dev_indices.count(i)) {
            dev_out->records.push_back(ds.records[i]);
        } else {
            train_out->records.push_back(ds.records[i]);
        }
    }
}

namespace {

std::vector<double> target_vector(const ImageRecord& rec, std::size_t n_labels) {
    std::vector<double> t(n_labels, 0.0);
    for (int id : rec.label_ids) t[static_cast<std::size_t>(id)] = 1.0;
    return t;
}

struct DevEval {
    double loss = 0.0;
    double weighted_f1 = 0.0;
};

DevEval evaluate_dev(Model& model, const Dataset& dev, const TrainConfig& cfg) {
    const int input = model.input_size();
    const Normalization norm = model.normalization();
    const std::size_t sample_floats = static_cast<std::size_t>(3) * input * input;

    std::vector<PredictionRecord> preds;
    preds.reserve(dev.records.size());
    double loss_sum = 0.0;

    for (std::size_t begin = 0; begin < dev.records.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end =
            std::min(begin + static_cast<std::size_t>(cfg.batch_size), dev.records.size());
        nn::Tensor batch(static_cast<int>(end - begin), 3, input, input);
        for (std::size_t i = begin; i < end; ++i) {
            std::string error;
            if (!materialize_record(dev.records[i], input, norm,
                                    batch.data() + (i - begin) * sample_floats, &error)) {
                throw TrainingError("dev image unusable: " + error);
            }
        }
        const nn::Tensor logits = model.forward_logits(batch, false);
        const std::vector<std::vector<double>> scores = model.scores_from_logits(logits);
        for (std::size_t i = begin; i < end; ++i) {
            const ImageRecord& rec = dev.records[i];
            std::vector<double> logit_row(static_cast<std::size_t>(logits.c));
            const float* src = logits.sample(static_cast<int>(i - begin));
            for (int k = 0; k < logits.c; ++k) logit_row[static_cast<std::size_t>(k)] = src[k];
            loss_sum += loss(cfg.model.head_mode, logit_row, target_vector(rec, dev.spec.num_labels()));

            PredictionRecord p;
            p.image_path = rec.image_path;
            p.scores = scores[i - begin];
            p.decoded = decode(p.scores, dev.spec.mode, cfg.threshold, dev.spec.num_labels());
            preds.push_back(std::move(p));
        }
    }

    DevEval out;
    out.loss = loss_sum / static_cast<double>(dev.records.size());
    out.weighted_f1 = weighted_f1(dev, preds,
                                  dev.spec.mode == LabelMode::multi_label
                                      ? std::optional<double>(cfg.threshold)
                                      : std::nullopt)
                          .weighted_f1;
    return out;
}

nlohmann::ordered_json log_entry_json(const TrainLogEntry& e) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    if (e.dev_loss) j["dev_loss"] = *e.dev_loss;
    if (e.dev_weighted_f1) j["dev_weighted_f1"] = *e.dev_weighted_f1;
    j["wall_clock_seconds"] = e.wall_clock_seconds;
    return j;
}

nlohmann::json counts_json(const Dataset& ds) {
    nlohmann::ordered_json j;
    for (const auto& [label, count] : label_counts_by_name(ds)) j[label] = count;
    return j;
}

struct WeightSnapshot {
    std::vector<std::vector<float>> values;

    static WeightSnapshot capture(Model& model) {
        WeightSnapshot snap;
        for (const auto& [name, p] : model.parameters()) snap.values.push_back(p->value.v);
        for (const auto& [name, t] : model.buffers()) snap.values.push_back(t->v);
        return snap;
    }
    void restore(Model& model) const {
        std::size_t i = 0;
        for (const auto& [name, p] : model.parameters()) p->value.v = values[i++];
        for (const auto& [name, t] : model.buffers()) t->v = values[i++];
    }
};

} // namespace

RunArtifacts train(const TrainConfig& cfg, const std::filesystem::path& train_manifest,
                   const std::optional<std::filesystem::path>& dev_manifest,
                   const std::filesystem::path& run_dir) {
    cfg.validate();
    std::filesystem::create_directories(run_dir);
    save_config(cfg, run_dir / "config.json");

    std::vector<std::string> warnings;
    Dataset train_raw = load_manifest(train_manifest, cfg.task, Split::train, {}, &warnings);
    if (train_raw.records.empty()) {
        throw InputError("train manifest has no records: " + train_manifest.string());
    }

    Dataset dev;
    bool has_dev = false;
    if (dev_manifest) {
        dev = load_manifest(*dev_manifest, cfg.task, Split::dev, {}, &warnings);
        has_dev = !dev.records.empty();
    } else if (cfg.dev_fraction > 0.0) {
        Dataset carved_train;
        stratified_split(train_raw, cfg.dev_fraction, derive_seed(cfg.seed, "split"), &carved_train,
                         &dev);
        train_raw = std::move(carved_train);
        has_dev = !dev.records.empty();
        if (train_raw.records.empty()) {
            throw InputError("dev_fraction left no training records");
        }
    }

    // Balancing and augmentation touch the train split only; dev stays raw.
    const nlohmann::json counts_before = counts_json(train_raw);
    BalanceConfig balance_cfg = cfg.balance;
    if (!balance_cfg.seed) balance_cfg.seed = derive_seed(cfg.seed, "balance");
    Dataset balanced = balance_dataset(train_raw, balance_cfg, &warnings);
    const nlohmann::json counts_after = counts_json(balanced);

    AugmentConfig augment_cfg = cfg.augment;
    if (!augment_cfg.seed) augment_cfg.seed = derive_seed(cfg.seed, "augment");
    Dataset train_ds = augment_dataset(balanced, augment_cfg);

    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    std::unique_ptr<Model> model = build_model(cfg.model, cfg.seed, cfg.weights_dir);
    const int input = model->input_size();
    const Normalization norm = model->normalization();
    const std::size_t sample_floats = static_cast<std::size_t>(3) * input * input;

    std::vector<nn::Param*> trainable;
    for (const auto& [name, p] : model->trainable_parameters()) trainable.push_back(p);
    nn::AdamOptions adam_opts;
    adam_opts.learning_rate = cfg.learning_rate;
    nn::Adam adam(trainable, adam_opts);

    const std::filesystem::path log_path = run_dir / "log.jsonl";
    std::ofstream log_out(log_path, std::ios::trunc);
    if (!log_out) throw TrainingError("cannot open train log for writing: " + log_path.string());

    RunArtifacts artifacts;
    artifacts.run_dir = run_dir;
    artifacts.log_path = log_path;

    std::map<std::string, std::string> skipped; // path -> reason, reported once
    double best_f1 = -1.0;
    int best_epoch = 0;
    WeightSnapshot best_snapshot;
    const auto run_start = std::chrono::steady_clock::now();

    std::vector<std::size_t> order(train_ds.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        int batch_index = 0;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
            const std::size_t end =
                std::min(begin + static_cast<std::size_t>(cfg.batch_size), order.size());

            // Materialize, dropping undecodable records into the skip report.
            std::vector<const ImageRecord*> kept;
            std::vector<float> staging((end - begin) * sample_floats);
            for (std::size_t i = begin; i < end; ++i) {
                const ImageRecord& rec = train_ds.records[order[i]];
                std::string error;
                if (materialize_record(rec, input, norm, staging.data() + kept.size() * sample_floats,
                                       &error)) {
                    kept.push_back(&rec);
                } else if (skipped.emplace(rec.image_path, error).second) {
                    std::fprintf(stderr, "warning: skipping %s: %s\n", rec.image_path.c_str(),
                                 error.c_str());
                }
            }
            if (kept.empty()) continue;

            nn::Tensor batch(static_cast<int>(kept.size()), 3, input, input);
            std::copy(staging.begin(), staging.begin() + kept.size() * sample_floats,
                      batch.v.begin());

            adam.zero_grad();
            const nn::Tensor logits = model->forward_logits(batch, true);
            for (float v : logits.v) {
                if (!std::isfinite(v)) {
                    throw TrainingError("non-finite model output at epoch " +
                                        std::to_string(epoch) + ", batch " +
                                        std::to_string(batch_index) +
                                        " (diverged training, try a lower learning rate)");
                }
            }
            nn::Tensor dlogits = nn::Tensor::like(logits);
            double batch_loss = 0.0;
            const double inv_batch = 1.0 / static_cast<double>(kept.size());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                std::vector<double> logit_row(static_cast<std::size_t>(logits.c));
                const float* src = logits.sample(static_cast<int>(i));
                for (int k = 0; k < logits.c; ++k) logit_row[static_cast<std::size_t>(k)] = src[k];
                const std::vector<double> target = target_vector(*kept[i], cfg.task.num_labels());
                batch_loss += loss(cfg.model.head_mode, logit_row, target) * inv_batch;
                const std::vector<double> grad =
                    loss_gradient(cfg.model.head_mode, logit_row, target);
                float* dst = dlogits.sample(static_cast<int>(i));
                for (int k = 0; k < logits.c; ++k) {
                    dst[k] = static_cast<float>(grad[static_cast<std::size_t>(k)] * inv_batch);
                }
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(batch_index));
            }
            model->backward(dlogits);
            adam.step();

            loss_sum += batch_loss * static_cast<double>(kept.size());
            seen += kept.size();
        }
        if (seen == 0) {
            throw TrainingError("epoch " + std::to_string(epoch) +
                                ": every training image failed to decode");
        }

        TrainLogEntry entry;
        entry.epoch = epoch;
        entry.train_loss = loss_sum / static_cast<double>(seen);
        if (has_dev) {
            const DevEval ev = evaluate_dev(*model, dev, cfg);
            entry.dev_loss = ev.loss;
            entry.dev_weighted_f1 = ev.weighted_f1;
            if (ev.weighted_f1 > best_f1) {
                best_f1 = ev.weighted_f1;
                best_epoch = epoch;
                best_snapshot = WeightSnapshot::capture(*model);
            }
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
        entry.wall_clock_seconds = cfg.deterministic ? 0.0 : elapsed;

        log_out << log_entry_json(entry).dump() << "\n";
        log_out.flush();
        if (!log_out.good()) throw TrainingError("failed writing train log: " + log_path.string());
        artifacts.log.push_back(entry);
    }

    if (!has_dev) best_epoch = cfg.epochs;

    const auto checkpoint_meta = [&](int epoch, std::optional<double> dev_f1) {
        nlohmann::ordered_json extra;
        extra["epoch"] = epoch;
        extra["epochs_total"] = cfg.epochs;
        extra["seed"] = cfg.seed;
        extra["optimizer"] = {{"name", cfg.optimizer},
                              {"learning_rate", cfg.learning_rate},
                              {"beta1", adam_opts.beta1},
                              {"beta2", adam_opts.beta2},
                              {"eps", adam_opts.eps}};
        extra["config_hash"] = config_hash(cfg);
        if (dev_f1) extra["dev_weighted_f1"] = *dev_f1;
        return extra;
    };
    const auto save_with_retry = [&](const std::filesystem::path& base,
                                     const nlohmann::json& extra) {
        try {
            save_checkpoint(*model, cfg.task, cfg.threshold, extra, base);
        } catch (const TrainingError&) {
            save_checkpoint(*model, cfg.task, cfg.threshold, extra, base); // single retry
        }
    };

    const std::filesystem::path final_base = run_dir / "ckpt-final";
    save_with_retry(final_base,
                    checkpoint_meta(cfg.epochs, artifacts.log.back().dev_weighted_f1));
    artifacts.final_checkpoint = run_dir / "ckpt-final.vsw";

    if (has_dev && best_epoch != cfg.epochs) {
        best_snapshot.restore(*model);
    }
    const std::filesystem::path best_base = run_dir / "ckpt-best";
    save_with_retry(best_base, checkpoint_meta(best_epoch, has_dev
                                                               ? std::optional<double>(best_f1)
                                                               : std::nullopt));
    artifacts.best_checkpoint = run_dir / "ckpt-best.vsw";
    artifacts.best_epoch = best_epoch;
    if (has_dev) artifacts.best_dev_weighted_f1 = best_f1;

    nlohmann::ordered_json meta;
    meta["task"] = to_string(cfg.task.id);
    meta["backbone"] = to_string(cfg.model.backbone);
    meta["train_manifest"] = train_manifest.string();
    meta["dev_manifest"] = dev_manifest ? nlohmann::json(dev_manifest->string()) : nlohmann::json();
    meta["records"] = {{"train_input", train_raw.records.size()},
                       {"train_after_balance", balanced.records.size()},
                       {"train_after_augment", train_ds.records.size()},
                       {"dev", dev.records.size()}};
    meta["label_counts_before_balance"] = counts_before;
    meta["label_counts_after_balance"] = counts_after;
    nlohmann::ordered_json skips = nlohmann::ordered_json::array();
    for (const auto& [path, reason] : skipped) {
        skips.push_back({{"path", path}, {"reason", reason}});
    }
    meta["skipped_images"] = skips;
    meta["best_epoch"] = best_epoch;
    meta["best_dev_weighted_f1"] =
        has_dev ? nlohmann::json(best_f1) : nlohmann::json();
    meta["config_hash"] = config_hash(cfg);
    meta["wall_clock_seconds_total"] =
        cfg.deterministic
            ? 0.0
            : std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    std::ofstream meta_out(run_dir / "meta.json");
    if (!meta_out) throw TrainingError("cannot write run metadata");
    meta_out << meta.dump(2) << "\n";

    return artifacts;
}

std::pair<TrainConfig, TrainConfig> make_run_pair(const TaskSpec& task) {
    TrainConfig run1 = preset_config("run1", task);
    TrainConfig run2 = preset_config("run2", task);
    return {run1, run2};
}

} // namespace vsa
