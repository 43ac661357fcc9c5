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

#include "vsa/config.hpp"

#include <fstream>

#include "vsa/errors.hpp"
#include "vsa/rng.hpp"

namespace vsa {

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw InputError("unknown key '" + key + "' in " + scope +
                             " config (fail-fast against typos)");
        }
    }
}

} // namespace

nlohmann::ordered_json config_to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["task"] = to_string(cfg.task.id);
    if (cfg.task.id == TaskId::task3) {
        j["task3_label_11"] = cfg.task.labels.back();
    }

    nlohmann::ordered_json model;
    model["backbone"] = to_string(cfg.model.backbone);
    model["pretrained"] = cfg.model.pretrained;
    model["head_mode"] = to_string(cfg.model.head_mode);
    model["num_outputs"] = cfg.model.num_outputs;
    model["freeze_backbone"] = cfg.model.freeze_backbone;
    model["head_hidden_units"] = cfg.model.hidden_units();
    j["model"] = model;

    j["epochs"] = cfg.epochs;
    j["learning_rate"] = cfg.learning_rate;
    j["optimizer"] = cfg.optimizer;
    j["batch_size"] = cfg.batch_size;
    j["seed"] = cfg.seed;
    j["deterministic"] = cfg.deterministic;
    j["dev_fraction"] = cfg.dev_fraction;
    j["threshold"] = cfg.threshold;

    nlohmann::ordered_json balance;
    balance["enabled"] = cfg.balance.enabled;
    if (cfg.balance.seed) {
        balance["seed"] = *cfg.balance.seed;
    } else {
        balance["seed"] = nullptr;
    }
    balance["max_replication_factor"] = cfg.balance.max_replication_factor;
    balance["target"] = to_string(cfg.balance.target);
    j["balance"] = balance;

    nlohmann::ordered_json augment;
    augment["enabled"] = cfg.augment.enabled;
    if (cfg.augment.seed) {
        augment["seed"] = *cfg.augment.seed;
    } else {
        augment["seed"] = nullptr;
    }
    augment["crop_fraction"] = cfg.augment.crop_fraction;
    augment["rotation_degrees"] = cfg.augment.rotation_degrees;
    augment["horizontal_flip"] = cfg.augment.horizontal_flip;
    augment["copies_per_record"] = cfg.augment.copies_per_record;
    j["augment"] = augment;
    return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"version", "task", "task3_label_11", "model", "epochs", "learning_rate",
                         "optimizer", "batch_size", "seed", "deterministic", "dev_fraction",
                         "threshold", "balance", "augment"},
                        "train");
    TrainConfig cfg;
    try {
        const int version = j.at("version").get<int>();
        if (version != 1) {
            throw InputError("unsupported config version " + std::to_string(version));
        }
        const TaskId task_id = parse_task_id(j.at("task").get<std::string>());
        const std::string extra =
            j.contains("task3_label_11") ? j["task3_label_11"].get<std::string>() : "label_11";
        cfg.task = builtin_task_spec(task_id, extra);

        cfg.model.head_mode =
            cfg.task.mode == LabelMode::single_label ? HeadMode::softmax : HeadMode::sigmoid;
        cfg.model.num_outputs = static_cast<int>(cfg.task.num_labels());

        if (j.contains("model")) {
            const nlohmann::json& m = j["model"];
            reject_unknown_keys(m,
                                {"backbone", "pretrained", "head_mode", "num_outputs",
                                 "freeze_backbone", "head_hidden_units"},
                                "model");
            if (m.contains("backbone")) {
                cfg.model.backbone = parse_backbone(m["backbone"].get<std::string>());
            }
            if (m.contains("pretrained")) cfg.model.pretrained = m["pretrained"].get<bool>();
            if (m.contains("head_mode")) {
                cfg.model.head_mode = parse_head_mode(m["head_mode"].get<std::string>());
            }
            if (m.contains("num_outputs")) cfg.model.num_outputs = m["num_outputs"].get<int>();
            if (m.contains("freeze_backbone")) {
                cfg.model.freeze_backbone = m["freeze_backbone"].get<bool>();
            }
            if (m.contains("head_hidden_units") && !m["head_hidden_units"].is_null()) {
                cfg.model.head_hidden_units = m["head_hidden_units"].get<int>();
            }
        }

        if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
        if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("optimizer")) cfg.optimizer = to_lower(j["optimizer"].get<std::string>());
        if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("deterministic")) cfg.deterministic = j["deterministic"].get<bool>();
        if (j.contains("dev_fraction")) cfg.dev_fraction = j["dev_fraction"].get<double>();
        if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();

        if (j.contains("balance")) {
            const nlohmann::json& b = j["balance"];
            reject_unknown_keys(b, {"enabled", "seed", "max_replication_factor", "target"},
                                "balance");
            if (b.contains("enabled")) cfg.balance.enabled = b["enabled"].get<bool>();
            if (b.contains("seed") && !b["seed"].is_null()) {
                cfg.balance.seed = b["seed"].get<std::uint64_t>();
            }
            if (b.contains("max_replication_factor")) {
                cfg.balance.max_replication_factor = b["max_replication_factor"].get<double>();
            }
            if (b.contains("target")) {
                cfg.balance.target = parse_balance_target(b["target"].get<std::string>());
            }
        }

        if (j.contains("augment")) {
            const nlohmann::json& a = j["augment"];
            reject_unknown_keys(a,
                                {"enabled", "seed", "crop_fraction", "rotation_degrees",
                                 "horizontal_flip", "copies_per_record"},
                                "augment");
            if (a.contains("enabled")) cfg.augment.enabled = a["enabled"].get<bool>();
            if (a.contains("seed") && !a["seed"].is_null()) {
                cfg.augment.seed = a["seed"].get<std::uint64_t>();
            }
            if (a.contains("crop_fraction")) {
                cfg.augment.crop_fraction = a["crop_fraction"].get<double>();
            }
            if (a.contains("rotation_degrees")) {
                cfg.augment.rotation_degrees = a["rotation_degrees"].get<std::vector<double>>();
            }
            if (a.contains("horizontal_flip")) {
                cfg.augment.horizontal_flip = a["horizontal_flip"].get<bool>();
            }
            if (a.contains("copies_per_record")) {
                cfg.augment.copies_per_record = a["copies_per_record"].get<int>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed train config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config file not found: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const TrainConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write config file: " + path.string());
    out << config_to_json(cfg).dump(2) << "\n";
    if (!out.good()) throw InputError("failed writing config file: " + path.string());
}

std::string config_hash(const TrainConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    const std::uint64_t h = detail::fnv1a(dump);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrainConfig preset_config(const std::string& preset, const TaskSpec& task) {
    const std::string p = to_lower(trim(preset));
    TrainConfig cfg;
    cfg.task = task;
    cfg.model.head_mode =
        task.mode == LabelMode::single_label ? HeadMode::softmax : HeadMode::sigmoid;
    cfg.model.num_outputs = static_cast<int>(task.num_labels());
    cfg.model.pretrained = true;
    cfg.epochs = 50;
    cfg.learning_rate = 1e-4;
    cfg.optimizer = "adam";
    if (p == "run1") {
        cfg.model.backbone = Backbone::inception_v3;
    } else if (p == "run2") {
        cfg.model.backbone = Backbone::vgg19;
    } else {
        throw InputError("unknown preset '" + preset + "' (expected run1 or run2)");
    }
    return cfg;
}

} // namespace vsa
