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
#include <string>

#include <nlohmann/json.hpp>

#include "vsa/train.hpp"

namespace vsa {

// Versioned JSON form of a training config. Parsing is strict: unknown keys
// anywhere are errors, so typos fail fast instead of silently falling back
// to defaults.
nlohmann::ordered_json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

TrainConfig load_config(const std::filesystem::path& path);
void save_config(const TrainConfig& cfg, const std::filesystem::path& path);

// FNV-1a over the canonical JSON dump; recorded in checkpoint sidecars.
std::string config_hash(const TrainConfig& cfg);

// `run1` = inception_v3, `run2` = vgg19; everything else identical.
TrainConfig preset_config(const std::string& preset, const TaskSpec& task);

} // namespace vsa
