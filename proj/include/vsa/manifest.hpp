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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vsa {

enum class TaskId { task1, task2, task3 };
enum class LabelMode { single_label, multi_label };
enum class Split { train, dev, test };
enum class RecordOrigin { original, upsampled, augmented };

TaskId parse_task_id(const std::string& s);
std::string to_string(TaskId id);
std::string to_string(Split s);
std::string to_string(RecordOrigin o);
Split parse_split(const std::string& s);

// Task identity plus its fixed label vocabulary. Label order defines the
// index of each output-vector component and never changes after construction.
struct TaskSpec {
    TaskId id = TaskId::task1;
    LabelMode mode = LabelMode::single_label;
    std::vector<std::string> labels;

    std::size_t num_labels() const { return labels.size(); }
    // Case-insensitive, whitespace-trimmed lookup. Returns -1 when unknown.
    int resolve_label(const std::string& token) const;
};

// Canonical specs: task1 = 3-class single-label, task2 = 7-label multi-label,
// task3 = 11-label multi-label. The challenge definition enumerates only ten
// of task3's labels; the eleventh is configurable and defaults to a
// placeholder name.
TaskSpec builtin_task_spec(TaskId id, const std::string& task3_extra_label = "label_11");

// One geometric transform in an augmented record's provenance chain.
enum class TransformKind { crop, rotate, flip_h };

struct TransformStep {
    TransformKind kind = TransformKind::flip_h;
    // crop parameters
    double crop_fraction = 1.0;
    double crop_offset_x = 0.0;
    double crop_offset_y = 0.0;
    // rotation parameter
    double degrees = 0.0;
};

std::string to_string(const TransformStep& step);

// One image and its label set, stored as indices into the owning TaskSpec's
// vocabulary (sorted, unique). Augmented records carry the transform chain to
// apply at decode time; pixels are never stored here.
struct ImageRecord {
    std::string image_path;
    std::vector<int> label_ids;
    RecordOrigin origin = RecordOrigin::original;
    std::vector<TransformStep> transforms;

    bool has_label(int id) const;
    std::vector<std::string> label_names(const TaskSpec& spec) const;
};

struct Dataset {
    TaskSpec spec;
    Split split = Split::train;
    std::vector<ImageRecord> records;

    std::size_t size() const { return records.size(); }
};

struct ManifestOptions {
    // Ground-truth manifests must label every row; prediction inputs may
    // leave the labels column empty.
    bool require_labels = true;
    // Relative image paths resolve against this directory; empty means the
    // manifest's own directory.
    std::filesystem::path base_dir;
};

// Reads a `image_path,labels` CSV (labels `;`-separated) into a Dataset,
// preserving file order. Duplicate image paths produce warnings, not errors.
Dataset load_manifest(const std::filesystem::path& path, const TaskSpec& spec, Split split,
                      const ManifestOptions& options = {},
                      std::vector<std::string>* warnings = nullptr);

// Inverse of load_manifest for original records; used for round-trip checks
// and for writing derived manifests.
void save_manifest(const Dataset& ds, const std::filesystem::path& path);

// Count of records carrying each label, indexed by vocabulary position.
// Multi-label records contribute to every label they carry.
std::vector<long long> label_counts(const Dataset& ds);

// Same counts keyed by label name, for printing and serialization.
std::map<std::string, long long> label_counts_by_name(const Dataset& ds);

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);

} // namespace vsa
