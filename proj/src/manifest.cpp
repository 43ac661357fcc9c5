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

#include "vsa/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "vsa/errors.hpp"

namespace vsa {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

TaskId parse_task_id(const std::string& s) {
    const std::string t = to_lower(trim(s));
    if (t == "task1") return TaskId::task1;
    if (t == "task2") return TaskId::task2;
    if (t == "task3") return TaskId::task3;
    throw InputError("unknown task id '" + s + "' (expected task1, task2 or task3)");
}

std::string to_string(TaskId id) {
    switch (id) {
        case TaskId::task1: return "task1";
        case TaskId::task2: return "task2";
        case TaskId::task3: return "task3";
    }
    return "task?";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "split?";
}

Split parse_split(const std::string& s) {
    const std::string t = to_lower(trim(s));
    if (t == "train") return Split::train;
    if (t == "dev") return Split::dev;
    if (t == "test") return Split::test;
    throw InputError("unknown split '" + s + "' (expected train, dev or test)");
}

std::string to_string(RecordOrigin o) {
    switch (o) {
        case RecordOrigin::original: return "original";
        case RecordOrigin::upsampled: return "upsampled";
        case RecordOrigin::augmented: return "augmented";
    }
    return "origin?";
}

std::string to_string(const TransformStep& step) {
    std::ostringstream os;
    switch (step.kind) {
        case TransformKind::crop:
            os << "crop(fraction=" << step.crop_fraction << ",offset=" << step.crop_offset_x << ","
               << step.crop_offset_y << ")";
            break;
        case TransformKind::rotate:
            os << "rotate(" << step.degrees << "deg)";
            break;
        case TransformKind::flip_h:
            os << "flip_h";
            break;
    }
    return os.str();
}

int TaskSpec::resolve_label(const std::string& token) const {
    const std::string t = to_lower(trim(token));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (to_lower(labels[i]) == t) return static_cast<int>(i);
    }
    return -1;
}

TaskSpec builtin_task_spec(TaskId id, const std::string& task3_extra_label) {
    TaskSpec spec;
    spec.id = id;
    switch (id) {
        case TaskId::task1:
            spec.mode = LabelMode::single_label;
            spec.labels = {"negative", "positive", "neutral"};
            break;
        case TaskId::task2:
            spec.mode = LabelMode::multi_label;
            spec.labels = {"joy", "sadness", "fear", "disgust", "anger", "surprise", "neutral"};
            break;
        case TaskId::task3:
            spec.mode = LabelMode::multi_label;
            spec.labels = {"anger",  "anxiety", "craving", "empathetic_pain", "fear",
                           "horror", "joy",     "relief",  "sadness",         "surprise"};
            spec.labels.push_back(task3_extra_label.empty() ? "label_11" : to_lower(trim(task3_extra_label)));
            break;
    }
    for (std::size_t i = 0; i < spec.labels.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.labels.size(); ++j) {
            if (spec.labels[i] == spec.labels[j]) {
                throw InputError("duplicate label '" + spec.labels[i] + "' in task vocabulary");
            }
        }
    }
    return spec;
}

bool ImageRecord::has_label(int id) const {
    return std::binary_search(label_ids.begin(), label_ids.end(), id);
}

std::vector<std::string> ImageRecord::label_names(const TaskSpec& spec) const {
    std::vector<std::string> out;
    out.reserve(label_ids.size());
    for (int id : label_ids) out.push_back(spec.labels.at(static_cast<std::size_t>(id)));
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<int> parse_labels(const std::string& field, const TaskSpec& spec, std::size_t row,
                              const std::filesystem::path& path) {
    std::vector<int> ids;
    for (const std::string& raw : split_fields(field, ';')) {
        const std::string token = trim(raw);
        if (token.empty()) continue;
        const int id = spec.resolve_label(token);
        if (id < 0) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": unknown label '" + token +
                             "' for " + to_string(spec.id));
        }
        ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

} // namespace

Dataset load_manifest(const std::filesystem::path& path, const TaskSpec& spec, Split split,
                      const ManifestOptions& options, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("manifest file not found or unreadable: " + path.string());
    }
    const std::filesystem::path base =
        options.base_dir.empty() ? path.parent_path() : options.base_dir;

    Dataset ds;
    ds.spec = spec;
    ds.split = split;

    std::string line;
    std::size_t row = 0;
    std::unordered_set<std::string> seen_paths;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cols = split_fields(line, ',');
        if (!header_seen) {
            if (cols.size() != 2 || to_lower(trim(cols[0])) != "image_path" ||
                to_lower(trim(cols[1])) != "labels") {
                throw InputError(path.string() + ":" + std::to_string(row) +
                                 ": expected header 'image_path,labels'");
            }
            header_seen = true;
            continue;
        }
        if (cols.size() != 2) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": expected 2 columns, got " +
                             std::to_string(cols.size()));
        }
        const std::string raw_path = trim(cols[0]);
        if (raw_path.empty()) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": empty image_path");
        }

        ImageRecord rec;
        std::filesystem::path p(raw_path);
        rec.image_path = p.is_absolute() ? p.string() : (base / p).string();
        rec.label_ids = parse_labels(cols[1], spec, row, path);
        if (rec.label_ids.empty() && options.require_labels) {
            throw InputError(path.string() + ":" + std::to_string(row) +
                             ": empty label field in a ground-truth manifest");
        }
        if (spec.mode == LabelMode::single_label && rec.label_ids.size() > 1) {
            throw InputError(path.string() + ":" + std::to_string(row) + ": " + to_string(spec.id) +
                             " is single-label but row carries " +
                             std::to_string(rec.label_ids.size()) + " labels");
        }
        if (!seen_paths.insert(rec.image_path).second && warnings != nullptr) {
            warnings->push_back(path.string() + ":" + std::to_string(row) + ": duplicate image_path " +
                                rec.image_path);
        }
        ds.records.push_back(std::move(rec));
    }
    if (!header_seen) {
        throw InputError(path.string() + ": empty manifest (missing 'image_path,labels' header)");
    }
    return ds;
}

void save_manifest(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open manifest for writing: " + path.string());
    }
    out << "image_path,labels\n";
    for (const ImageRecord& rec : ds.records) {
        out << rec.image_path << ",";
        const std::vector<std::string> names = rec.label_names(ds.spec);
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) out << ';';
            out << names[i];
        }
        out << "\n";
    }
    if (!out.good()) {
        throw InputError("failed writing manifest: " + path.string());
    }
}

std::vector<long long> label_counts(const Dataset& ds) {
    std::vector<long long> counts(ds.spec.num_labels(), 0);
    for (const ImageRecord& rec : ds.records) {
        for (int id : rec.label_ids) counts[static_cast<std::size_t>(id)] += 1;
    }
    return counts;
}

std::map<std::string, long long> label_counts_by_name(const Dataset& ds) {
    const std::vector<long long> counts = label_counts(ds);
    std::map<std::string, long long> out;
    for (std::size_t i = 0; i < counts.size(); ++i) out[ds.spec.labels[i]] = counts[i];
    return out;
}

} // namespace vsa
