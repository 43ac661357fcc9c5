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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "vsa/image.hpp"
#include "vsa/manifest.hpp"
#include "vsa/rng.hpp"

namespace vsa::testing {

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& hint) {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               (hint + "-" + std::to_string(rd()) + "-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

// In-memory dataset over fake paths; label_sets hold vocabulary indices.
inline Dataset make_dataset(const TaskSpec& spec, const std::vector<std::vector<int>>& label_sets,
                            Split split = Split::train) {
    Dataset ds;
    ds.spec = spec;
    ds.split = split;
    for (std::size_t i = 0; i < label_sets.size(); ++i) {
        ImageRecord rec;
        rec.image_path = "img" + std::to_string(i) + ".jpg";
        rec.label_ids = label_sets[i];
        std::sort(rec.label_ids.begin(), rec.label_ids.end());
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

inline TaskSpec synthetic_spec(LabelMode mode, const std::vector<std::string>& labels) {
    TaskSpec spec;
    spec.id = mode == LabelMode::single_label ? TaskId::task1 : TaskId::task2;
    spec.mode = mode;
    spec.labels = labels;
    return spec;
}

inline ImageTensor random_image(Rng& rng, int h, int w) {
    ImageTensor img(h, w);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    return img;
}

// Solid color keyed by class with mild noise; classes are trivially
// separable by channel means.
inline ImageTensor class_image(int class_id, Rng& rng, int size = 64) {
    ImageTensor img(size, size, 0.05f);
    const int channel = class_id % 3;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            img.at(channel, y, x) = 0.9f;
            for (int c = 0; c < 3; ++c) {
                img.at(c, y, x) = std::clamp(
                    img.at(c, y, x) + static_cast<float>(rng.normal(0.0, 0.02)), 0.0f, 1.0f);
            }
        }
    }
    return img;
}

// Writes `per_class` PNGs for each of `classes` labels plus the matching
// manifest; returns the manifest path.
inline std::filesystem::path write_class_dataset(const std::filesystem::path& dir,
                                                 const std::vector<std::string>& labels,
                                                 int per_class, std::uint64_t seed,
                                                 const std::string& manifest_name = "train.csv",
                                                 int size = 64) {
    Rng rng(seed);
    std::string manifest = "image_path,labels\n";
    for (std::size_t cls = 0; cls < labels.size(); ++cls) {
        for (int i = 0; i < per_class; ++i) {
            const std::string name =
                "c" + std::to_string(cls) + "_" + std::to_string(i) + ".png";
            encode_image(dir / name, class_image(static_cast<int>(cls), rng, size));
            manifest += name + "," + labels[cls] + "\n";
        }
    }
    const std::filesystem::path manifest_path = dir / manifest_name;
    write_text(manifest_path, manifest);
    return manifest_path;
}

} // namespace vsa::testing
