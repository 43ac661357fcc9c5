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
#include <optional>
#include <vector>

#include "vsa/image.hpp"
#include "vsa/manifest.hpp"

namespace vsa {

struct AugmentConfig {
    bool enabled = true;
    double crop_fraction = 0.8;                    // in (0,1]; 1 disables cropping
    std::vector<double> rotation_degrees = {-15.0, 15.0}; // sampled uniformly; empty disables
    bool horizontal_flip = true;                   // applied with probability 1/2
    int copies_per_record = 1;
    std::optional<std::uint64_t> seed;             // absent: derived from the run seed

    std::uint64_t effective_seed(std::uint64_t fallback) const { return seed.value_or(fallback); }
    void validate() const;
};

// Horizontal mirror; same shape.
ImageTensor apply_flip(const ImageTensor& img);

// Rotation about the image center, positive degrees counterclockwise.
// Output keeps the input shape; samples falling outside the source use edge
// replication. Bilinear sampling, exact at multiples of 180 degrees (and at
// 90/270 on square images).
ImageTensor apply_rotation(const ImageTensor& img, double degrees);

// Axis-aligned crop: side lengths scale by `fraction`, position set by
// offsets in [0,1] ((0,0) = top-left corner of the valid range). Crops
// smaller than 1x1 pixel are rejected.
ImageTensor apply_crop(const ImageTensor& img, double fraction, double offset_x, double offset_y);

ImageTensor apply_transform(const ImageTensor& img, const TransformStep& step);
ImageTensor apply_chain(const ImageTensor& img, const std::vector<TransformStep>& chain);

// Appends copies_per_record augmented variants per original record. Variants
// carry the sampled transform chain in their provenance and keep the source
// record's labels; pixels are produced lazily at decode time.
Dataset augment_dataset(const Dataset& ds, const AugmentConfig& cfg);

} // namespace vsa
