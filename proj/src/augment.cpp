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

#include "vsa/augment.hpp"

#include <algorithm>
#include <cmath>

#include "vsa/errors.hpp"
#include "vsa/rng.hpp"

namespace vsa {

void AugmentConfig::validate() const {
    if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) {
        throw InputError("crop_fraction must be in (0, 1]");
    }
    for (double d : rotation_degrees) {
        if (d < -180.0 || d > 180.0) {
            throw InputError("rotation angles must lie in [-180, 180]");
        }
    }
    if (copies_per_record < 0) {
        throw InputError("copies_per_record must be >= 0");
    }
}

ImageTensor apply_flip(const ImageTensor& img) {
    ImageTensor out(img.height, img.width);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                out.at(c, y, x) = img.at(c, y, img.width - 1 - x);
            }
        }
    }
    return out;
}

namespace {

float sample_edge_clamped(const ImageTensor& img, int c, double fy, double fx) {
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int x0 = static_cast<int>(std::floor(fx));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const float wy = static_cast<float>(fy - y0);
    const float wx = static_cast<float>(fx - x0);
    const float top = img.at(c, y0, x0) * (1.0f - wx) + img.at(c, y0, x1) * wx;
    const float bot = img.at(c, y1, x0) * (1.0f - wx) + img.at(c, y1, x1) * wx;
    return top * (1.0f - wy) + bot * wy;
}

} // namespace

ImageTensor apply_rotation(const ImageTensor& img, double degrees) {
    if (degrees < -180.0 || degrees > 180.0) {
        throw InputError("rotation angle must lie in [-180, 180]");
    }
    if (degrees == 0.0) return img;

    const double theta = degrees * 3.14159265358979323846 / 180.0;
    // Inverse mapping: output pixel -> source coordinates (rotate by -theta).
    const double cos_t = std::cos(-theta);
    const double sin_t = std::sin(-theta);
    const double cy = (img.height - 1) / 2.0;
    const double cx = (img.width - 1) / 2.0;

    ImageTensor out(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        const double dy = y - cy;
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx;
            // Image y grows downward, so the screen-space rotation matrix
            // uses the transposed sign layout.
            const double sx = cx + dx * cos_t - dy * sin_t;
            const double sy = cy + dx * sin_t + dy * cos_t;
            for (int c = 0; c < 3; ++c) {
                out.at(c, y, x) = sample_edge_clamped(img, c, sy, sx);
            }
        }
    }
    return out;
}

ImageTensor apply_crop(const ImageTensor& img, double fraction, double offset_x, double offset_y) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw InputError("crop fraction must be in (0, 1]");
    }
    if (offset_x < 0.0 || offset_x > 1.0 || offset_y < 0.0 || offset_y > 1.0) {
        throw InputError("crop offsets must lie in [0, 1]");
    }
    const int ch = static_cast<int>(std::lround(fraction * img.height));
    const int cw = static_cast<int>(std::lround(fraction * img.width));
    if (ch < 1 || cw < 1) {
        throw InputError("crop smaller than 1x1 pixel");
    }
    const int y0 = static_cast<int>(std::lround(offset_y * (img.height - ch)));
    const int x0 = static_cast<int>(std::lround(offset_x * (img.width - cw)));

    ImageTensor out(ch, cw);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < ch; ++y) {
            for (int x = 0; x < cw; ++x) {
                out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
            }
        }
    }
    return out;
}

ImageTensor apply_transform(const ImageTensor& img, const TransformStep& step) {
    switch (step.kind) {
        case TransformKind::crop:
            return apply_crop(img, step.crop_fraction, step.crop_offset_x, step.crop_offset_y);
        case TransformKind::rotate:
            return apply_rotation(img, step.degrees);
        case TransformKind::flip_h:
            return apply_flip(img);
    }
    throw InputError("unknown transform kind");
}

ImageTensor apply_chain(const ImageTensor& img, const std::vector<TransformStep>& chain) {
    ImageTensor out = img;
    for (const TransformStep& step : chain) out = apply_transform(out, step);
    return out;
}

Dataset augment_dataset(const Dataset& ds, const AugmentConfig& cfg) {
    cfg.validate();
    if (!cfg.enabled || cfg.copies_per_record == 0) return ds;

    Dataset out = ds;
    const std::uint64_t seed = cfg.effective_seed(0);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        for (int copy = 0; copy < cfg.copies_per_record; ++copy) {
            Rng rng(derive_seed(seed, "augment-chain",
                                i * static_cast<std::uint64_t>(cfg.copies_per_record) + copy));
            ImageRecord variant = ds.records[i];
            variant.origin = RecordOrigin::augmented;
            // Chains compose if the source record was itself augmented.
            if (cfg.crop_fraction < 1.0) {
                TransformStep crop;
                crop.kind = TransformKind::crop;
                crop.crop_fraction = cfg.crop_fraction;
                crop.crop_offset_x = rng.uniform01();
                crop.crop_offset_y = rng.uniform01();
                variant.transforms.push_back(crop);
            }
            if (!cfg.rotation_degrees.empty()) {
                TransformStep rot;
                rot.kind = TransformKind::rotate;
                rot.degrees = cfg.rotation_degrees[rng.uniform_index(cfg.rotation_degrees.size())];
                variant.transforms.push_back(rot);
            }
            if (cfg.horizontal_flip && rng.bernoulli(0.5)) {
                TransformStep flip;
                flip.kind = TransformKind::flip_h;
                variant.transforms.push_back(flip);
            }
            out.records.push_back(std::move(variant));
        }
    }
    return out;
}

} // namespace vsa
