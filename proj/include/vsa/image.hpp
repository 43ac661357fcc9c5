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
#include <vector>

namespace vsa {

// Decoded image: planar RGB, values in [0,1]. Channel count is fixed at 3;
// grayscale files are replicated to three channels at decode time.
struct ImageTensor {
    int height = 0;
    int width = 0;
    std::vector<float> data; // size 3*height*width, plane-major (c, y, x)

    ImageTensor() = default;
    ImageTensor(int h, int w, float fill = 0.0f)
        : height(h), width(w), data(static_cast<std::size_t>(3) * h * w, fill) {}

    float at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    bool valid() const {
        return height >= 1 && width >= 1 &&
               data.size() == static_cast<std::size_t>(3) * height * width;
    }
};

// JPEG/PNG decode. Throws InputError on missing or undecodable files.
ImageTensor decode_image(const std::filesystem::path& path);

// PNG encode, used by fixtures and tools. Extension of `path` decides the
// codec (.png or .jpg).
void encode_image(const std::filesystem::path& path, const ImageTensor& img);

// Bilinear resample to (out_h, out_w), half-pixel-center convention.
ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w);

} // namespace vsa
