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

#include "vsa/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "vsa/errors.hpp"

namespace vsa {

ImageTensor decode_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw InputError("image file not found: " + path.string());
    }
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR); // grayscale replicated to 3 channels
    if (bgr.empty()) {
        throw InputError("cannot decode image (unsupported or corrupt file): " + path.string());
    }
    ImageTensor img(bgr.rows, bgr.cols);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img.at(0, y, x) = static_cast<float>(row[x][2]) / 255.0f; // R
            img.at(1, y, x) = static_cast<float>(row[x][1]) / 255.0f; // G
            img.at(2, y, x) = static_cast<float>(row[x][0]) / 255.0f; // B
        }
    }
    return img;
}

void encode_image(const std::filesystem::path& path, const ImageTensor& img) {
    if (!img.valid()) {
        throw InputError("cannot encode an empty or malformed image tensor");
    }
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            auto q = [&](int c) {
                const float v = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
                return static_cast<unsigned char>(std::lround(v * 255.0f));
            };
            row[x] = cv::Vec3b(q(2), q(1), q(0));
        }
    }
    if (!cv::imwrite(path.string(), bgr)) {
        throw InputError("failed to write image: " + path.string());
    }
}

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w) {
    if (!img.valid() || out_h < 1 || out_w < 1) {
        throw InputError("resize_bilinear: invalid input or output shape");
    }
    if (out_h == img.height && out_w == img.width) return img;

    ImageTensor out(out_h, out_w);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const float wy = static_cast<float>(fy - y0);
        for (int x = 0; x < out_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const float wx = static_cast<float>(fx - x0);
            for (int c = 0; c < 3; ++c) {
                const float top = img.at(c, y0, x0) * (1.0f - wx) + img.at(c, y0, x1) * wx;
                const float bot = img.at(c, y1, x0) * (1.0f - wx) + img.at(c, y1, x1) * wx;
                out.at(c, y, x) = top * (1.0f - wy) + bot * wy;
            }
        }
    }
    return out;
}

} // namespace vsa
