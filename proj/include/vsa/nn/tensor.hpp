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

#include <cstddef>
#include <string>
#include <vector>

namespace vsa::nn {

// Dense NCHW float tensor. Flat vectors use h = w = 1.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0f) {}

    static Tensor like(const Tensor& other) { return Tensor(other.n, other.c, other.h, other.w); }

    std::size_t size() const { return v.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
    std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }

    float* data() { return v.data(); }
    const float* data() const { return v.data(); }
    float* sample(int i) { return v.data() + static_cast<std::size_t>(i) * sample_size(); }
    const float* sample(int i) const { return v.data() + static_cast<std::size_t>(i) * sample_size(); }

    float& at(int ni, int ci, int yi, int xi) {
        return v[((static_cast<std::size_t>(ni) * c + ci) * h + yi) * w + xi];
    }
    float at(int ni, int ci, int yi, int xi) const {
        return v[((static_cast<std::size_t>(ni) * c + ci) * h + yi) * w + xi];
    }

    void fill(float value) { std::fill(v.begin(), v.end(), value); }
    bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    std::string shape_str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

} // namespace vsa::nn
