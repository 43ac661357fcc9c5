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

#include <vector>

#include "vsa/nn/layers.hpp"

namespace vsa::nn {

struct AdamOptions {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    Adam(std::vector<Param*> params, const AdamOptions& opts);

    void zero_grad();
    // One update from the accumulated gradients, with bias correction.
    void step();

    long long steps_taken() const { return t_; }

private:
    std::vector<Param*> params_;
    AdamOptions opts_;
    std::vector<std::vector<float>> m_, v_;
    long long t_ = 0;
};

} // namespace vsa::nn
