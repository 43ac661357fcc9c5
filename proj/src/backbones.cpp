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

#include "backbones.hpp"

namespace vsa {

using nn::Conv2d;
using nn::MaxPool2d;
using nn::ReLU;
using nn::Sequential;

// Three conv blocks, 64x64 input -> (64, 16, 16) features. Small enough to
// train on CPU in seconds; used by the test suite and smoke runs.
BackboneNet make_toy_backbone(Rng& rng) {
    auto seq = std::make_unique<Sequential>();
    seq->add("conv1", std::make_unique<Conv2d>(3, 16, 3, 1, 1, true, rng));
    seq->add("relu1", std::make_unique<ReLU>());
    seq->add("pool1", std::make_unique<MaxPool2d>(2, 2));
    seq->add("conv2", std::make_unique<Conv2d>(16, 32, 3, 1, 1, true, rng));
    seq->add("relu2", std::make_unique<ReLU>());
    seq->add("pool2", std::make_unique<MaxPool2d>(2, 2));
    seq->add("conv3", std::make_unique<Conv2d>(32, 64, 3, 1, 1, true, rng));
    seq->add("relu3", std::make_unique<ReLU>());

    BackboneNet net;
    net.features = std::move(seq);
    net.feature_channels = 64;
    return net;
}

// VGG-19 feature stack: conv blocks (2,2,4,4,4) with 3x3 kernels and five
// 2x2 max pools; 224x224 input -> (512, 7, 7). The original fully connected
// classifier is not part of the backbone.
BackboneNet make_vgg19_backbone(Rng& rng) {
    auto seq = std::make_unique<Sequential>();
    const int widths[5] = {64, 128, 256, 512, 512};
    const int depths[5] = {2, 2, 4, 4, 4};
    int in_c = 3;
    for (int block = 0; block < 5; ++block) {
        for (int layer = 0; layer < depths[block]; ++layer) {
            const std::string tag =
                "conv" + std::to_string(block + 1) + "_" + std::to_string(layer + 1);
            seq->add(tag, std::make_unique<Conv2d>(in_c, widths[block], 3, 1, 1, true, rng));
            seq->add("relu" + std::to_string(block + 1) + "_" + std::to_string(layer + 1),
                     std::make_unique<ReLU>());
            in_c = widths[block];
        }
        seq->add("pool" + std::to_string(block + 1), std::make_unique<MaxPool2d>(2, 2));
    }

    BackboneNet net;
    net.features = std::move(seq);
    net.feature_channels = 512;
    return net;
}

} // namespace vsa
