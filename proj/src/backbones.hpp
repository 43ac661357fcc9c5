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

#include <memory>

#include "vsa/nn/layers.hpp"

namespace vsa {

struct BackboneNet {
    std::unique_ptr<nn::Layer> features; // (N,3,S,S) -> (N, C, h', w')
    int feature_channels = 0;
};

BackboneNet make_toy_backbone(Rng& rng);
BackboneNet make_vgg19_backbone(Rng& rng);
BackboneNet make_inception_v3_backbone(Rng& rng);

} // namespace vsa
