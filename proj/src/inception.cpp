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

#include "vsa/errors.hpp"

namespace vsa {

namespace {

using nn::AvgPool2d;
using nn::BatchNorm2d;
using nn::Conv2d;
using nn::Fanout;
using nn::Layer;
using nn::MaxPool2d;
using nn::ReLU;
using nn::Sequential;

// conv (no bias) + batch norm + ReLU, the unit every inception branch is
// built from.
std::unique_ptr<Sequential> basic_conv(int in_c, int out_c, int kh, int kw, int sh, int sw,
                                       int ph, int pw, Rng& rng) {
    auto s = std::make_unique<Sequential>();
    s->add("conv", std::make_unique<Conv2d>(in_c, out_c, kh, kw, sh, sw, ph, pw, false, rng));
    s->add("bn", std::make_unique<BatchNorm2d>(out_c, 1e-3f));
    s->add("relu", std::make_unique<ReLU>());
    return s;
}

std::unique_ptr<Sequential> basic_conv(int in_c, int out_c, int k, int stride, int pad, Rng& rng) {
    return basic_conv(in_c, out_c, k, k, stride, stride, pad, pad, rng);
}

std::unique_ptr<Layer> block_a(int in_c, int pool_features, Rng& rng) {
    auto block = std::make_unique<Fanout>();
    block->add_branch("branch1x1", basic_conv(in_c, 64, 1, 1, 0, rng));

    auto b5 = std::make_unique<Sequential>();
    b5->add("0", basic_conv(in_c, 48, 1, 1, 0, rng));
    b5->add("1", basic_conv(48, 64, 5, 1, 2, rng));
    block->add_branch("branch5x5", std::move(b5));

    auto b3 = std::make_unique<Sequential>();
    b3->add("0", basic_conv(in_c, 64, 1, 1, 0, rng));
    b3->add("1", basic_conv(64, 96, 3, 1, 1, rng));
    b3->add("2", basic_conv(96, 96, 3, 1, 1, rng));
    block->add_branch("branch3x3dbl", std::move(b3));

    auto bp = std::make_unique<Sequential>();
    bp->add("pool", std::make_unique<AvgPool2d>(3, 1, 1));
    bp->add("conv", basic_conv(in_c, pool_features, 1, 1, 0, rng));
    block->add_branch("branch_pool", std::move(bp));
    return block;
}

std::unique_ptr<Layer> block_b(int in_c, Rng& rng) {
    auto block = std::make_unique<Fanout>();
    block->add_branch("branch3x3", basic_conv(in_c, 384, 3, 2, 0, rng));

    auto b3 = std::make_unique<Sequential>();
    b3->add("0", basic_conv(in_c, 64, 1, 1, 0, rng));
    b3->add("1", basic_conv(64, 96, 3, 1, 1, rng));
    b3->add("2", basic_conv(96, 96, 3, 2, 0, rng));
    block->add_branch("branch3x3dbl", std::move(b3));

    block->add_branch("branch_pool", std::make_unique<MaxPool2d>(3, 2));
    return block;
}

std::unique_ptr<Layer> block_c(int in_c, int c7, Rng& rng) {
    auto block = std::make_unique<Fanout>();
    block->add_branch("branch1x1", basic_conv(in_c, 192, 1, 1, 0, rng));

    auto b7 = std::make_unique<Sequential>();
    b7->add("0", basic_conv(in_c, c7, 1, 1, 0, rng));
    b7->add("1", basic_conv(c7, c7, 1, 7, 1, 1, 0, 3, rng));
    b7->add("2", basic_conv(c7, 192, 7, 1, 1, 1, 3, 0, rng));
    block->add_branch("branch7x7", std::move(b7));

    auto b7d = std::make_unique<Sequential>();
    b7d->add("0", basic_conv(in_c, c7, 1, 1, 0, rng));
    b7d->add("1", basic_conv(c7, c7, 7, 1, 1, 1, 3, 0, rng));
    b7d->add("2", basic_conv(c7, c7, 1, 7, 1, 1, 0, 3, rng));
    b7d->add("3", basic_conv(c7, c7, 7, 1, 1, 1, 3, 0, rng));
    b7d->add("4", basic_conv(c7, 192, 1, 7, 1, 1, 0, 3, rng));
    block->add_branch("branch7x7dbl", std::move(b7d));

    auto bp = std::make_unique<Sequential>();
    bp->add("pool", std::make_unique<AvgPool2d>(3, 1, 1));
    bp->add("conv", basic_conv(in_c, 192, 1, 1, 0, rng));
    block->add_branch("branch_pool", std::move(bp));
    return block;
}

std::unique_ptr<Layer> block_d(int in_c, Rng& rng) {
    auto block = std::make_unique<Fanout>();

    auto b3 = std::make_unique<Sequential>();
    b3->add("0", basic_conv(in_c, 192, 1, 1, 0, rng));
    b3->add("1", basic_conv(192, 320, 3, 2, 0, rng));
    block->add_branch("branch3x3", std::move(b3));

    auto b7 = std::make_unique<Sequential>();
    b7->add("0", basic_conv(in_c, 192, 1, 1, 0, rng));
    b7->add("1", basic_conv(192, 192, 1, 7, 1, 1, 0, 3, rng));
    b7->add("2", basic_conv(192, 192, 7, 1, 1, 1, 3, 0, rng));
    b7->add("3", basic_conv(192, 192, 3, 2, 0, rng));
    block->add_branch("branch7x7x3", std::move(b7));

    block->add_branch("branch_pool", std::make_unique<MaxPool2d>(3, 2));
    return block;
}

std::unique_ptr<Layer> block_e(int in_c, Rng& rng) {
    auto block = std::make_unique<Fanout>();
    block->add_branch("branch1x1", basic_conv(in_c, 320, 1, 1, 0, rng));

    auto split_pair = [&rng](int c) {
        auto pair = std::make_unique<Fanout>();
        pair->add_branch("a", basic_conv(c, 384, 1, 3, 1, 1, 0, 1, rng));
        pair->add_branch("b", basic_conv(c, 384, 3, 1, 1, 1, 1, 0, rng));
        return pair;
    };

    auto b3 = std::make_unique<Sequential>();
    b3->add("0", basic_conv(in_c, 384, 1, 1, 0, rng));
    b3->add("split", split_pair(384));
    block->add_branch("branch3x3", std::move(b3));

    auto b3d = std::make_unique<Sequential>();
    b3d->add("0", basic_conv(in_c, 448, 1, 1, 0, rng));
    b3d->add("1", basic_conv(448, 384, 3, 1, 1, rng));
    b3d->add("split", split_pair(384));
    block->add_branch("branch3x3dbl", std::move(b3d));

    auto bp = std::make_unique<Sequential>();
    bp->add("pool", std::make_unique<AvgPool2d>(3, 1, 1));
    bp->add("conv", basic_conv(in_c, 192, 1, 1, 0, rng));
    block->add_branch("branch_pool", std::move(bp));
    return block;
}

} // namespace

// Inception-v3 feature stack: stem convolutions followed by the mixed
// blocks 5b-7c; 299x299 input -> (2048, 8, 8).
BackboneNet make_inception_v3_backbone(Rng& rng) {
    auto seq = std::make_unique<Sequential>();
    seq->add("Conv2d_1a_3x3", basic_conv(3, 32, 3, 2, 0, rng));
    seq->add("Conv2d_2a_3x3", basic_conv(32, 32, 3, 1, 0, rng));
    seq->add("Conv2d_2b_3x3", basic_conv(32, 64, 3, 1, 1, rng));
    seq->add("maxpool1", std::make_unique<MaxPool2d>(3, 2));
    seq->add("Conv2d_3b_1x1", basic_conv(64, 80, 1, 1, 0, rng));
    seq->add("Conv2d_4a_3x3", basic_conv(80, 192, 3, 1, 0, rng));
    seq->add("maxpool2", std::make_unique<MaxPool2d>(3, 2));
    seq->add("Mixed_5b", block_a(192, 32, rng));
    seq->add("Mixed_5c", block_a(256, 64, rng));
    seq->add("Mixed_5d", block_a(288, 64, rng));
    seq->add("Mixed_6a", block_b(288, rng));
    seq->add("Mixed_6b", block_c(768, 128, rng));
    seq->add("Mixed_6c", block_c(768, 160, rng));
    seq->add("Mixed_6d", block_c(768, 160, rng));
    seq->add("Mixed_6e", block_c(768, 192, rng));
    seq->add("Mixed_7a", block_d(768, rng));
    seq->add("Mixed_7b", block_e(1280, rng));
    seq->add("Mixed_7c", block_e(2048, rng));

    BackboneNet net;
    net.features = std::move(seq);
    net.feature_channels = 2048;
    return net;
}

} // namespace vsa
