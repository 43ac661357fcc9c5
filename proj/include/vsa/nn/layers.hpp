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
#include <string>
#include <utility>
#include <vector>

#include "vsa/nn/tensor.hpp"
#include "vsa/rng.hpp"

namespace vsa::nn {

struct Param {
    Tensor value;
    Tensor grad;

    void init_shape(int n, int c, int h, int w) {
        value = Tensor(n, c, h, w);
        grad = Tensor(n, c, h, w);
    }
    void zero_grad() { grad.fill(0.0f); }
};

using ParamRef = std::pair<std::string, Param*>;
using BufferRef = std::pair<std::string, Tensor*>;

// Single-input single-output differentiable layer. forward(x, train=true)
// caches whatever backward needs; backward consumes the cache, accumulates
// parameter gradients with += and returns d loss / d input.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, bool train) = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
        (void)prefix;
        (void)out;
    }
    virtual void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
        (void)prefix;
        (void)out;
    }
};

std::string join_name(const std::string& prefix, const std::string& name);

class Conv2d : public Layer {
public:
    Conv2d(int in_c, int out_c, int kh, int kw, int stride_h, int stride_w, int pad_h, int pad_w,
           bool bias, Rng& rng);
    // Square kernel, symmetric stride/padding.
    Conv2d(int in_c, int out_c, int k, int stride, int pad, bool bias, Rng& rng)
        : Conv2d(in_c, out_c, k, k, stride, stride, pad, pad, bias, rng) {}

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

    int out_channels() const { return out_c_; }

private:
    int in_c_, out_c_, kh_, kw_, sh_, sw_, ph_, pw_;
    bool has_bias_;
    Param weight_; // (out_c, in_c, kh, kw)
    Param bias_;   // (out_c, 1, 1, 1)
    // training cache
    Tensor input_shape_ref_;            // shape only
    std::vector<float> cols_;           // per-sample im2col blocks
    int oh_ = 0, ow_ = 0;
    bool cached_ = false;
};

class Dense : public Layer {
public:
    Dense(int in_f, int out_f, Rng& rng, bool zero_init = false);

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

    int in_features() const { return in_f_; }
    int out_features() const { return out_f_; }

private:
    int in_f_, out_f_;
    Param weight_; // (out_f, in_f, 1, 1)
    Param bias_;   // (out_f, 1, 1, 1)
    Tensor input_;
    bool cached_ = false;
};

class ReLU : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;

private:
    std::vector<bool> mask_;
    Tensor shape_ref_;
    bool cached_ = false;
};

class MaxPool2d : public Layer {
public:
    MaxPool2d(int k, int stride, int pad = 0) : k_(k), stride_(stride), pad_(pad) {}

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;

private:
    int k_, stride_, pad_;
    std::vector<std::size_t> argmax_;
    Tensor input_shape_ref_;
    bool cached_ = false;
};

class AvgPool2d : public Layer {
public:
    AvgPool2d(int k, int stride, int pad = 0) : k_(k), stride_(stride), pad_(pad) {}

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;

private:
    int k_, stride_, pad_;
    Tensor input_shape_ref_;
    bool cached_ = false;
};

class GlobalAvgPool : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor input_shape_ref_;
    bool cached_ = false;
};

// Channel-wise batch normalization. Training mode normalizes by batch
// statistics and maintains running estimates; eval mode uses the running
// estimates only.
class BatchNorm2d : public Layer {
public:
    explicit BatchNorm2d(int channels, float eps = 1e-3f, float momentum = 0.1f);

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
    void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

private:
    int channels_;
    float eps_, momentum_;
    Param gamma_, beta_;
    Tensor running_mean_, running_var_;
    // training cache
    Tensor xhat_;
    std::vector<float> inv_std_;
    bool cached_ = false;
};

class Sequential : public Layer {
public:
    void add(const std::string& name, std::unique_ptr<Layer> layer);
    bool empty() const { return layers_.empty(); }

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
    void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

private:
    std::vector<std::pair<std::string, std::unique_ptr<Layer>>> layers_;
};

// Parallel branches over a shared input, concatenated along channels; the
// input gradient is the sum of the branch gradients. Branch outputs must
// agree on batch and spatial dimensions.
class Fanout : public Layer {
public:
    void add_branch(const std::string& name, std::unique_ptr<Layer> branch);

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
    void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

private:
    std::vector<std::pair<std::string, std::unique_ptr<Layer>>> branches_;
    std::vector<int> out_channels_;
};

// Helpers for composite blocks with parallel branches.
Tensor concat_channels(const std::vector<Tensor>& parts);
std::vector<Tensor> split_channels(const Tensor& x, const std::vector<int>& channel_sizes);

} // namespace vsa::nn
