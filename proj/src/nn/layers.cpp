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

#include "vsa/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vsa/errors.hpp"

namespace vsa::nn {

using Mat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<Mat>;
using CMapM = Eigen::Map<const Mat>;

std::string join_name(const std::string& prefix, const std::string& name) {
    if (prefix.empty()) return name;
    if (name.empty()) return prefix;
    return prefix + "." + name;
}

namespace {

void he_normal(Tensor& t, int fan_in, Rng& rng) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (float& v : t.v) v = static_cast<float>(rng.normal(0.0, stddev));
}

int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// col is (C*kh*kw) x (oh*ow), row-major; out-of-bounds taps read as zero.
void im2col(const float* x, int C, int H, int W, int kh, int kw, int sh, int sw, int ph, int pw,
            int oh, int ow, float* col) {
    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    std::size_t r = 0;
    for (int c = 0; c < C; ++c) {
        const float* plane = x + static_cast<std::size_t>(c) * H * W;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++r) {
                float* dst = col + r * ohw;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * sh - ph + ky;
                    float* drow = dst + static_cast<std::size_t>(oy) * ow;
                    if (iy < 0 || iy >= H) {
                        std::fill(drow, drow + ow, 0.0f);
                        continue;
                    }
                    const float* srow = plane + static_cast<std::size_t>(iy) * W;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * sw - pw + kx;
                        drow[ox] = (ix >= 0 && ix < W) ? srow[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

// Scatter-add transpose of im2col.
void col2im(const float* col, int C, int H, int W, int kh, int kw, int sh, int sw, int ph, int pw,
            int oh, int ow, float* dx) {
    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    std::size_t r = 0;
    for (int c = 0; c < C; ++c) {
        float* plane = dx + static_cast<std::size_t>(c) * H * W;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++r) {
                const float* src = col + r * ohw;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * sh - ph + ky;
                    if (iy < 0 || iy >= H) continue;
                    float* drow = plane + static_cast<std::size_t>(iy) * W;
                    const float* srow = src + static_cast<std::size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * sw - pw + kx;
                        if (ix >= 0 && ix < W) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(int in_c, int out_c, int kh, int kw, int stride_h, int stride_w, int pad_h,
               int pad_w, bool bias, Rng& rng)
    : in_c_(in_c), out_c_(out_c), kh_(kh), kw_(kw), sh_(stride_h), sw_(stride_w), ph_(pad_h),
      pw_(pad_w), has_bias_(bias) {
    weight_.init_shape(out_c, in_c, kh, kw);
    he_normal(weight_.value, in_c * kh * kw, rng);
    if (has_bias_) bias_.init_shape(out_c, 1, 1, 1);
}

Tensor Conv2d::forward(const Tensor& x, bool train) {
    if (x.c != in_c_) {
        throw Error("Conv2d: expected " + std::to_string(in_c_) + " input channels, got " +
                    x.shape_str());
    }
    oh_ = conv_out_dim(x.h, kh_, sh_, ph_);
    ow_ = conv_out_dim(x.w, kw_, sw_, pw_);
    if (oh_ < 1 || ow_ < 1) {
        throw Error("Conv2d: input " + x.shape_str() + " too small for kernel");
    }
    const int K = in_c_ * kh_ * kw_;
    const std::size_t ohw = static_cast<std::size_t>(oh_) * ow_;

    Tensor y(x.n, out_c_, oh_, ow_);
    cols_.resize((train ? static_cast<std::size_t>(x.n) : 1) * K * ohw);

    CMapM W(weight_.value.data(), out_c_, K);
    for (int i = 0; i < x.n; ++i) {
        float* col = cols_.data() + (train ? static_cast<std::size_t>(i) * K * ohw : 0);
        im2col(x.sample(i), in_c_, x.h, x.w, kh_, kw_, sh_, sw_, ph_, pw_, oh_, ow_, col);
        MapM out(y.sample(i), out_c_, static_cast<Eigen::Index>(ohw));
        out.noalias() = W * CMapM(col, K, static_cast<Eigen::Index>(ohw));
        if (has_bias_) {
            for (int oc = 0; oc < out_c_; ++oc) out.row(oc).array() += bias_.value.v[oc];
        }
    }

    if (train) {
        input_shape_ref_ = Tensor(x.n, x.c, x.h, x.w);
        cached_ = true;
    } else {
        cached_ = false;
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    if (!cached_) throw Error("Conv2d: backward without cached forward");
    const Tensor& xs = input_shape_ref_;
    const int K = in_c_ * kh_ * kw_;
    const std::size_t ohw = static_cast<std::size_t>(oh_) * ow_;

    Tensor dx(xs.n, xs.c, xs.h, xs.w);
    CMapM W(weight_.value.data(), out_c_, K);
    MapM dW(weight_.grad.data(), out_c_, K);
    Mat dcol(K, static_cast<Eigen::Index>(ohw));

    for (int i = 0; i < xs.n; ++i) {
        CMapM dYn(dy.sample(i), out_c_, static_cast<Eigen::Index>(ohw));
        CMapM coln(cols_.data() + static_cast<std::size_t>(i) * K * ohw, K,
                   static_cast<Eigen::Index>(ohw));
        dW.noalias() += dYn * coln.transpose();
        if (has_bias_) {
            for (int oc = 0; oc < out_c_; ++oc) bias_.grad.v[oc] += dYn.row(oc).sum();
        }
        dcol.noalias() = W.transpose() * dYn;
        col2im(dcol.data(), in_c_, xs.h, xs.w, kh_, kw_, sh_, sw_, ph_, pw_, oh_, ow_,
               dx.sample(i));
    }
    cached_ = false;
    return dx;
}

void Conv2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    out.emplace_back(join_name(prefix, "weight"), &weight_);
    if (has_bias_) out.emplace_back(join_name(prefix, "bias"), &bias_);
}

// ---------------------------------------------------------------------------
// Dense
// ---------------------------------------------------------------------------

Dense::Dense(int in_f, int out_f, Rng& rng, bool zero_init) : in_f_(in_f), out_f_(out_f) {
    weight_.init_shape(out_f, in_f, 1, 1);
    bias_.init_shape(out_f, 1, 1, 1);
    if (!zero_init) he_normal(weight_.value, in_f, rng);
}

Tensor Dense::forward(const Tensor& x, bool train) {
    if (static_cast<int>(x.sample_size()) != in_f_) {
        throw Error("Dense: expected " + std::to_string(in_f_) + " features, got " + x.shape_str());
    }
    Tensor y(x.n, out_f_, 1, 1);
    CMapM X(x.data(), x.n, in_f_);
    CMapM W(weight_.value.data(), out_f_, in_f_);
    MapM Y(y.data(), x.n, out_f_);
    Y.noalias() = X * W.transpose();
    for (int o = 0; o < out_f_; ++o) Y.col(o).array() += bias_.value.v[o];

    if (train) {
        input_ = x;
        cached_ = true;
    } else {
        cached_ = false;
    }
    return y;
}

Tensor Dense::backward(const Tensor& dy) {
    if (!cached_) throw Error("Dense: backward without cached forward");
    const int N = input_.n;
    CMapM dY(dy.data(), N, out_f_);
    CMapM X(input_.data(), N, in_f_);
    CMapM W(weight_.value.data(), out_f_, in_f_);

    MapM dW(weight_.grad.data(), out_f_, in_f_);
    dW.noalias() += dY.transpose() * X;
    for (int o = 0; o < out_f_; ++o) bias_.grad.v[o] += dY.col(o).sum();

    Tensor dx(N, input_.c, input_.h, input_.w);
    MapM dX(dx.data(), N, in_f_);
    dX.noalias() = dY * W;
    cached_ = false;
    return dx;
}

void Dense::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    out.emplace_back(join_name(prefix, "weight"), &weight_);
    out.emplace_back(join_name(prefix, "bias"), &bias_);
}

// ---------------------------------------------------------------------------
// ReLU
// ---------------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x, bool train) {
    Tensor y = x;
    if (train) {
        mask_.assign(x.size(), false);
        for (std::size_t i = 0; i < y.v.size(); ++i) {
            if (y.v[i] > 0.0f) {
                mask_[i] = true;
            } else {
                y.v[i] = 0.0f;
            }
        }
        shape_ref_ = Tensor(x.n, x.c, x.h, x.w);
        cached_ = true;
    } else {
        for (float& v : y.v) v = std::max(v, 0.0f);
        cached_ = false;
    }
    return y;
}

Tensor ReLU::backward(const Tensor& dy) {
    if (!cached_) throw Error("ReLU: backward without cached forward");
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i) {
        if (!mask_[i]) dx.v[i] = 0.0f;
    }
    cached_ = false;
    return dx;
}

// ---------------------------------------------------------------------------
// MaxPool2d
// ---------------------------------------------------------------------------

Tensor MaxPool2d::forward(const Tensor& x, bool train) {
    const int oh = conv_out_dim(x.h, k_, stride_, pad_);
    const int ow = conv_out_dim(x.w, k_, stride_, pad_);
    Tensor y(x.n, x.c, oh, ow);
    if (train) argmax_.assign(y.size(), std::numeric_limits<std::size_t>::max());

    std::size_t oi = 0;
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    float best = -std::numeric_limits<float>::infinity();
                    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
                    for (int ky = 0; ky < k_; ++ky) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix < 0 || ix >= x.w) continue;
                            const std::size_t idx =
                                ((static_cast<std::size_t>(n) * x.c + c) * x.h + iy) * x.w + ix;
                            if (x.v[idx] > best) {
                                best = x.v[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    y.v[oi] = best_idx == std::numeric_limits<std::size_t>::max() ? 0.0f : best;
                    if (train) argmax_[oi] = best_idx;
                }
            }
        }
    }
    if (train) {
        input_shape_ref_ = Tensor(x.n, x.c, x.h, x.w);
        cached_ = true;
    } else {
        cached_ = false;
    }
    return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
    if (!cached_) throw Error("MaxPool2d: backward without cached forward");
    Tensor dx = Tensor::like(input_shape_ref_);
    for (std::size_t oi = 0; oi < dy.v.size(); ++oi) {
        if (argmax_[oi] != std::numeric_limits<std::size_t>::max()) {
            dx.v[argmax_[oi]] += dy.v[oi];
        }
    }
    cached_ = false;
    return dx;
}

// ---------------------------------------------------------------------------
// AvgPool2d (padding counted in the divisor)
// ---------------------------------------------------------------------------

Tensor AvgPool2d::forward(const Tensor& x, bool train) {
    const int oh = conv_out_dim(x.h, k_, stride_, pad_);
    const int ow = conv_out_dim(x.w, k_, stride_, pad_);
    Tensor y(x.n, x.c, oh, ow);
    const float inv_area = 1.0f / static_cast<float>(k_ * k_);

    std::size_t oi = 0;
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            const float* plane = x.data() + (static_cast<std::size_t>(n) * x.c + c) * x.plane();
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    float sum = 0.0f;
                    for (int ky = 0; ky < k_; ++ky) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix >= 0 && ix < x.w) {
                                sum += plane[static_cast<std::size_t>(iy) * x.w + ix];
                            }
                        }
                    }
                    y.v[oi] = sum * inv_area;
                }
            }
        }
    }
    if (train) {
        input_shape_ref_ = Tensor(x.n, x.c, x.h, x.w);
        cached_ = true;
    } else {
        cached_ = false;
    }
    return y;
}

Tensor AvgPool2d::backward(const Tensor& dy) {
    if (!cached_) throw Error("AvgPool2d: backward without cached forward");
    const Tensor& xs = input_shape_ref_;
    Tensor dx = Tensor::like(xs);
    const int oh = dy.h, ow = dy.w;
    const float inv_area = 1.0f / static_cast<float>(k_ * k_);

    std::size_t oi = 0;
    for (int n = 0; n < xs.n; ++n) {
        for (int c = 0; c < xs.c; ++c) {
            float* plane = dx.data() + (static_cast<std::size_t>(n) * xs.c + c) * xs.plane();
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    const float g = dy.v[oi] * inv_area;
                    for (int ky = 0; ky < k_; ++ky) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= xs.h) continue;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix >= 0 && ix < xs.w) {
                                plane[static_cast<std::size_t>(iy) * xs.w + ix] += g;
                            }
                        }
                    }
                }
            }
        }
    }
    cached_ = false;
    return dx;
}

// ---------------------------------------------------------------------------
// GlobalAvgPool
// ---------------------------------------------------------------------------

Tensor GlobalAvgPool::forward(const Tensor& x, bool train) {
    Tensor y(x.n, x.c, 1, 1);
    const float inv = 1.0f / static_cast<float>(x.plane());
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            const float* plane = x.data() + (static_cast<std::size_t>(n) * x.c + c) * x.plane();
            double sum = 0.0;
            for (std::size_t i = 0; i < x.plane(); ++i) sum += plane[i];
            y.at(n, c, 0, 0) = static_cast<float>(sum) * inv;
        }
    }
    if (train) {
        input_shape_ref_ = Tensor(x.n, x.c, x.h, x.w);
        cached_ = true;
    } else {
        cached_ = false;
    }
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy) {
    if (!cached_) throw Error("GlobalAvgPool: backward without cached forward");
    const Tensor& xs = input_shape_ref_;
    Tensor dx = Tensor::like(xs);
    const float inv = 1.0f / static_cast<float>(xs.plane());
    for (int n = 0; n < xs.n; ++n) {
        for (int c = 0; c < xs.c; ++c) {
            float* plane = dx.data() + (static_cast<std::size_t>(n) * xs.c + c) * xs.plane();
            const float g = dy.at(n, c, 0, 0) * inv;
            for (std::size_t i = 0; i < xs.plane(); ++i) plane[i] = g;
        }
    }
    cached_ = false;
    return dx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d
// ---------------------------------------------------------------------------

BatchNorm2d::BatchNorm2d(int channels, float eps, float momentum)
    : channels_(channels), eps_(eps), momentum_(momentum) {
    gamma_.init_shape(channels, 1, 1, 1);
    gamma_.value.fill(1.0f);
    beta_.init_shape(channels, 1, 1, 1);
    running_mean_ = Tensor(channels, 1, 1, 1);
    running_var_ = Tensor(channels, 1, 1, 1);
    running_var_.fill(1.0f);
}

Tensor BatchNorm2d::forward(const Tensor& x, bool train) {
    if (x.c != channels_) {
        throw Error("BatchNorm2d: expected " + std::to_string(channels_) + " channels, got " +
                    x.shape_str());
    }
    Tensor y = Tensor::like(x);
    const std::size_t plane = x.plane();
    const std::size_t m = static_cast<std::size_t>(x.n) * plane;

    if (!train) {
        for (int c = 0; c < channels_; ++c) {
            const float mean = running_mean_.v[c];
            const float inv_std = 1.0f / std::sqrt(running_var_.v[c] + eps_);
            const float g = gamma_.value.v[c], b = beta_.value.v[c];
            for (int n = 0; n < x.n; ++n) {
                const float* src = x.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
                float* dst = y.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) dst[i] = g * (src[i] - mean) * inv_std + b;
            }
        }
        cached_ = false;
        return y;
    }

    xhat_ = Tensor::like(x);
    inv_std_.assign(channels_, 0.0f);
    for (int c = 0; c < channels_; ++c) {
        double sum = 0.0, sq = 0.0;
        for (int n = 0; n < x.n; ++n) {
            const float* src = x.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum += src[i];
                sq += static_cast<double>(src[i]) * src[i];
            }
        }
        const double mean = sum / static_cast<double>(m);
        const double var = std::max(sq / static_cast<double>(m) - mean * mean, 0.0);
        const float inv_std = static_cast<float>(1.0 / std::sqrt(var + eps_));
        inv_std_[c] = inv_std;

        const float g = gamma_.value.v[c], b = beta_.value.v[c];
        for (int n = 0; n < x.n; ++n) {
            const float* src = x.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
            float* xh = xhat_.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
            float* dst = y.data() + (static_cast<std::size_t>(n) * x.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                xh[i] = (src[i] - static_cast<float>(mean)) * inv_std;
                dst[i] = g * xh[i] + b;
            }
        }

        const double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1)
                                      : var;
        running_mean_.v[c] =
            (1.0f - momentum_) * running_mean_.v[c] + momentum_ * static_cast<float>(mean);
        running_var_.v[c] =
            (1.0f - momentum_) * running_var_.v[c] + momentum_ * static_cast<float>(unbiased);
    }
    cached_ = true;
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    if (!cached_) throw Error("BatchNorm2d: backward without cached forward");
    const std::size_t plane = dy.plane();
    const double m = static_cast<double>(dy.n) * plane;
    Tensor dx = Tensor::like(dy);

    for (int c = 0; c < channels_; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < dy.n; ++n) {
            const float* g = dy.data() + (static_cast<std::size_t>(n) * dy.c + c) * plane;
            const float* xh = xhat_.data() + (static_cast<std::size_t>(n) * dy.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += g[i];
                sum_dy_xhat += static_cast<double>(g[i]) * xh[i];
            }
        }
        gamma_.grad.v[c] += static_cast<float>(sum_dy_xhat);
        beta_.grad.v[c] += static_cast<float>(sum_dy);

        const double scale = gamma_.value.v[c] * inv_std_[c] / m;
        for (int n = 0; n < dy.n; ++n) {
            const float* g = dy.data() + (static_cast<std::size_t>(n) * dy.c + c) * plane;
            const float* xh = xhat_.data() + (static_cast<std::size_t>(n) * dy.c + c) * plane;
            float* out = dx.data() + (static_cast<std::size_t>(n) * dy.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                out[i] = static_cast<float>(scale * (m * g[i] - sum_dy - xh[i] * sum_dy_xhat));
            }
        }
    }
    cached_ = false;
    return dx;
}

void BatchNorm2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    out.emplace_back(join_name(prefix, "gamma"), &gamma_);
    out.emplace_back(join_name(prefix, "beta"), &beta_);
}

void BatchNorm2d::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
    out.emplace_back(join_name(prefix, "running_mean"), &running_mean_);
    out.emplace_back(join_name(prefix, "running_var"), &running_var_);
}

// ---------------------------------------------------------------------------
// Sequential
// ---------------------------------------------------------------------------

void Sequential::add(const std::string& name, std::unique_ptr<Layer> layer) {
    layers_.emplace_back(name, std::move(layer));
}

Tensor Sequential::forward(const Tensor& x, bool train) {
    Tensor cur = x;
    for (auto& [name, layer] : layers_) cur = layer->forward(cur, train);
    return cur;
}

Tensor Sequential::backward(const Tensor& dy) {
    Tensor cur = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = it->second->backward(cur);
    return cur;
}

void Sequential::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    for (auto& [name, layer] : layers_) layer->collect_params(join_name(prefix, name), out);
}

void Sequential::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
    for (auto& [name, layer] : layers_) layer->collect_buffers(join_name(prefix, name), out);
}

// ---------------------------------------------------------------------------
// Fanout
// ---------------------------------------------------------------------------

void Fanout::add_branch(const std::string& name, std::unique_ptr<Layer> branch) {
    branches_.emplace_back(name, std::move(branch));
}

Tensor Fanout::forward(const Tensor& x, bool train) {
    std::vector<Tensor> outs;
    outs.reserve(branches_.size());
    out_channels_.clear();
    for (auto& [name, branch] : branches_) {
        outs.push_back(branch->forward(x, train));
        out_channels_.push_back(outs.back().c);
    }
    return concat_channels(outs);
}

Tensor Fanout::backward(const Tensor& dy) {
    const std::vector<Tensor> slices = split_channels(dy, out_channels_);
    Tensor dx;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        Tensor part = branches_[i].second->backward(slices[i]);
        if (dx.size() == 0) {
            dx = std::move(part);
        } else {
            for (std::size_t k = 0; k < dx.v.size(); ++k) dx.v[k] += part.v[k];
        }
    }
    return dx;
}

void Fanout::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    for (auto& [name, branch] : branches_) {
        branch->collect_params(join_name(prefix, name), out);
    }
}

void Fanout::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
    for (auto& [name, branch] : branches_) {
        branch->collect_buffers(join_name(prefix, name), out);
    }
}

// ---------------------------------------------------------------------------
// Channel concat/split helpers
// ---------------------------------------------------------------------------

Tensor concat_channels(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw Error("concat_channels: no inputs");
    int total_c = 0;
    for (const Tensor& p : parts) {
        if (p.n != parts[0].n || p.h != parts[0].h || p.w != parts[0].w) {
            throw Error("concat_channels: mismatched shapes " + p.shape_str() + " vs " +
                        parts[0].shape_str());
        }
        total_c += p.c;
    }
    Tensor out(parts[0].n, total_c, parts[0].h, parts[0].w);
    for (int n = 0; n < out.n; ++n) {
        std::size_t offset = 0;
        for (const Tensor& p : parts) {
            const float* src = p.data() + static_cast<std::size_t>(n) * p.sample_size();
            float* dst = out.sample(n) + offset;
            std::copy(src, src + p.sample_size(), dst);
            offset += p.sample_size();
        }
    }
    return out;
}

std::vector<Tensor> split_channels(const Tensor& x, const std::vector<int>& channel_sizes) {
    int total = 0;
    for (int c : channel_sizes) total += c;
    if (total != x.c) throw Error("split_channels: sizes do not sum to channel count");

    std::vector<Tensor> parts;
    parts.reserve(channel_sizes.size());
    for (int c : channel_sizes) parts.emplace_back(x.n, c, x.h, x.w);
    for (int n = 0; n < x.n; ++n) {
        const float* src = x.sample(n);
        for (Tensor& p : parts) {
            float* dst = p.data() + static_cast<std::size_t>(n) * p.sample_size();
            std::copy(src, src + p.sample_size(), dst);
            src += p.sample_size();
        }
    }
    return parts;
}

} // namespace vsa::nn
