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

#include "vsa/nn/optim.hpp"

#include <cmath>

namespace vsa::nn {

Adam::Adam(std::vector<Param*> params, const AdamOptions& opts)
    : params_(std::move(params)), opts_(opts) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Param* p : params_) {
        m_.emplace_back(p->value.size(), 0.0f);
        v_.emplace_back(p->value.size(), 0.0f);
    }
}

void Adam::zero_grad() {
    for (Param* p : params_) p->zero_grad();
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params_.size(); ++p) {
        float* w = params_[p]->value.data();
        const float* g = params_[p]->grad.data();
        float* m = m_[p].data();
        float* v = v_[p].data();
        const std::size_t n = params_[p]->value.size();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = static_cast<float>(opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g[i]);
            v[i] = static_cast<float>(opts_.beta2 * v[i] +
                                      (1.0 - opts_.beta2) * static_cast<double>(g[i]) * g[i]);
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= static_cast<float>(opts_.learning_rate * mhat / (std::sqrt(vhat) + opts_.eps));
        }
    }
}

} // namespace vsa::nn
