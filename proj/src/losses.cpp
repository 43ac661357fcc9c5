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

#include "vsa/losses.hpp"

#include <algorithm>
#include <cmath>

#include "vsa/errors.hpp"
#include "vsa/manifest.hpp"

namespace vsa {

HeadMode parse_head_mode(const std::string& s) {
    const std::string t = to_lower(trim(s));
    if (t == "softmax") return HeadMode::softmax;
    if (t == "sigmoid") return HeadMode::sigmoid;
    throw InputError("unknown head mode '" + s + "' (expected softmax or sigmoid)");
}

std::string to_string(HeadMode mode) {
    return mode == HeadMode::softmax ? "softmax" : "sigmoid";
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void validate_pair(std::span<const double> logits, std::span<const double> target) {
    if (logits.empty()) {
        throw InputError("loss: empty logits vector");
    }
    if (logits.size() != target.size()) {
        throw InputError("loss: logits length " + std::to_string(logits.size()) +
                         " does not match target length " + std::to_string(target.size()));
    }
    for (double t : target) {
        if (t != 0.0 && t != 1.0) {
            throw InputError("loss: target entries must be 0 or 1");
        }
    }
}

double logsumexp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

// Stable -[y ln s(z) + (1-y) ln(1-s(z))] = max(z,0) - z y + ln(1 + e^-|z|).
double binary_ce_from_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

} // namespace

double softmax_cross_entropy(std::span<const double> logits, std::span<const double> target) {
    validate_pair(logits, target);
    double ones = 0.0;
    double picked = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] == 1.0) {
            ones += 1.0;
            picked = logits[i];
        }
    }
    if (ones != 1.0) {
        throw InputError("softmax cross-entropy requires a one-hot target");
    }
    return logsumexp(logits) - picked;
}

double sigmoid_cross_entropy(std::span<const double> logits, std::span<const double> target) {
    validate_pair(logits, target);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        sum += binary_ce_from_logit(logits[i], target[i]);
    }
    return sum / static_cast<double>(logits.size());
}

double loss(HeadMode mode, std::span<const double> logits, std::span<const double> target) {
    return mode == HeadMode::softmax ? softmax_cross_entropy(logits, target)
                                     : sigmoid_cross_entropy(logits, target);
}

std::vector<double> loss_gradient(HeadMode mode, std::span<const double> logits,
                                  std::span<const double> target) {
    validate_pair(logits, target);
    std::vector<double> grad(logits.size());
    if (mode == HeadMode::softmax) {
        double ones = 0.0;
        for (double t : target) ones += t;
        if (ones != 1.0) {
            throw InputError("softmax cross-entropy requires a one-hot target");
        }
        const std::vector<double> p = softmax(logits);
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = p[i] - target[i];
    } else {
        const double inv_n = 1.0 / static_cast<double>(logits.size());
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] = (sigmoid(logits[i]) - target[i]) * inv_n;
        }
    }
    return grad;
}

} // namespace vsa
