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

#include <span>
#include <string>
#include <vector>

namespace vsa {

enum class HeadMode { softmax, sigmoid };

HeadMode parse_head_mode(const std::string& s);
std::string to_string(HeadMode mode);

// Numerically stable activations applied to logits.
std::vector<double> softmax(std::span<const double> logits);
double sigmoid(double z);

// Categorical cross-entropy from logits. Target must be one-hot.
double softmax_cross_entropy(std::span<const double> logits, std::span<const double> target);

// Binary cross-entropy applied independently per component, reduced by the
// mean so magnitudes are comparable across label-set sizes. Target entries
// must be 0 or 1; any number of ones is allowed.
double sigmoid_cross_entropy(std::span<const double> logits, std::span<const double> target);

// Dispatcher with full input validation (length match, {0,1} targets,
// one-hot requirement in softmax mode).
double loss(HeadMode mode, std::span<const double> logits, std::span<const double> target);

// Analytic d loss / d logits for the matching loss.
std::vector<double> loss_gradient(HeadMode mode, std::span<const double> logits,
                                  std::span<const double> target);

} // namespace vsa
