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

// Brute-force reference implementations the test suites check the library
// against. Deliberately written from scratch on plain string sets; nothing
// here shares code with the implementation under test.

#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace vsa::testing {

// Per-label one-vs-rest confusion counting over name sets, F1 weighted by
// ground-truth support.
inline double oracle_weighted_f1(const std::vector<std::set<std::string>>& truth,
                                 const std::vector<std::set<std::string>>& preds,
                                 const std::vector<std::string>& vocab) {
    double weighted_sum = 0.0;
    long long total_support = 0;
    for (const std::string& label : vocab) {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool t = truth[i].count(label) > 0;
            const bool p = preds[i].count(label) > 0;
            if (t && p) ++tp;
            if (!t && p) ++fp;
            if (t && !p) ++fn;
        }
        const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        weighted_sum += f1 * static_cast<double>(tp + fn);
        total_support += tp + fn;
    }
    return total_support > 0 ? weighted_sum / static_cast<double>(total_support) : 0.0;
}

// One component at a time, textbook formula; the implementation under test
// uses the numerically stable form and mean reduction.
inline double oracle_sigmoid_ce_mean(const std::vector<double>& logits,
                                     const std::vector<double>& targets) {
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-logits[i]));
        sum += -(targets[i] * std::log(s) + (1.0 - targets[i]) * std::log(1.0 - s));
    }
    return sum / static_cast<double>(logits.size());
}

} // namespace vsa::testing
