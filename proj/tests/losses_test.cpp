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

#include <doctest.h>

#include <cmath>

#include "support/oracle.hpp"
#include "vsa/errors.hpp"
#include "vsa/losses.hpp"
#include "vsa/rng.hpp"

using namespace vsa;

TEST_CASE("sigmoid CE at zero logits is ln 2") {
    const std::vector<double> logits{0.0, 0.0};
    const std::vector<double> target{1.0, 0.0};
    CHECK(sigmoid_cross_entropy(logits, target) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("uniform-logits softmax CE is ln(num_classes)") {
    for (int k = 2; k <= 11; ++k) {
        std::vector<double> logits(static_cast<std::size_t>(k), 0.7);
        std::vector<double> target(static_cast<std::size_t>(k), 0.0);
        target[static_cast<std::size_t>(k / 2)] = 1.0;
        CHECK(softmax_cross_entropy(logits, target) ==
              doctest::Approx(std::log(static_cast<double>(k))).epsilon(1e-9));
    }
}

TEST_CASE("sigmoid CE matches the scalar per-component oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(11);
        std::vector<double> logits(n), target(n);
        for (std::size_t i = 0; i < n; ++i) {
            logits[i] = rng.normal(0.0, 3.0);
            target[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        const double expected = vsa::testing::oracle_sigmoid_ce_mean(logits, target);
        CHECK(sigmoid_cross_entropy(logits, target) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("analytic loss gradients match central finite differences") {
    Rng rng(32);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5;
        std::vector<double> logits(n), one_hot(n, 0.0), multi(n);
        for (std::size_t i = 0; i < n; ++i) {
            logits[i] = rng.normal(0.0, 2.0);
            multi[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        one_hot[rng.uniform_index(n)] = 1.0;

        for (HeadMode mode : {HeadMode::softmax, HeadMode::sigmoid}) {
            const std::vector<double>& target = mode == HeadMode::softmax ? one_hot : multi;
            const std::vector<double> grad = loss_gradient(mode, logits, target);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> lo = logits, hi = logits;
                lo[i] -= h;
                hi[i] += h;
                const double numeric = (loss(mode, hi, target) - loss(mode, lo, target)) / (2 * h);
                const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
                CHECK(std::abs(grad[i] - numeric) / denom < 1e-4);
            }
        }
    }
}

TEST_CASE("loss validation errors") {
    const std::vector<double> logits{0.0, 1.0, 2.0};
    SUBCASE("length mismatch") {
        const std::vector<double> target{1.0, 0.0};
        CHECK_THROWS_AS(loss(HeadMode::sigmoid, logits, target), InputError);
    }
    SUBCASE("target outside {0,1}") {
        const std::vector<double> target{0.5, 0.0, 0.5};
        CHECK_THROWS_AS(loss(HeadMode::sigmoid, logits, target), InputError);
    }
    SUBCASE("softmax requires one-hot") {
        const std::vector<double> two_hot{1.0, 1.0, 0.0};
        CHECK_THROWS_AS(loss(HeadMode::softmax, logits, two_hot), InputError);
        CHECK_THROWS_AS(loss_gradient(HeadMode::softmax, logits, two_hot), InputError);
        const std::vector<double> all_zero{0.0, 0.0, 0.0};
        CHECK_THROWS_AS(loss(HeadMode::softmax, logits, all_zero), InputError);
    }
    SUBCASE("empty vectors") {
        const std::vector<double> empty;
        CHECK_THROWS_AS(loss(HeadMode::sigmoid, empty, empty), InputError);
    }
}

TEST_CASE("loss is non-negative and vanishes on saturated correct logits") {
    Rng rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(9);
        std::vector<double> logits(n), target(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) logits[i] = rng.normal(0.0, 4.0);
        target[rng.uniform_index(n)] = 1.0;
        CHECK(loss(HeadMode::softmax, logits, target) >= 0.0);
        CHECK(loss(HeadMode::sigmoid, logits, target) >= 0.0);
    }

    // Logits of +-20 matching the target saturate both losses to ~0.
    std::vector<double> saturated{20.0, -20.0, -20.0};
    std::vector<double> target{1.0, 0.0, 0.0};
    CHECK(loss(HeadMode::softmax, saturated, target) < 1e-8);
    CHECK(loss(HeadMode::sigmoid, saturated, target) < 1e-8);
}

TEST_CASE("sigmoid component independence") {
    const std::vector<double> base{0.3, -1.2, 2.0, 0.0};
    std::vector<double> scores_base;
    for (double z : base) scores_base.push_back(sigmoid(z));
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::vector<double> perturbed = base;
        perturbed[i] += 0.7;
        for (std::size_t k = 0; k < base.size(); ++k) {
            const double s = sigmoid(perturbed[k]);
            if (k == i) {
                CHECK(s != scores_base[k]);
            } else {
                CHECK(s == scores_base[k]);
            }
        }
    }
}
