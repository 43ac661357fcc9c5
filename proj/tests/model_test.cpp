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
#include <functional>
#include <numeric>

#include "support/fixtures.hpp"
#include "vsa/errors.hpp"
#include "vsa/model.hpp"
#include "vsa/nn/optim.hpp"
#include "vsa/rng.hpp"

using namespace vsa;
using vsa::testing::TempDir;

namespace {

nn::Tensor random_tensor(Rng& rng, int n, int c, int h, int w) {
    nn::Tensor t(n, c, h, w);
    for (float& v : t.v) v = static_cast<float>(rng.normal(0.0, 1.0));
    return t;
}

double dot(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

// Directional derivative of f along dir, by central differences on the
// buffer x (restored afterwards).
double numeric_directional(const std::function<double()>& f, std::vector<float>& x,
                           const std::vector<float>& dir, float h) {
    const std::vector<float> saved = x;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] + h * dir[i];
    const double fp = f();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] - h * dir[i];
    const double fm = f();
    x = saved;
    return (fp - fm) / (2.0 * static_cast<double>(h));
}

// Checks d(coef . layer(x))/dx and every parameter gradient against central
// finite differences along random directions.
void check_layer_gradients(nn::Layer& layer, nn::Tensor x, Rng& rng, double tol = 2e-2) {
    nn::Tensor probe = layer.forward(x, true);
    nn::Tensor coef = nn::Tensor::like(probe);
    for (float& v : coef.v) v = static_cast<float>(rng.normal(0.0, 1.0));

    const auto f = [&]() {
        nn::Tensor y = layer.forward(x, true);
        double s = 0.0;
        for (std::size_t i = 0; i < y.v.size(); ++i) s += static_cast<double>(coef.v[i]) * y.v[i];
        return s;
    };

    std::vector<nn::ParamRef> params;
    layer.collect_params("p", params);
    for (const auto& [name, p] : params) p->zero_grad();
    layer.forward(x, true);
    const nn::Tensor dx = layer.backward(coef);

    // Input direction.
    std::vector<float> dir(x.v.size());
    for (float& v : dir) v = static_cast<float>(rng.normal(0.0, 1.0));
    const double analytic_x = dot(dx.v, dir);
    const double numeric_x = numeric_directional(f, x.v, dir, 1e-2f);
    CHECK(std::abs(analytic_x - numeric_x) <=
          tol * std::max({std::abs(analytic_x), std::abs(numeric_x), 1.0}));

    // Parameter directions.
    for (const auto& [name, p] : params) {
        std::vector<float> pdir(p->value.size());
        for (float& v : pdir) v = static_cast<float>(rng.normal(0.0, 1.0));
        const double analytic_p = dot(p->grad.v, pdir);
        const double numeric_p = numeric_directional(f, p->value.v, pdir, 1e-2f);
        INFO("param ", name);
        CHECK(std::abs(analytic_p - numeric_p) <=
              tol * std::max({std::abs(analytic_p), std::abs(numeric_p), 1.0}));
    }
}

} // namespace

TEST_CASE("layer backward passes match finite differences") {
    Rng rng(404);

    SUBCASE("Conv2d, padded and strided") {
        nn::Conv2d conv(3, 4, 3, 3, 2, 2, 1, 1, true, rng);
        check_layer_gradients(conv, random_tensor(rng, 2, 3, 7, 7), rng);
    }
    SUBCASE("Conv2d, asymmetric kernel") {
        nn::Conv2d conv(2, 3, 1, 5, 1, 1, 0, 2, false, rng);
        check_layer_gradients(conv, random_tensor(rng, 2, 2, 5, 6), rng);
    }
    SUBCASE("Dense") {
        nn::Dense dense(12, 5, rng);
        check_layer_gradients(dense, random_tensor(rng, 3, 12, 1, 1), rng);
    }
    SUBCASE("ReLU") {
        nn::ReLU relu;
        check_layer_gradients(relu, random_tensor(rng, 2, 3, 4, 4), rng);
    }
    SUBCASE("MaxPool2d") {
        nn::MaxPool2d pool(2, 2);
        check_layer_gradients(pool, random_tensor(rng, 2, 2, 6, 6), rng);
    }
    SUBCASE("AvgPool2d with padding") {
        nn::AvgPool2d pool(3, 1, 1);
        check_layer_gradients(pool, random_tensor(rng, 2, 2, 5, 5), rng);
    }
    SUBCASE("GlobalAvgPool") {
        nn::GlobalAvgPool gap;
        check_layer_gradients(gap, random_tensor(rng, 2, 4, 5, 5), rng);
    }
    SUBCASE("BatchNorm2d") {
        nn::BatchNorm2d bn(3, 1e-3f, 0.0f); // zero momentum keeps forward repeatable
        check_layer_gradients(bn, random_tensor(rng, 4, 3, 3, 3), rng);
    }
    SUBCASE("Fanout of mixed branches") {
        // Smooth branches only; the piecewise-linear layers are covered above
        // and would inject kink noise into the finite differences here.
        auto fan = std::make_unique<nn::Fanout>();
        fan->add_branch("b1x1", std::make_unique<nn::Conv2d>(3, 2, 1, 1, 0, true, rng));
        auto deep = std::make_unique<nn::Sequential>();
        deep->add("0", std::make_unique<nn::Conv2d>(3, 4, 3, 1, 1, true, rng));
        deep->add("1", std::make_unique<nn::Conv2d>(4, 2, 1, 1, 0, false, rng));
        fan->add_branch("b3x3", std::move(deep));
        fan->add_branch("bpool", std::make_unique<nn::AvgPool2d>(3, 1, 1));
        check_layer_gradients(*fan, random_tensor(rng, 2, 3, 6, 6), rng);
    }
}

TEST_CASE("toy model emits valid score vectors") {
    Rng rng(11);

    SUBCASE("softmax head: rows sum to one") {
        ModelConfig cfg;
        cfg.backbone = Backbone::toy;
        cfg.head_mode = HeadMode::softmax;
        cfg.num_outputs = 3;
        Model model(cfg, 1);
        for (int batch : {1, 2, 3}) {
            const auto scores = model.forward_scores(random_tensor(rng, batch, 3, 64, 64));
            REQUIRE(static_cast<int>(scores.size()) == batch);
            for (const auto& row : scores) {
                REQUIRE(row.size() == 3);
                const double sum = std::accumulate(row.begin(), row.end(), 0.0);
                CHECK(std::abs(sum - 1.0) < 1e-5);
                for (double s : row) CHECK(s >= 0.0);
            }
        }
    }
    SUBCASE("sigmoid head: each score in [0,1], no sum constraint") {
        ModelConfig cfg;
        cfg.backbone = Backbone::toy;
        cfg.head_mode = HeadMode::sigmoid;
        cfg.num_outputs = 11;
        Model model(cfg, 2);
        const auto scores = model.forward_scores(random_tensor(rng, 2, 3, 64, 64));
        for (const auto& row : scores) {
            REQUIRE(row.size() == 11);
            for (double s : row) {
                CHECK(s >= 0.0);
                CHECK(s <= 1.0);
            }
        }
    }
    SUBCASE("wrong input shape is rejected") {
        ModelConfig cfg;
        cfg.backbone = Backbone::toy;
        cfg.num_outputs = 3;
        Model model(cfg, 3);
        CHECK_THROWS_AS(model.forward_scores(random_tensor(rng, 1, 3, 32, 32)), InputError);
    }
}

TEST_CASE("trainable parameter selection") {
    ModelConfig cfg;
    cfg.backbone = Backbone::toy;
    cfg.head_mode = HeadMode::softmax;
    cfg.num_outputs = 3;
    cfg.head_hidden_units = 0; // plain linear head on the 64 pooled features
    Model model(cfg, 7);

    SUBCASE("freeze selects only the head") {
        const auto head_only = model.trainable_parameters(true);
        std::size_t scalars = 0;
        for (const auto& [name, p] : head_only) {
            CHECK(name.rfind("head.", 0) == 0);
            scalars += p->value.size();
        }
        CHECK(scalars == (64 + 1) * 3);
    }
    SUBCASE("unfrozen selects everything") {
        CHECK(model.trainable_parameters(false).size() == model.parameters().size());
    }
}

TEST_CASE("frozen backbone stays fixed through an optimizer step") {
    Rng rng(21);
    for (bool freeze : {true, false}) {
        ModelConfig cfg;
        cfg.backbone = Backbone::toy;
        cfg.head_mode = HeadMode::softmax;
        cfg.num_outputs = 3;
        cfg.freeze_backbone = freeze;
        Model model(cfg, 5);

        std::vector<std::vector<float>> backbone_before;
        for (const auto& [name, p] : model.parameters()) {
            if (name.rfind("backbone.", 0) == 0) backbone_before.push_back(p->value.v);
        }

        std::vector<nn::Param*> trainable;
        for (const auto& [name, p] : model.trainable_parameters()) trainable.push_back(p);
        nn::AdamOptions opts;
        opts.learning_rate = 1e-2;
        nn::Adam adam(trainable, opts);

        // Two steps: the zero-initialized output layer blocks gradient flow
        // into the backbone on the very first update.
        const nn::Tensor input = random_tensor(rng, 2, 3, 64, 64);
        for (int step = 0; step < 2; ++step) {
            adam.zero_grad();
            const nn::Tensor logits = model.forward_logits(input, true);
            nn::Tensor dlogits = nn::Tensor::like(logits);
            dlogits.fill(0.5f);
            model.backward(dlogits);
            adam.step();
        }

        std::size_t i = 0;
        bool any_changed = false;
        for (const auto& [name, p] : model.parameters()) {
            if (name.rfind("backbone.", 0) != 0) continue;
            if (p->value.v != backbone_before[i]) any_changed = true;
            ++i;
        }
        CHECK(any_changed == !freeze);
    }
}

TEST_CASE("full-size backbones support a training step" * doctest::timeout(120)) {
    // Shape and cache integrity through the deepest composite graph; the
    // numeric correctness of each layer is covered by the gradient checks.
    Rng rng(88);
    ModelConfig cfg;
    cfg.backbone = Backbone::inception_v3;
    cfg.head_mode = HeadMode::softmax;
    cfg.num_outputs = 3;
    Model model(cfg, 55);

    std::vector<nn::Param*> trainable;
    for (const auto& [name, p] : model.trainable_parameters()) trainable.push_back(p);
    nn::AdamOptions opts;
    nn::Adam adam(trainable, opts);

    // Two steps; the zero-initialized output layer blocks backbone gradients
    // on the first one.
    const nn::Tensor input = random_tensor(rng, 1, 3, 299, 299);
    for (int step = 0; step < 2; ++step) {
        adam.zero_grad();
        const nn::Tensor logits = model.forward_logits(input, true);
        REQUIRE(logits.c == 3);
        nn::Tensor dlogits = nn::Tensor::like(logits);
        for (float& v : dlogits.v) v = static_cast<float>(rng.normal(0.0, 0.1));
        const nn::Tensor dx = model.backward(dlogits);
        CHECK(dx.same_shape(input));
        adam.step();
    }

    bool any_grad = false;
    for (const auto& [name, p] : model.parameters()) {
        if (name.rfind("backbone.", 0) != 0) continue;
        for (float gv : p->grad.v) {
            if (gv != 0.0f) {
                any_grad = true;
                break;
            }
        }
        if (any_grad) break;
    }
    CHECK(any_grad);
}

TEST_CASE("model config validation") {
    ModelConfig cfg;
    cfg.num_outputs = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.num_outputs = 3;
    cfg.head_hidden_units = -1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("pretrained weights missing produces an actionable error") {
    TempDir tmp("weights");
    ModelConfig cfg;
    cfg.backbone = Backbone::vgg19;
    cfg.pretrained = true;
    cfg.head_mode = HeadMode::sigmoid;
    cfg.num_outputs = 7;
    try {
        build_model(cfg, 0, tmp.path);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("vgg19") != std::string::npos);
        CHECK(msg.find("offline") != std::string::npos);
        CHECK(msg.find("VSA_WEIGHTS_DIR") != std::string::npos);
    }
}

TEST_CASE("checkpoints round-trip weights and metadata") {
    TempDir tmp("ckpt");
    Rng rng(9);

    ModelConfig cfg;
    cfg.backbone = Backbone::toy;
    cfg.head_mode = HeadMode::sigmoid;
    cfg.num_outputs = 7;
    Model model(cfg, 123);

    const TaskSpec task = builtin_task_spec(TaskId::task2);
    save_checkpoint(model, task, 0.4, {{"note", "unit"}}, tmp.path / "ckpt-test");

    LoadedCheckpoint loaded = load_checkpoint(tmp.path / "ckpt-test.vsw");
    CHECK(loaded.task.id == TaskId::task2);
    CHECK(loaded.task.labels == task.labels);
    CHECK(loaded.threshold == 0.4);
    CHECK(loaded.model->config().backbone == Backbone::toy);
    CHECK(loaded.meta.at("note") == "unit");

    const nn::Tensor input = random_tensor(rng, 2, 3, 64, 64);
    const auto original = model.forward_scores(input);
    const auto restored = loaded.model->forward_scores(input);
    REQUIRE(original.size() == restored.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        for (std::size_t k = 0; k < original[i].size(); ++k) {
            CHECK(original[i][k] == doctest::Approx(restored[i][k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("loading weights with a missing tensor fails") {
    TempDir tmp("ckpt");
    ModelConfig small;
    small.backbone = Backbone::toy;
    small.num_outputs = 3;
    small.head_mode = HeadMode::softmax;
    Model a(small, 1);
    a.save_weights(tmp.path / "w.vsw");

    ModelConfig bigger = small;
    bigger.num_outputs = 4; // head shapes differ
    Model b(bigger, 1);
    CHECK_THROWS_AS(b.load_weights(tmp.path / "w.vsw"), InputError);
}
