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

// End-to-end exercise of the command-line surface. argv[1] = vsa binary,
// argv[2] = fixtures directory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "vsa/evaluate.hpp"
#include "vsa/manifest.hpp"

namespace {

int g_failures = 0;

#define EXPECT(cond, what)                                                              \
    do {                                                                                \
        if (!(cond)) {                                                                  \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << " " << what << "\n"; \
            ++g_failures;                                                               \
        }                                                                               \
    } while (0)

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CmdResult run(const std::string& bin, const std::string& args,
              const std::filesystem::path& scratch) {
    const std::filesystem::path out = scratch / "stdout.txt";
    const std::filesystem::path err = scratch / "stderr.txt";
    const std::string cmd = bin + " " + args + " >" + out.string() + " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cli_test <vsa-binary> <fixtures-dir>\n";
        return 1;
    }
    const std::string vsa_bin = argv[1];
    const std::filesystem::path fixtures = argv[2];
    vsa::testing::TempDir tmp("vsa-cli");
    const std::filesystem::path& dir = tmp.path;
    const std::string ws = " --workspace " + (dir / "ws").string();

    using vsa::builtin_task_spec;
    using vsa::TaskId;
    const auto task1 = builtin_task_spec(TaskId::task1);
    const auto task2 = builtin_task_spec(TaskId::task2);

    // Imbalanced single-label manifest: 5/3/2.
    {
        vsa::Rng rng(1);
        std::string manifest = "image_path,labels\n";
        const int counts[3] = {5, 3, 2};
        int idx = 0;
        for (int cls = 0; cls < 3; ++cls) {
            for (int i = 0; i < counts[cls]; ++i, ++idx) {
                const std::string name = "t1_" + std::to_string(idx) + ".png";
                vsa::encode_image(dir / name, vsa::testing::class_image(cls, rng));
                manifest += name + "," + task1.labels[static_cast<std::size_t>(cls)] + "\n";
            }
        }
        vsa::testing::write_text(dir / "t1_train.csv", manifest);
    }
    vsa::testing::write_class_dataset(dir, task1.labels, 2, 2, "t1_dev.csv");

    // prepare: balancing preview reaches 5/5/5.
    {
        const CmdResult r = run(vsa_bin,
                                "prepare --task task1 --manifest " + (dir / "t1_train.csv").string() +
                                    " --dry-run" + ws,
                                dir);
        EXPECT(r.exit_code == 0, "prepare exits 0: " + r.err);
        EXPECT(contains(r.out, "negative: 5"), "input counts shown");
        EXPECT(contains(r.out, "neutral: 5") && contains(r.out, "positive: 5"),
               "post-balance counts are equalized\n" + r.out);
    }
    // prepare with the pipeline off reports input counts unchanged.
    {
        const CmdResult r = run(vsa_bin,
                                "prepare --task task1 --manifest " + (dir / "t1_train.csv").string() +
                                    " --no-balance --no-augment --dry-run" + ws,
                                dir);
        EXPECT(r.exit_code == 0, "prepare --no-balance exits 0");
        EXPECT(contains(r.out, "balance: disabled"), "balance disabled");
        EXPECT(contains(r.out, "prepared records: 10"), "identity pipeline keeps 10 records");
    }
    // prepare on a missing manifest: exit 2, message names the path.
    {
        const CmdResult r =
            run(vsa_bin, "prepare --task task1 --manifest " + (dir / "absent.csv").string() + ws,
                dir);
        EXPECT(r.exit_code == 2, "missing manifest exits 2");
        EXPECT(contains(r.err, "absent.csv"), "error names the path");
    }

    // The six preset configs (criterion-8 shape, spot-checked here).
    for (const std::string preset : {"run1", "run2"}) {
        const CmdResult r = run(vsa_bin,
                                "train --task task1 --preset " + preset +
                                    " --config-only --run-name preset-" + preset + ws,
                                dir);
        EXPECT(r.exit_code == 0, "config-only preset exits 0: " + r.err);
        nlohmann::json cfg;
        std::ifstream in(dir / "ws" / ("preset-" + preset) / "config.json");
        in >> cfg;
        EXPECT(cfg["model"]["backbone"] == (preset == "run1" ? "inception_v3" : "vgg19"),
               "preset backbone");
        EXPECT(cfg["epochs"] == 50, "preset epochs");
        EXPECT(cfg["learning_rate"] == 0.0001, "preset learning rate");
        EXPECT(cfg["optimizer"] == "adam", "preset optimizer");
    }
    // Duplicate run names are rejected.
    {
        const CmdResult r = run(
            vsa_bin, "train --task task1 --preset run1 --config-only --run-name preset-run1" + ws,
            dir);
        EXPECT(r.exit_code == 2, "duplicate run name exits 2");
    }

    // Toy smoke run on task2 (multi-label): one epoch, writes all artifacts.
    vsa::testing::write_class_dataset(dir, {"joy", "sadness", "fear"}, 2, 3, "t2_train.csv");
    {
        const CmdResult r =
            run(vsa_bin,
                "train --task task2 --backbone toy --epochs 1 --batch-size 4 --no-augment"
                " --train-manifest " +
                    (dir / "t2_train.csv").string() + " --run-name smoke2 --seed 5" + ws,
                dir);
        EXPECT(r.exit_code == 0, "toy smoke train exits 0: " + r.err);
        for (const std::string f :
             {"config.json", "log.jsonl", "meta.json", "ckpt-final.vsw", "ckpt-final.meta.json",
              "ckpt-best.vsw", "ckpt-best.meta.json"}) {
            EXPECT(std::filesystem::exists(dir / "ws" / "smoke2" / f), "run artifact " + f);
        }
    }

    // predict: 4-image manifest under the task2 checkpoint -> 4 rows x 7 scores.
    {
        std::string manifest = "image_path,labels\n";
        vsa::Rng rng(4);
        for (int i = 0; i < 4; ++i) {
            // One JPEG in the mix to cover both supported codecs.
            const std::string name = "p" + std::to_string(i) + (i == 3 ? ".jpg" : ".png");
            vsa::encode_image(dir / name, vsa::testing::class_image(i % 3, rng));
            manifest += name + ",\n"; // unlabeled prediction input
        }
        vsa::testing::write_text(dir / "t2_unlabeled.csv", manifest);

        const std::string ckpt = (dir / "ws" / "smoke2" / "ckpt-best.vsw").string();
        const CmdResult r = run(vsa_bin,
                                "predict --checkpoint " + ckpt + " --manifest " +
                                    (dir / "t2_unlabeled.csv").string() + " --out " +
                                    (dir / "preds2.csv").string(),
                                dir);
        EXPECT(r.exit_code == 0, "predict exits 0: " + r.err);
        const auto preds = vsa::load_predictions(dir / "preds2.csv", task2);
        EXPECT(preds.size() == 4, "4 prediction rows");
        for (const auto& p : preds) EXPECT(p.scores.size() == 7, "7 scores per row");

        // Raising the threshold can only shrink decoded sets.
        const CmdResult strict = run(vsa_bin,
                                     "predict --checkpoint " + ckpt + " --manifest " +
                                         (dir / "t2_unlabeled.csv").string() + " --threshold 0.99" +
                                         " --out " + (dir / "preds2_hi.csv").string(),
                                     dir);
        EXPECT(strict.exit_code == 0, "strict predict exits 0");
        const auto hi = vsa::load_predictions(dir / "preds2_hi.csv", task2);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            EXPECT(std::includes(preds[i].decoded.begin(), preds[i].decoded.end(),
                                 hi[i].decoded.begin(), hi[i].decoded.end()),
                   "decoded@0.99 is a subset of decoded@default");
        }

        // Task mismatch: task2 checkpoint asked to serve task1.
        const CmdResult mismatch =
            run(vsa_bin,
                "predict --task task1 --checkpoint " + ckpt + " --manifest " +
                    (dir / "t2_unlabeled.csv").string() + " --out " + (dir / "x.csv").string(),
                dir);
        EXPECT(mismatch.exit_code == 2, "task mismatch exits 2");
        EXPECT(contains(mismatch.err, "does not match"), "mismatch message");

        // Vocabulary mismatch: a manifest with task1 labels under this checkpoint.
        const CmdResult vocab =
            run(vsa_bin,
                "predict --checkpoint " + ckpt + " --manifest " + (dir / "t1_train.csv").string() +
                    " --out " + (dir / "y.csv").string(),
                dir);
        EXPECT(vocab.exit_code == 2, "vocabulary mismatch exits 2");
        EXPECT(contains(vocab.err, "unknown label"), "names the unknown label");
    }

    // evaluate: the worked AAB/ABB example prints 0.667.
    {
        vsa::testing::write_text(dir / "truth.csv",
                                 "image_path,labels\nx1.jpg,negative\nx2.jpg,negative\nx3.jpg,"
                                 "positive\n");
        vsa::testing::write_text(
            dir / "worked_preds.csv",
            "image_path,scores,decoded\n"
            "x1.jpg,0.9;0.05;0.05,negative\n"
            "x2.jpg,0.2;0.7;0.1,positive\n"
            "x3.jpg,0.1;0.8;0.1,positive\n");
        const CmdResult r = run(vsa_bin,
                                "evaluate --task task1 --truth " + (dir / "truth.csv").string() +
                                    " --predictions " + (dir / "worked_preds.csv").string() +
                                    " --out " + (dir / "m1.json").string(),
                                dir);
        EXPECT(r.exit_code == 0, "evaluate exits 0: " + r.err);
        EXPECT(contains(r.out, "0.667"), "prints the worked weighted F1\n" + r.out);

        // Perfect predictions print 1.000.
        vsa::testing::write_text(dir / "perfect_preds.csv",
                                 "image_path,scores,decoded\n"
                                 "x1.jpg,1;0;0,negative\n"
                                 "x2.jpg,1;0;0,negative\n"
                                 "x3.jpg,0;1;0,positive\n");
        const CmdResult perfect = run(vsa_bin,
                                      "evaluate --task task1 --truth " +
                                          (dir / "truth.csv").string() + " --predictions " +
                                          (dir / "perfect_preds.csv").string() + " --out " +
                                          (dir / "m2.json").string(),
                                      dir);
        EXPECT(perfect.exit_code == 0, "perfect evaluate exits 0");
        EXPECT(contains(perfect.out, "1.000"), "prints 1.000");

        // Coverage failure: one prediction missing.
        vsa::testing::write_text(dir / "short_preds.csv",
                                 "image_path,scores,decoded\n"
                                 "x1.jpg,1;0;0,negative\n"
                                 "x2.jpg,1;0;0,negative\n");
        const CmdResult missing = run(vsa_bin,
                                      "evaluate --task task1 --truth " +
                                          (dir / "truth.csv").string() + " --predictions " +
                                          (dir / "short_preds.csv").string() + " --out " +
                                          (dir / "m3.json").string(),
                                      dir);
        EXPECT(missing.exit_code == 2, "coverage error exits 2");
        EXPECT(contains(missing.err, "x3.jpg"), "lists the missing path");
    }

    // Composition: predict + evaluate on the dev manifest reproduces the
    // train log's best dev weighted F1.
    {
        const CmdResult r = run(vsa_bin,
                                "train --task task1 --backbone toy --epochs 3 --batch-size 4"
                                " --deterministic --seed 9 --train-manifest " +
                                    (dir / "t1_train.csv").string() + " --dev-manifest " +
                                    (dir / "t1_dev.csv").string() + " --run-name devrun" + ws,
                                dir);
        EXPECT(r.exit_code == 0, "dev train exits 0: " + r.err);

        double best_logged = -1.0;
        std::ifstream log(dir / "ws" / "devrun" / "log.jsonl");
        std::string line;
        while (std::getline(log, line)) {
            const auto entry = nlohmann::json::parse(line);
            best_logged = std::max(best_logged, entry.at("dev_weighted_f1").get<double>());
        }
        EXPECT(best_logged >= 0.0, "dev F1 logged per epoch");

        const CmdResult pred = run(vsa_bin,
                                   "predict --checkpoint " +
                                       (dir / "ws" / "devrun" / "ckpt-best.vsw").string() +
                                       " --manifest " + (dir / "t1_dev.csv").string() + " --out " +
                                       (dir / "dev_preds.csv").string(),
                                   dir);
        EXPECT(pred.exit_code == 0, "dev predict exits 0: " + pred.err);
        const CmdResult eval = run(vsa_bin,
                                   "evaluate --task task1 --truth " +
                                       (dir / "t1_dev.csv").string() + " --predictions " +
                                       (dir / "dev_preds.csv").string() + " --out " +
                                       (dir / "dev_metrics.json").string(),
                                   dir);
        EXPECT(eval.exit_code == 0, "dev evaluate exits 0: " + eval.err);
        nlohmann::json metrics;
        std::ifstream min(dir / "dev_metrics.json");
        min >> metrics;
        EXPECT(std::abs(metrics.at("weighted_f1").get<double>() - best_logged) < 1e-6,
               "composed predict+evaluate reproduces the logged best dev F1");
    }

    // Reproducibility at the CLI level: same seed, byte-identical logs.
    {
        const std::string base =
            "train --task task1 --backbone toy --epochs 2 --batch-size 4 --deterministic"
            " --seed 31 --train-manifest " +
            (dir / "t1_train.csv").string();
        const CmdResult r1 = run(vsa_bin, base + " --run-name rep1" + ws, dir);
        const CmdResult r2 = run(vsa_bin, base + " --run-name rep2" + ws, dir);
        EXPECT(r1.exit_code == 0 && r2.exit_code == 0, "both repro runs exit 0");
        EXPECT(slurp(dir / "ws" / "rep1" / "log.jsonl") == slurp(dir / "ws" / "rep2" / "log.jsonl"),
               "identical seeds give byte-identical logs");
    }

    // Divergence maps to exit 3.
    {
        const CmdResult r = run(vsa_bin,
                                "train --task task1 --backbone toy --epochs 5 --batch-size 4"
                                " --lr 1e38 --train-manifest " +
                                    (dir / "t1_train.csv").string() + " --run-name blowup" + ws,
                                dir);
        EXPECT(r.exit_code == 3, "non-finite training failure exits 3");
        EXPECT(contains(r.err, "non-finite"), "diagnostic mentions non-finite values");
    }

    // report renders the bundled sample tables.
    {
        const CmdResult r =
            run(vsa_bin, "report --runs " + (fixtures / "dev_runs.json").string(), dir);
        EXPECT(r.exit_code == 0, "report exits 0");
        EXPECT(contains(r.out, "Run 1") && contains(r.out, "Run 2"), "both runs rendered");
        EXPECT(contains(r.out, "0.714") && contains(r.out, "0.479"), "cells rendered");
        EXPECT(contains(r.out, "task1") && contains(r.out, "task3"), "task columns rendered");
    }
    // report --entry collects metrics files.
    {
        const CmdResult r = run(vsa_bin,
                                "report --entry \"Run 1,task1," + (dir / "m2.json").string() +
                                    "\" --out " + (dir / "table.txt").string(),
                                dir);
        EXPECT(r.exit_code == 0, "report --entry exits 0: " + r.err);
        EXPECT(contains(slurp(dir / "table.txt"), "1.000"), "table written with metrics value");
    }

    if (g_failures == 0) {
        std::cout << "cli_test: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_test: " << g_failures << " check(s) failed\n";
    return 1;
}
