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

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "vsa/config.hpp"
#include "vsa/errors.hpp"
#include "vsa/evaluate.hpp"
#include "vsa/train.hpp"

namespace {

using namespace vsa;
namespace fs = std::filesystem;

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string now_iso8601() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void print_counts(const std::string& title, const std::map<std::string, long long>& counts) {
    std::cout << title << "\n";
    for (const auto& [label, count] : counts) {
        std::cout << "  " << label << ": " << count << "\n";
    }
}

// ---------------------------------------------------------------------------
// Workspace run registry (runs.json)
// ---------------------------------------------------------------------------

nlohmann::ordered_json load_registry(const fs::path& workspace) {
    const fs::path path = workspace / "runs.json";
    if (!fs::exists(path)) return nlohmann::ordered_json::array();
    std::ifstream in(path);
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed run registry " + path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw InputError("run registry must be a JSON array: " + path.string());
    return j;
}

void register_run(const fs::path& workspace, const std::string& run_name, const TrainConfig& cfg,
                  const fs::path& config_path, const fs::path& checkpoint_path) {
    nlohmann::ordered_json registry = load_registry(workspace);
    for (const auto& entry : registry) {
        if (entry.value("run_name", "") == run_name) {
            throw InputError("run name '" + run_name + "' already exists in workspace " +
                             workspace.string() + "; pick another with --run-name");
        }
    }
    nlohmann::ordered_json entry;
    entry["run_name"] = run_name;
    entry["task_id"] = to_string(cfg.task.id);
    entry["backbone"] = to_string(cfg.model.backbone);
    entry["config_path"] = config_path.string();
    entry["checkpoint_path"] = checkpoint_path.string();
    entry["created_at"] = now_iso8601();
    registry.push_back(entry);
    std::ofstream out(workspace / "runs.json");
    if (!out) throw InputError("cannot write run registry in " + workspace.string());
    out << registry.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Shared option state
// ---------------------------------------------------------------------------

struct GlobalArgs {
    std::string task = "";
    std::string task3_label = "label_11";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string workspace = "runs";

    TaskSpec task_spec() const {
        if (task.empty()) {
            throw InputError("--task is required (task1, task2 or task3)");
        }
        return builtin_task_spec(parse_task_id(task), task3_label);
    }
    fs::path workspace_dir(bool create = true) const {
        const fs::path dir(workspace);
        if (create) fs::create_directories(dir);
        return dir;
    }
};

struct PrepareArgs {
    std::string manifest;
    std::string split = "train";
    std::string out;
    bool dry_run = false;
    bool check_images = false;
    double dev_fraction = 0.0;
    bool balance = true;
    std::optional<std::uint64_t> balance_seed;
    double balance_cap = 10.0;
    std::string balance_target = "match_max";
    bool augment = true;
    std::optional<std::uint64_t> aug_seed;
    int aug_copies = 1;
    double aug_crop = 0.8;
};

struct TrainArgs {
    std::string train_manifest;
    std::string dev_manifest;
    std::string config_path;
    std::string preset;
    std::string backbone;
    std::string run_name;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<int> batch_size;
    std::optional<double> threshold;
    std::optional<double> dev_fraction;
    std::optional<int> aug_copies;
    bool deterministic = false;
    bool config_only = false;
    bool freeze_backbone = false;
    bool balance_on = false;
    bool no_balance = false;
    bool augment_on = false;
    bool no_augment = false;
    bool no_pretrained = false;
    std::optional<std::uint64_t> balance_seed;
    std::optional<std::uint64_t> aug_seed;
    std::string weights_dir;
};

struct PredictArgs {
    std::string checkpoint;
    std::string manifest;
    std::string out = "predictions.csv";
    std::optional<double> threshold;
    bool fallback_top1 = false;
    int batch_size = 32;
};

struct EvaluateArgs {
    std::string truth;
    std::string predictions;
    std::string out = "metrics.json";
    std::string run_label = "run";
    std::optional<double> threshold;
    std::string sweep;
};

struct ReportArgs {
    std::string runs_file;
    std::string out;
    std::vector<std::string> entries;
    std::string save_runs;
};

// ---------------------------------------------------------------------------
// prepare
// ---------------------------------------------------------------------------

int cmd_prepare(const GlobalArgs& g, const PrepareArgs& a) {
    const TaskSpec spec = g.task_spec();
    std::vector<std::string> warnings;
    const Dataset ds = load_manifest(a.manifest, spec, parse_split(a.split), {}, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

    std::cout << "task: " << to_string(spec.id) << " ("
              << (spec.mode == LabelMode::single_label ? "single-label" : "multi-label") << ", "
              << spec.num_labels() << " labels)\n";
    std::cout << "records: " << ds.records.size() << "\n";
    print_counts("label counts (input):", label_counts_by_name(ds));

    Dataset working = ds;
    Dataset dev;
    if (a.dev_fraction > 0.0) {
        Dataset carved;
        stratified_split(ds, a.dev_fraction, derive_seed(g.seed, "split"), &carved, &dev);
        working = carved;
        std::cout << "split sizes: train=" << working.records.size()
                  << " dev=" << dev.records.size() << "\n";
    }

    BalanceConfig bal;
    bal.enabled = a.balance && working.split == Split::train;
    bal.seed = a.balance_seed ? *a.balance_seed : derive_seed(g.seed, "balance");
    bal.max_replication_factor = a.balance_cap;
    bal.target = parse_balance_target(a.balance_target);
    if (bal.enabled) {
        std::vector<std::string> bal_warnings;
        working = balance_dataset(working, bal, &bal_warnings);
        for (const std::string& w : bal_warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "balance: enabled (target=" << a.balance_target << ", cap=" << a.balance_cap
                  << ")\n";
        print_counts("label counts (after balance):", label_counts_by_name(working));
    } else {
        std::cout << "balance: disabled\n";
    }

    AugmentConfig aug;
    aug.enabled = a.augment && working.split == Split::train;
    aug.seed = a.aug_seed ? *a.aug_seed : derive_seed(g.seed, "augment");
    aug.copies_per_record = a.aug_copies;
    aug.crop_fraction = a.aug_crop;
    if (aug.enabled) {
        const std::size_t before = working.records.size();
        working = augment_dataset(working, aug);
        std::cout << "augment: enabled (copies=" << aug.copies_per_record
                  << ", crop=" << aug.crop_fraction << ", rotations={";
        for (std::size_t i = 0; i < aug.rotation_degrees.size(); ++i) {
            std::cout << (i ? "," : "") << aug.rotation_degrees[i];
        }
        std::cout << "}, flip=" << (aug.horizontal_flip ? "on" : "off") << ") -> "
                  << working.records.size() << " records (from " << before << ")\n";
    } else {
        std::cout << "augment: disabled\n";
    }
    std::cout << "prepared records: " << working.records.size() << "\n";

    nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
    if (a.check_images) {
        std::size_t checked = 0;
        for (const ImageRecord& rec : ds.records) {
            try {
                decode_image(rec.image_path);
            } catch (const Error& e) {
                skipped.push_back({{"path", rec.image_path}, {"reason", e.what()}});
            }
            ++checked;
        }
        std::cout << "image check: " << checked - skipped.size() << "/" << checked
                  << " decodable\n";
        for (const auto& s : skipped) {
            std::cerr << "warning: unusable image " << s["path"].get<std::string>() << ": "
                      << s["reason"].get<std::string>() << "\n";
        }
    }

    if (!a.dry_run) {
        nlohmann::ordered_json summary;
        summary["task"] = to_string(spec.id);
        summary["manifest"] = a.manifest;
        summary["records_input"] = ds.records.size();
        summary["label_counts_input"] = label_counts_by_name(ds);
        summary["balance_enabled"] = bal.enabled;
        if (bal.enabled) {
            summary["balance"] = {{"target", a.balance_target},
                                  {"max_replication_factor", a.balance_cap}};
            summary["label_counts_after_balance"] = label_counts_by_name(working);
        }
        summary["augment_enabled"] = aug.enabled;
        if (aug.enabled) {
            summary["augment"] = {{"copies_per_record", aug.copies_per_record},
                                  {"crop_fraction", aug.crop_fraction},
                                  {"rotation_degrees", aug.rotation_degrees},
                                  {"horizontal_flip", aug.horizontal_flip}};
        }
        summary["records_prepared"] = working.records.size();
        if (a.dev_fraction > 0.0) {
            summary["split"] = {{"dev_fraction", a.dev_fraction},
                                {"train_records", working.records.size()},
                                {"dev_records", dev.records.size()}};
        }
        if (a.check_images) summary["unusable_images"] = skipped;

        const fs::path out_path =
            a.out.empty() ? g.workspace_dir() / "prepare-summary.json" : fs::path(a.out);
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot write summary: " + out_path.string());
        out << summary.dump(2) << "\n";
        std::cout << "summary written to " << out_path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const GlobalArgs& g, const TrainArgs& a) {
    TrainConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_config(a.config_path);
        if (!g.task.empty() && parse_task_id(g.task) != cfg.task.id) {
            throw InputError("--task " + g.task + " conflicts with config task " +
                             to_string(cfg.task.id));
        }
    } else {
        const TaskSpec spec = g.task_spec();
        if (!a.preset.empty()) {
            cfg = preset_config(a.preset, spec);
        } else if (!a.backbone.empty()) {
            cfg.task = spec;
            cfg.model.backbone = parse_backbone(a.backbone);
            cfg.model.pretrained = cfg.model.backbone != Backbone::toy;
            cfg.model.head_mode =
                spec.mode == LabelMode::single_label ? HeadMode::softmax : HeadMode::sigmoid;
            cfg.model.num_outputs = static_cast<int>(spec.num_labels());
        } else {
            throw InputError("specify a --preset (run1|run2), a --config file, or a --backbone");
        }
    }

    if (!a.backbone.empty()) {
        cfg.model.backbone = parse_backbone(a.backbone);
        if (cfg.model.backbone == Backbone::toy) cfg.model.pretrained = false;
    }
    if (a.no_pretrained) cfg.model.pretrained = false;
    if (a.freeze_backbone) cfg.model.freeze_backbone = true;
    if (a.epochs) cfg.epochs = *a.epochs;
    if (a.lr) cfg.learning_rate = *a.lr;
    if (a.batch_size) cfg.batch_size = *a.batch_size;
    if (a.threshold) cfg.threshold = *a.threshold;
    if (a.dev_fraction) cfg.dev_fraction = *a.dev_fraction;
    if (g.seed_given) cfg.seed = g.seed;
    if (a.deterministic) cfg.deterministic = true;
    if (a.balance_on && a.no_balance) {
        throw InputError("--balance and --no-balance are mutually exclusive");
    }
    if (a.augment_on && a.no_augment) {
        throw InputError("--augment and --no-augment are mutually exclusive");
    }
    if (a.balance_on) cfg.balance.enabled = true;
    if (a.no_balance) cfg.balance.enabled = false;
    if (a.augment_on) cfg.augment.enabled = true;
    if (a.no_augment) cfg.augment.enabled = false;
    if (a.aug_copies) cfg.augment.copies_per_record = *a.aug_copies;
    if (a.balance_seed) cfg.balance.seed = *a.balance_seed;
    if (a.aug_seed) cfg.augment.seed = *a.aug_seed;
    if (!a.weights_dir.empty()) cfg.weights_dir = fs::path(a.weights_dir);
    cfg.validate();

    const fs::path workspace = g.workspace_dir();
    std::string run_name = a.run_name;
    if (run_name.empty()) {
        run_name = to_string(cfg.task.id) + "-" + to_string(cfg.model.backbone) + "-s" +
                   std::to_string(cfg.seed);
    }
    const fs::path run_dir = workspace / run_name;
    if (fs::exists(run_dir)) {
        throw InputError("run directory already exists: " + run_dir.string() +
                         "; pick another with --run-name");
    }

    if (a.config_only) {
        fs::create_directories(run_dir);
        save_config(cfg, run_dir / "config.json");
        register_run(workspace, run_name, cfg, run_dir / "config.json", fs::path());
        std::cout << "config written to " << (run_dir / "config.json").string() << "\n";
        return 0;
    }

    if (a.train_manifest.empty()) {
        throw InputError("--train-manifest is required");
    }
    std::optional<fs::path> dev;
    if (!a.dev_manifest.empty()) dev = fs::path(a.dev_manifest);

    const RunArtifacts run = train(cfg, a.train_manifest, dev, run_dir);
    register_run(workspace, run_name, cfg, run_dir / "config.json", run.best_checkpoint);

    std::cout << "run " << run_name << " finished: " << run.log.size() << " epochs\n";
    std::cout << "  final train loss: " << run.log.back().train_loss << "\n";
    if (run.best_dev_weighted_f1) {
        std::cout << "  best dev weighted F1: " << fmt3(*run.best_dev_weighted_f1) << " (epoch "
                  << run.best_epoch << ")\n";
    }
    std::cout << "  checkpoints: " << run.final_checkpoint.string() << ", "
              << run.best_checkpoint.string() << "\n";
    std::cout << "  log: " << run.log_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int cmd_predict(const GlobalArgs& g, const PredictArgs& a) {
    if (a.batch_size < 1) throw InputError("--batch-size must be >= 1");
    LoadedCheckpoint ckpt = load_checkpoint(a.checkpoint);
    if (!g.task.empty()) {
        const TaskSpec requested = g.task_spec();
        if (requested.id != ckpt.task.id || requested.labels != ckpt.task.labels) {
            throw InputError("checkpoint task/vocabulary (" + to_string(ckpt.task.id) +
                             ") does not match requested task " + to_string(requested.id));
        }
    }
    ManifestOptions opts;
    opts.require_labels = false;
    const Dataset ds = load_manifest(a.manifest, ckpt.task, Split::test, opts);
    if (ds.records.empty()) throw InputError("manifest has no records: " + a.manifest);

    const double threshold = a.threshold.value_or(ckpt.threshold);
    const int input = ckpt.model->input_size();
    const Normalization norm = ckpt.model->normalization();
    const std::size_t sample_floats = static_cast<std::size_t>(3) * input * input;

    std::vector<PredictionRecord> preds;
    preds.reserve(ds.records.size());
    for (std::size_t begin = 0; begin < ds.records.size();
         begin += static_cast<std::size_t>(a.batch_size)) {
        const std::size_t end =
            std::min(begin + static_cast<std::size_t>(a.batch_size), ds.records.size());
        nn::Tensor batch(static_cast<int>(end - begin), 3, input, input);
        for (std::size_t i = begin; i < end; ++i) {
            std::string error;
            if (!materialize_record(ds.records[i], input, norm,
                                    batch.data() + (i - begin) * sample_floats, &error)) {
                throw InputError("cannot predict: " + error);
            }
        }
        const auto scores = ckpt.model->forward_scores(batch);
        for (std::size_t i = begin; i < end; ++i) {
            PredictionRecord p;
            p.image_path = ds.records[i].image_path;
            p.scores = scores[i - begin];
            p.decoded = decode(p.scores, ckpt.task.mode, threshold, ckpt.task.num_labels(),
                               a.fallback_top1);
            preds.push_back(std::move(p));
        }
    }
    save_predictions(preds, ckpt.task, a.out);
    std::cout << "wrote " << preds.size() << " predictions to " << a.out << " ("
              << to_string(ckpt.task.id) << ", " << ckpt.task.num_labels() << " scores per row";
    if (ckpt.task.mode == LabelMode::multi_label) std::cout << ", threshold " << threshold;
    std::cout << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const GlobalArgs& g, const EvaluateArgs& a) {
    const TaskSpec spec = g.task_spec();
    const Dataset truth = load_manifest(a.truth, spec, Split::test);
    std::vector<PredictionRecord> preds = load_predictions(a.predictions, spec);

    std::optional<double> threshold;
    if (a.threshold) {
        if (spec.mode != LabelMode::multi_label) {
            throw InputError("--threshold applies to multi-label tasks only");
        }
        threshold = *a.threshold;
        for (PredictionRecord& p : preds) {
            p.decoded = decode(p.scores, spec.mode, *threshold, spec.num_labels());
        }
    }

    const MetricsReport report = weighted_f1(truth, preds, threshold);

    std::cout << "per-label metrics (" << to_string(report.task_id) << ", " << report.record_count
              << " records):\n";
    std::printf("  %-18s %9s %9s %9s %9s\n", "label", "precision", "recall", "f1", "support");
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        const PerLabelMetrics& m = report.per_label[i];
        std::printf("  %-18s %9.3f %9.3f %9.3f %9lld\n", report.labels[i].c_str(), m.precision,
                    m.recall, m.f1, m.support);
    }
    std::cout << "\n";
    std::printf("%-12s %-8s %s\n", "run", "task", "weighted-F1");
    std::printf("%-12s %-8s %s\n", a.run_label.c_str(), to_string(report.task_id).c_str(),
                fmt3(report.weighted_f1).c_str());

    if (!a.sweep.empty()) {
        std::vector<double> grid;
        std::stringstream ss(a.sweep);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                grid.push_back(std::stod(trim(token)));
            } catch (const std::exception&) {
                throw InputError("bad sweep grid value '" + token + "'");
            }
        }
        // Scores aligned with truth record order.
        std::vector<std::vector<double>> scores;
        std::map<std::string, std::vector<const PredictionRecord*>> by_path;
        for (const PredictionRecord& p : preds) by_path[p.image_path].push_back(&p);
        for (const ImageRecord& rec : truth.records) {
            auto it = by_path.find(rec.image_path);
            if (it == by_path.end() || it->second.empty()) {
                throw InputError("sweep: no prediction for " + rec.image_path);
            }
            scores.push_back(it->second.front()->scores);
            it->second.erase(it->second.begin());
        }
        const ThresholdSweep sweep = sweep_threshold(truth, scores, grid);
        std::cout << "\nthreshold sweep:\n";
        for (const auto& [t, f1] : sweep.points) {
            std::cout << "  " << t << " -> " << fmt3(f1) << "\n";
        }
        std::cout << "recommended threshold: " << sweep.recommended << "\n";
    }

    save_metrics(report, a.out);
    std::cout << "\nmetrics written to " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const ReportArgs& a) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    if (!a.runs_file.empty()) {
        std::ifstream in(a.runs_file);
        if (!in) throw InputError("runs file not found: " + a.runs_file);
        nlohmann::ordered_json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError("malformed runs file " + a.runs_file + ": " + e.what());
        }
        runs = j.is_array() ? j : j.value("runs", nlohmann::ordered_json::array());
    }
    for (const std::string& entry : a.entries) {
        std::vector<std::string> parts; // RUN,TASK,METRICS_PATH
        std::stringstream ss(entry);
        std::string token;
        while (std::getline(ss, token, ',')) parts.push_back(trim(token));
        if (parts.size() != 3) {
            throw InputError("--entry expects RUN,TASK,METRICS_PATH, got '" + entry + "'");
        }
        const MetricsReport m = load_metrics(parts[2]);
        if (to_string(m.task_id) != to_lower(parts[1])) {
            throw InputError("metrics file " + parts[2] + " is for " + to_string(m.task_id) +
                             ", not " + parts[1]);
        }
        runs.push_back({{"run", parts[0]}, {"task", parts[1]}, {"weighted_f1", m.weighted_f1}});
    }
    if (runs.empty()) {
        throw InputError("nothing to report: pass --runs FILE and/or --entry RUN,TASK,METRICS");
    }

    // Rows = runs, columns = tasks, weighted F1 in the cells.
    std::vector<std::string> run_order;
    std::set<std::string> tasks_present;
    std::map<std::string, std::map<std::string, double>> grid;
    try {
        for (const auto& r : runs) {
            const std::string run = r.at("run").get<std::string>();
            const std::string task = to_lower(r.at("task").get<std::string>());
            parse_task_id(task); // validates
            if (!grid.count(run)) run_order.push_back(run);
            grid[run][task] = r.at("weighted_f1").get<double>();
            tasks_present.insert(task);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("runs entries need {run, task, weighted_f1}: ") + e.what());
    }

    std::ostringstream table;
    table << "runs         ";
    for (const std::string& task : tasks_present) table << task << "    ";
    table << "\n";
    for (const std::string& run : run_order) {
        char row[64];
        std::snprintf(row, sizeof(row), "%-12s ", run.c_str());
        table << row;
        for (const std::string& task : tasks_present) {
            const auto it = grid[run].find(task);
            table << (it == grid[run].end() ? std::string("-        ") : fmt3(it->second) + "    ");
        }
        table << "\n";
    }
    std::cout << table.str();

    if (!a.save_runs.empty()) {
        nlohmann::ordered_json doc;
        doc["runs"] = runs;
        std::ofstream out(a.save_runs);
        if (!out) throw InputError("cannot write runs file: " + a.save_runs);
        out << doc.dump(2) << "\n";
    }
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) throw InputError("cannot write report: " + a.out);
        out << table.str();
        std::cout << "report written to " << a.out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"visual sentiment pipeline: prepare, train, predict, evaluate, report"};
    app.require_subcommand(1);

    GlobalArgs g;
    PrepareArgs prepare_args;
    TrainArgs train_args;
    PredictArgs predict_args;
    EvaluateArgs evaluate_args;
    ReportArgs report_args;

    const auto add_globals = [&](CLI::App* cmd) {
        cmd->add_option("--task", g.task, "task id: task1, task2 or task3");
        cmd->add_option("--task3-label", g.task3_label, "name of task3's configurable 11th label");
        cmd->add_option("--seed", g.seed, "master seed")->each([&g](const std::string&) {
            g.seed_given = true;
        });
        cmd->add_option("--workspace", g.workspace, "workspace directory for runs and summaries");
    };

    CLI::App* prepare =
        app.add_subcommand("prepare", "validate a manifest and preview the pipeline");
    add_globals(prepare);
    prepare->add_option("--manifest", prepare_args.manifest, "dataset manifest CSV")->required();
    prepare->add_option("--split", prepare_args.split, "train, dev or test (default train)");
    prepare->add_option("--out", prepare_args.out, "summary JSON path");
    prepare->add_flag("--dry-run", prepare_args.dry_run, "no disk writes");
    prepare->add_flag("--check-images", prepare_args.check_images, "decode every image once");
    prepare->add_option("--dev-fraction", prepare_args.dev_fraction, "preview a carved dev split");
    prepare->add_flag("--balance,!--no-balance", prepare_args.balance,
                      "class balancing (default on)");
    prepare->add_option("--balance-seed", prepare_args.balance_seed, "balancing seed override");
    prepare->add_option("--balance-cap", prepare_args.balance_cap,
                        "max copies per original record");
    prepare->add_option("--balance-target", prepare_args.balance_target,
                        "match_max or match_median");
    prepare->add_flag("--augment,!--no-augment", prepare_args.augment, "augmentation (default on)");
    prepare->add_option("--aug-seed", prepare_args.aug_seed, "augmentation seed override");
    prepare->add_option("--aug-copies", prepare_args.aug_copies, "augmented copies per record");
    prepare->add_option("--aug-crop", prepare_args.aug_crop, "crop fraction in (0,1]");

    CLI::App* train_cmd =
        app.add_subcommand("train", "fine-tune a model and write a run directory");
    add_globals(train_cmd);
    train_cmd->add_option("--train-manifest", train_args.train_manifest, "training manifest CSV");
    train_cmd->add_option("--dev-manifest", train_args.dev_manifest, "dev manifest CSV");
    train_cmd->add_option("--config", train_args.config_path, "training config JSON");
    train_cmd->add_option("--preset", train_args.preset, "run1 (inception_v3) or run2 (vgg19)");
    train_cmd->add_option("--backbone", train_args.backbone, "inception_v3, vgg19 or toy");
    train_cmd->add_option("--run-name", train_args.run_name, "unique run name in the workspace");
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs (default 50)");
    train_cmd->add_option("--lr", train_args.lr, "learning rate (default 0.0001)");
    train_cmd->add_option("--batch-size", train_args.batch_size, "batch size (default 32)");
    train_cmd->add_option("--threshold", train_args.threshold, "dev decode threshold");
    train_cmd->add_option("--dev-fraction", train_args.dev_fraction,
                          "stratified dev split when no dev manifest is given");
    train_cmd->add_option("--aug-copies", train_args.aug_copies, "augmented copies per record");
    train_cmd->add_option("--balance-seed", train_args.balance_seed, "balancing seed override");
    train_cmd->add_option("--aug-seed", train_args.aug_seed, "augmentation seed override");
    train_cmd->add_option("--weights-dir", train_args.weights_dir,
                          "directory holding pretrained backbone weights (.vsw)");
    train_cmd->add_flag("--deterministic", train_args.deterministic,
                        "bit-reproducible mode (zeroed wall-clock fields)");
    train_cmd->add_flag("--config-only", train_args.config_only,
                        "write config.json and exit without training");
    train_cmd->add_flag("--freeze-backbone", train_args.freeze_backbone,
                        "train only the head layers");
    train_cmd->add_flag("--balance", train_args.balance_on, "enable balancing");
    train_cmd->add_flag("--no-balance", train_args.no_balance, "disable balancing");
    train_cmd->add_flag("--augment", train_args.augment_on, "enable augmentation");
    train_cmd->add_flag("--no-augment", train_args.no_augment, "disable augmentation");
    train_cmd->add_flag("--no-pretrained", train_args.no_pretrained,
                        "randomly initialize the backbone");

    CLI::App* predict = app.add_subcommand("predict", "score a manifest with a checkpoint");
    add_globals(predict);
    predict->add_option("--checkpoint", predict_args.checkpoint, "checkpoint .vsw path")
        ->required();
    predict->add_option("--manifest", predict_args.manifest, "manifest CSV (labels optional)")
        ->required();
    predict->add_option("--out", predict_args.out, "predictions CSV path");
    predict->add_option("--threshold", predict_args.threshold,
                        "multi-label decode threshold (default from checkpoint)");
    predict->add_flag("--fallback-top1", predict_args.fallback_top1,
                      "force the argmax label into empty multi-label decodes");
    predict->add_option("--batch-size", predict_args.batch_size, "inference batch size");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    add_globals(evaluate);
    evaluate->add_option("--truth", evaluate_args.truth, "ground-truth manifest CSV")->required();
    evaluate->add_option("--predictions", evaluate_args.predictions, "predictions CSV")
        ->required();
    evaluate->add_option("--out", evaluate_args.out, "metrics report JSON path");
    evaluate->add_option("--run-label", evaluate_args.run_label, "row label for the summary table");
    evaluate->add_option("--threshold", evaluate_args.threshold,
                         "re-decode multi-label predictions from scores at this threshold");
    evaluate->add_option("--sweep", evaluate_args.sweep,
                         "comma-separated threshold grid to sweep (multi-label)");

    CLI::App* report = app.add_subcommand("report", "render a runs-by-tasks weighted-F1 table");
    report->add_option("--seed", g.seed, "master seed (unused; accepted for interface symmetry)");
    report->add_option("--workspace", g.workspace, "workspace directory");
    report->add_option("--runs", report_args.runs_file, "runs JSON ({run, task, weighted_f1})");
    report->add_option("--entry", report_args.entries,
                       "RUN,TASK,METRICS_PATH triplet (repeatable)");
    report->add_option("--out", report_args.out, "write the rendered table here");
    report->add_option("--save-runs", report_args.save_runs, "write the collected runs JSON");

    try {
        app.parse(argc, argv);
        if (prepare->parsed()) return cmd_prepare(g, prepare_args);
        if (train_cmd->parsed()) return cmd_train(g, train_args);
        if (predict->parsed()) return cmd_predict(g, predict_args);
        if (evaluate->parsed()) return cmd_evaluate(g, evaluate_args);
        if (report->parsed()) return cmd_report(report_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const vsa::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vsa::TrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
