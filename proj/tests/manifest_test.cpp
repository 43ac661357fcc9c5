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

#include <set>

#include "support/fixtures.hpp"
#include "vsa/errors.hpp"
#include "vsa/manifest.hpp"

using namespace vsa;
using vsa::testing::TempDir;
using vsa::testing::write_text;

TEST_CASE("builtin task specs match the challenge definition") {
    const TaskSpec t1 = builtin_task_spec(TaskId::task1);
    CHECK(t1.mode == LabelMode::single_label);
    CHECK(t1.labels == std::vector<std::string>{"negative", "positive", "neutral"});

    const TaskSpec t2 = builtin_task_spec(TaskId::task2);
    CHECK(t2.mode == LabelMode::multi_label);
    CHECK(t2.labels == std::vector<std::string>{"joy", "sadness", "fear", "disgust", "anger",
                                                "surprise", "neutral"});

    const TaskSpec t3 = builtin_task_spec(TaskId::task3);
    CHECK(t3.mode == LabelMode::multi_label);
    REQUIRE(t3.labels.size() == 11);
    CHECK(t3.labels.front() == "anger");
    CHECK(t3.labels.back() == "label_11");

    // Labels unique within every spec.
    for (const TaskSpec& spec : {t1, t2, t3}) {
        std::set<std::string> unique(spec.labels.begin(), spec.labels.end());
        CHECK(unique.size() == spec.labels.size());
    }
}

TEST_CASE("builtin_task_spec is deterministic and the 11th label is configurable") {
    const TaskSpec a = builtin_task_spec(TaskId::task3, "relief_from_fire");
    const TaskSpec b = builtin_task_spec(TaskId::task3, "relief_from_fire");
    CHECK(a.labels == b.labels);
    CHECK(a.labels.back() == "relief_from_fire");
    CHECK_THROWS_AS(builtin_task_spec(TaskId::task3, "anger"), InputError); // duplicate
}

TEST_CASE("parse_task_id rejects unknown ids") {
    CHECK(parse_task_id(" Task2 ") == TaskId::task2);
    CHECK_THROWS_AS(parse_task_id("task9"), InputError);
}

TEST_CASE("load_manifest parses well-formed CSV preserving order") {
    TempDir tmp("manifest");
    write_text(tmp.path / "t1.csv",
               "image_path,labels\n"
               "a.jpg,negative\n"
               "b.jpg,Positive\n"
               "c.jpg, neutral \n");
    const Dataset ds = load_manifest(tmp.path / "t1.csv", builtin_task_spec(TaskId::task1),
                                     Split::train);
    REQUIRE(ds.records.size() == 3);
    CHECK(ds.records[0].image_path == (tmp.path / "a.jpg").string());
    CHECK(ds.records[0].label_ids == std::vector<int>{0});
    CHECK(ds.records[1].label_ids == std::vector<int>{1}); // case-insensitive
    CHECK(ds.records[2].label_ids == std::vector<int>{2}); // trimmed
    for (const ImageRecord& rec : ds.records) CHECK(rec.origin == RecordOrigin::original);
}

TEST_CASE("multi-label rows split on semicolons") {
    TempDir tmp("manifest");
    write_text(tmp.path / "t2.csv", "image_path,labels\nimg7.jpg,fear;joy\n");
    const TaskSpec spec = builtin_task_spec(TaskId::task2);
    const Dataset ds = load_manifest(tmp.path / "t2.csv", spec, Split::train);
    REQUIRE(ds.records.size() == 1);
    const std::vector<std::string> names = ds.records[0].label_names(spec);
    CHECK(std::set<std::string>(names.begin(), names.end()) ==
          std::set<std::string>{"fear", "joy"});
}

TEST_CASE("unknown label errors name the row and token") {
    TempDir tmp("manifest");
    write_text(tmp.path / "bad.csv", "image_path,labels\na.jpg,negative\nb.jpg,happiness\n");
    try {
        load_manifest(tmp.path / "bad.csv", builtin_task_spec(TaskId::task1), Split::train);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("happiness") != std::string::npos);
        CHECK(msg.find(":3") != std::string::npos); // header is row 1
    }
}

TEST_CASE("manifest error paths") {
    TempDir tmp("manifest");
    const TaskSpec spec = builtin_task_spec(TaskId::task1);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_manifest(tmp.path / "nope.csv", spec, Split::train), InputError);
    }
    SUBCASE("wrong column count") {
        write_text(tmp.path / "m.csv", "image_path,labels\na.jpg,negative,extra\n");
        CHECK_THROWS_AS(load_manifest(tmp.path / "m.csv", spec, Split::train), InputError);
    }
    SUBCASE("empty label field in ground truth") {
        write_text(tmp.path / "m.csv", "image_path,labels\na.jpg,\n");
        CHECK_THROWS_AS(load_manifest(tmp.path / "m.csv", spec, Split::train), InputError);
    }
    SUBCASE("empty labels allowed for prediction inputs") {
        write_text(tmp.path / "m.csv", "image_path,labels\na.jpg,\n");
        ManifestOptions opts;
        opts.require_labels = false;
        const Dataset ds = load_manifest(tmp.path / "m.csv", spec, Split::test, opts);
        CHECK(ds.records.size() == 1);
        CHECK(ds.records[0].label_ids.empty());
    }
    SUBCASE("two labels on a single-label task") {
        write_text(tmp.path / "m.csv", "image_path,labels\na.jpg,negative;positive\n");
        CHECK_THROWS_AS(load_manifest(tmp.path / "m.csv", spec, Split::train), InputError);
    }
    SUBCASE("missing header") {
        write_text(tmp.path / "m.csv", "a.jpg,negative\n");
        CHECK_THROWS_AS(load_manifest(tmp.path / "m.csv", spec, Split::train), InputError);
    }
    SUBCASE("duplicate path is a warning, not an error") {
        write_text(tmp.path / "m.csv", "image_path,labels\na.jpg,negative\na.jpg,positive\n");
        std::vector<std::string> warnings;
        const Dataset ds = load_manifest(tmp.path / "m.csv", spec, Split::train, {}, &warnings);
        CHECK(ds.records.size() == 2);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("a.jpg") != std::string::npos);
    }
}

TEST_CASE("manifest round-trips through save_manifest") {
    TempDir tmp("manifest");
    write_text(tmp.path / "t2.csv",
               "image_path,labels\n"
               "a.jpg,joy\n"
               "b.jpg,fear;sadness\n"
               "c.jpg,neutral;anger;surprise\n");
    const TaskSpec spec = builtin_task_spec(TaskId::task2);
    const Dataset ds = load_manifest(tmp.path / "t2.csv", spec, Split::train);
    save_manifest(ds, tmp.path / "copy.csv");
    const Dataset again = load_manifest(tmp.path / "copy.csv", spec, Split::train);
    REQUIRE(again.records.size() == ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        CHECK(again.records[i].image_path == ds.records[i].image_path);
        CHECK(again.records[i].label_ids == ds.records[i].label_ids);
    }
}

TEST_CASE("label_counts counts membership per label") {
    const TaskSpec spec = vsa::testing::synthetic_spec(LabelMode::single_label, {"a", "b", "c"});

    SUBCASE("single-label counts") {
        const Dataset ds = vsa::testing::make_dataset(spec, {{0}, {0}, {1}});
        CHECK(label_counts(ds) == std::vector<long long>{2, 1, 0});
    }
    SUBCASE("empty dataset is all zeros") {
        const Dataset ds = vsa::testing::make_dataset(spec, {});
        CHECK(label_counts(ds) == std::vector<long long>{0, 0, 0});
    }
    SUBCASE("multi-label records count toward every carried label") {
        const TaskSpec mspec = vsa::testing::synthetic_spec(LabelMode::multi_label, {"a", "b"});
        const Dataset ds = vsa::testing::make_dataset(mspec, {{0, 1}, {1}});
        CHECK(label_counts(ds) == std::vector<long long>{1, 2});
    }
    SUBCASE("single-label counts sum to the record count") {
        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<int>> sets;
            const std::size_t n = rng.uniform_index(30);
            for (std::size_t i = 0; i < n; ++i) {
                sets.push_back({static_cast<int>(rng.uniform_index(3))});
            }
            const Dataset ds = vsa::testing::make_dataset(spec, sets);
            long long total = 0;
            for (long long c : label_counts(ds)) total += c;
            CHECK(total == static_cast<long long>(n));
        }
    }
}
