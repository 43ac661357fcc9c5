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

#include "vsa/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vsa/errors.hpp"
#include "vsa/rng.hpp"

namespace vsa {

BalanceTarget parse_balance_target(const std::string& s) {
    const std::string t = to_lower(trim(s));
    if (t == "match_max") return BalanceTarget::match_max;
    if (t == "match_median") return BalanceTarget::match_median;
    throw InputError("unknown balance target '" + s + "' (expected match_max or match_median)");
}

std::string to_string(BalanceTarget t) {
    return t == BalanceTarget::match_max ? "match_max" : "match_median";
}

namespace {

long long per_record_cap(const BalanceConfig& cfg) {
    if (cfg.max_replication_factor < 1.0) {
        throw InputError("max_replication_factor must be >= 1");
    }
    return static_cast<long long>(std::floor(cfg.max_replication_factor));
}

// Median over counts of labels that actually occur; upper median for even n.
long long target_count(const std::vector<long long>& counts, BalanceTarget target) {
    std::vector<long long> present;
    for (long long c : counts) {
        if (c > 0) present.push_back(c);
    }
    if (present.empty()) return 0;
    if (target == BalanceTarget::match_max) {
        return *std::max_element(present.begin(), present.end());
    }
    std::sort(present.begin(), present.end());
    return present[present.size() / 2];
}

} // namespace

Dataset upsample_single_label(const Dataset& ds, const BalanceConfig& cfg) {
    if (ds.spec.mode != LabelMode::single_label) {
        throw InputError("upsample_single_label requires a single-label dataset");
    }
    const long long cap = per_record_cap(cfg);
    const std::vector<long long> counts = label_counts(ds);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) {
            throw InputError("class '" + ds.spec.labels[i] + "' has zero samples and cannot be balanced");
        }
    }
    const long long target = target_count(counts, cfg.target);

    Dataset out = ds;
    Rng rng(cfg.effective_seed(0));

    // Vocabulary order keeps the draw sequence deterministic.
    for (std::size_t label = 0; label < counts.size(); ++label) {
        if (counts[label] >= target) continue;
        std::vector<std::size_t> originals;
        for (std::size_t i = 0; i < ds.records.size(); ++i) {
            if (ds.records[i].has_label(static_cast<int>(label))) originals.push_back(i);
        }
        std::vector<long long> copies(originals.size(), 1);
        long long current = counts[label];
        while (current < target) {
            std::vector<std::size_t> eligible;
            for (std::size_t k = 0; k < originals.size(); ++k) {
                if (copies[k] < cap) eligible.push_back(k);
            }
            if (eligible.empty()) break; // every original hit the cap
            const std::size_t k = eligible[rng.uniform_index(eligible.size())];
            ImageRecord dup = ds.records[originals[k]];
            dup.origin = RecordOrigin::upsampled;
            out.records.push_back(std::move(dup));
            copies[k] += 1;
            current += 1;
        }
    }
    return out;
}

Dataset upsample_multi_label(const Dataset& ds, const BalanceConfig& cfg,
                             std::vector<std::string>* warnings) {
    if (ds.spec.mode != LabelMode::multi_label) {
        throw InputError("upsample_multi_label requires a multi-label dataset");
    }
    const long long cap = per_record_cap(cfg);
    std::vector<long long> counts = label_counts(ds);
    const long long target = target_count(counts, cfg.target);
    const std::size_t n_labels = counts.size();

    std::vector<bool> exempt(n_labels, false);
    for (std::size_t i = 0; i < n_labels; ++i) {
        if (counts[i] == 0) {
            exempt[i] = true;
            if (warnings != nullptr) {
                warnings->push_back("label '" + ds.spec.labels[i] +
                                    "' has zero samples; skipped during balancing");
            }
        }
    }

    Dataset out = ds;
    Rng rng(cfg.effective_seed(0));
    std::vector<long long> copies(ds.records.size(), 1);

    // Originals carrying each label, precomputed once; exhausted labels (all
    // originals at the cap) become exempt and stop being raised.
    std::vector<std::vector<std::size_t>> carriers(n_labels);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        for (int id : ds.records[i].label_ids) carriers[static_cast<std::size_t>(id)].push_back(i);
    }

    for (;;) {
        std::size_t rarest = n_labels;
        long long rarest_count = std::numeric_limits<long long>::max();
        for (std::size_t i = 0; i < n_labels; ++i) {
            if (exempt[i] || counts[i] >= target) continue;
            if (counts[i] < rarest_count) {
                rarest_count = counts[i];
                rarest = i;
            }
        }
        if (rarest == n_labels) break;

        std::vector<std::size_t> eligible;
        for (std::size_t idx : carriers[rarest]) {
            if (copies[idx] < cap) eligible.push_back(idx);
        }
        if (eligible.empty()) {
            exempt[rarest] = true;
            continue;
        }
        const std::size_t src = eligible[rng.uniform_index(eligible.size())];
        ImageRecord dup = ds.records[src];
        dup.origin = RecordOrigin::upsampled;
        out.records.push_back(std::move(dup));
        copies[src] += 1;
        for (int id : ds.records[src].label_ids) counts[static_cast<std::size_t>(id)] += 1;
    }
    return out;
}

Dataset balance_dataset(const Dataset& ds, const BalanceConfig& cfg,
                        std::vector<std::string>* warnings) {
    if (!cfg.enabled) return ds;
    if (ds.spec.mode == LabelMode::single_label) return upsample_single_label(ds, cfg);
    return upsample_multi_label(ds, cfg, warnings);
}

} // namespace vsa
