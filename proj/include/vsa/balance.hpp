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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsa/manifest.hpp"

namespace vsa {

enum class BalanceTarget { match_max, match_median };

BalanceTarget parse_balance_target(const std::string& s);
std::string to_string(BalanceTarget t);

struct BalanceConfig {
    bool enabled = true;
    // Absent means: derive from the run seed.
    std::optional<std::uint64_t> seed;
    // Cap on total copies of any one original record, itself included.
    // Fractional values are floored per record.
    double max_replication_factor = 10.0;
    BalanceTarget target = BalanceTarget::match_max;

    std::uint64_t effective_seed(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

// Duplicates minority-class records (sampling with replacement) until every
// class count reaches the target, subject to the replication cap. Originals
// stay in place; duplicates are appended with origin=upsampled.
Dataset upsample_single_label(const Dataset& ds, const BalanceConfig& cfg);

// Iterative rarest-label-first duplication for multi-label datasets: pick the
// label currently furthest below target, duplicate a random original record
// carrying it, repeat. Labels whose originals are all at the cap drop out.
// Zero-count labels are skipped with a warning.
Dataset upsample_multi_label(const Dataset& ds, const BalanceConfig& cfg,
                             std::vector<std::string>* warnings = nullptr);

// Mode dispatch; identity when cfg.enabled is false.
Dataset balance_dataset(const Dataset& ds, const BalanceConfig& cfg,
                        std::vector<std::string>* warnings = nullptr);

} // namespace vsa
