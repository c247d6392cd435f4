/*
Copyright 2026 The mbsp Authors

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

#include "mbsp/schedule.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mbsp {

class InfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Memory-oblivious BSP schedule: processor and superstep per computed node.
 *
 * Sources are load-only and carry no assignment. `order` lists the non-source nodes in
 * execution order; within one (processor, superstep) pair it is the compute sequence.
 */
struct BspSchedule {
    std::uint32_t processors = 1;
    std::vector<std::uint32_t> processor;
    std::vector<std::uint32_t> superstep;
    std::vector<NodeId> order;

    std::uint32_t numSupersteps() const;
};

bool is_precedence_feasible(const WeightedDag &dag, const BspSchedule &bsp);

struct GreedyBspConfig {
    /// A blocked processor closes the superstep once a pinned processor's load exceeds this multiple of its own.
    double imbalance = 1.3;
};

BspSchedule greedy_bsp_schedule(const WeightedDag &dag, const Architecture &arch, const GreedyBspConfig &cfg = {});
BspSchedule work_stealing_schedule(const WeightedDag &dag, const Architecture &arch, std::uint64_t seed = 0);
BspSchedule dfs_schedule(const WeightedDag &dag);

std::string bsp_to_csv(const BspSchedule &bsp);
BspSchedule bsp_from_csv(const WeightedDag &dag, std::uint32_t processors, const std::string &csv);

/// steps[s][p] is the compute sequence of processor p in skeleton superstep s.
struct ComputeSkeleton {
    std::uint32_t processors = 1;
    std::vector<std::vector<std::vector<NodeId>>> steps;
};

/// Cuts each BSP compute phase into maximal segments that run without intermediate I/O.
ComputeSkeleton split_into_mbsp_supersteps(const MbspInstance &inst, const BspSchedule &bsp);

enum class EvictionPolicy { Clairvoyant, Lru };

/// Fills loads, saves and deletes around a compute skeleton. Initial red pebbles must be blue.
MbspSchedule apply_cache_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton, EvictionPolicy policy);
MbspSchedule clairvoyant_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton);
MbspSchedule lru_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton);

enum class BaselineKind { Greedy, WorkStealing, Dfs };

struct TwoStageConfig {
    BaselineKind baseline = BaselineKind::Greedy;
    EvictionPolicy policy = EvictionPolicy::Clairvoyant;
    GreedyBspConfig greedy;
    std::uint64_t seed = 0;
};

BspSchedule first_stage(const MbspInstance &inst, const TwoStageConfig &cfg);
MbspSchedule two_stage_schedule(const MbspInstance &inst, const TwoStageConfig &cfg = {});

} // namespace mbsp
