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

#include "mbsp/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mbsp {

/// part[v] is the part of node v; parts are numbered in a topological order of the quotient.
struct AcyclicPartition {
    std::vector<std::uint32_t> part;
    std::uint32_t parts = 0;

    std::vector<std::vector<NodeId>> members() const;
};

/// Nodes with at least one child in a different part.
std::size_t hyperedge_cut(const WeightedDag &dag, const std::vector<std::uint32_t> &part);

struct Bipartition {
    AcyclicPartition partition;
    std::size_t cut = 0;
    bool fallback = false; ///< the topological-prefix split was used
    std::string status;
};

/// Best split of topological_order(dag) into a prefix and a suffix, both at least ceil(n * fraction) nodes.
Bipartition topological_prefix_split(const WeightedDag &dag, double minFraction = 1.0 / 3.0);

/**
 * @brief Minimum hyperedge-cut acyclic bipartition with balance ceil(n * fraction) per side.
 *
 * Part 0 never has a parent in part 1. Without a solver (or without an incumbent) the prefix
 * split is returned; the prefix split is also the solver's warm start, so the ILP never cuts more.
 */
Bipartition acyclic_bipartition_ilp(const WeightedDag &dag, double minFraction = 1.0 / 3.0,
                                    const std::optional<SolverConfig> &solver = std::nullopt);

/// Splits recursively until every part has at most maxPart nodes. `log` receives each bipartition.
AcyclicPartition recursive_partition(const WeightedDag &dag, std::size_t maxPart = 60,
                                     const std::optional<SolverConfig> &solver = std::nullopt,
                                     std::vector<Bipartition> *log = nullptr, double minFraction = 1.0 / 3.0);

void write_partition_csv(std::ostream &out, const AcyclicPartition &p);
/// Reads `node,part` rows (header optional); throws DagError on gaps or malformed rows.
AcyclicPartition read_partition_csv(std::istream &in);

struct PartPlan {
    std::vector<std::uint32_t> processors; ///< sorted, nonempty
    std::uint32_t order = 0;               ///< rank by planned start
    Weight start = 0;
    Weight finish = 0; ///< start + ceil(sum omega / |processors|)
};

/**
 * @brief Greedy list schedule of the quotient where a part on k processors takes ceil(omega / k).
 *
 * Whenever processors are idle, they are shared among the ready parts in proportion to weight
 * (each ready part gets at least one while processors last).
 */
std::vector<PartPlan> quotient_plan(const WeightedDag &quotient, const Architecture &arch);

struct SubproblemSpec {
    std::uint32_t part = 0;
    std::vector<NodeId> global;            ///< local id -> global id; boundary inputs first
    std::size_t boundaryInputs = 0;        ///< count of leading entries that belong to earlier parts
    std::vector<std::uint32_t> processors; ///< local processor -> global processor
    MbspInstance instance;                 ///< local DAG, carryover reds, required blues
};

/// Sub-DAG of one part plus its outside parents (as sources); requires blue on nodes with outside children.
SubproblemSpec make_subproblem(const MbspInstance &inst, const AcyclicPartition &partition, std::uint32_t part,
                               const std::vector<std::uint32_t> &processors,
                               const std::vector<std::vector<NodeId>> &carryRed);

struct DncConfig {
    std::size_t maxPart = 60;
    double minFraction = 1.0 / 3.0;
    bool useSolver = true; ///< false runs the prefix split and keeps every warm start
    SolverConfig solver;   ///< per-subproblem limits
    double partitionTimeLimit = 10.0;
    IlpConfig ilp;         ///< objective, merging and slack; T is chosen per part
};

struct SubResult {
    SubproblemSpec spec;
    MbspSchedule schedule; ///< local ids, valid for spec.instance
    Weight warmCost = 0;
    Weight cost = 0;
    std::string status;
    bool fallback = false; ///< solver gave nothing better; the warm start is kept
    double seconds = 0.0;
};

/// Solves parts in planned order; carryover reds come from the concatenation so far.
std::vector<SubResult> solve_subproblems(const MbspInstance &inst, const AcyclicPartition &partition,
                                         const std::vector<PartPlan> &plan, const DncConfig &cfg);

/// Offsets each sub-schedule to the latest superstep of its processors (and after its inputs are saved).
MbspSchedule concatenate(const MbspInstance &inst, const std::vector<SubResult> &subs);

/// Merges adjacent supersteps and cancels boundary delete/reload pairs; never raises the sync cost.
MbspSchedule streamline(const MbspInstance &inst, const MbspSchedule &schedule);

struct DncResult {
    AcyclicPartition partition;
    std::vector<Bipartition> splits;
    std::vector<PartPlan> plan;
    std::vector<SubResult> subs;
    MbspSchedule naive;
    MbspSchedule schedule; ///< streamlined
};

DncResult divide_and_conquer(const MbspInstance &inst, const DncConfig &cfg);

/// One JSON object per part: nodes, processors, status, fallback, costs, time; then a summary line.
void write_dnc_report(std::ostream &out, const MbspInstance &inst, const DncResult &r);

} // namespace mbsp
