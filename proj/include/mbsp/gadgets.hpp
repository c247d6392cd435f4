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

#include <map>
#include <string>

namespace mbsp {

/// Parsed `gadget:<family>:k=v,...` specifier.
struct GadgetSpec {
    std::string family;
    std::map<std::string, std::int64_t> params;

    std::int64_t get(const std::string &key, std::int64_t fallback) const;
};

GadgetSpec parse_gadget_spec(const std::string &text);
bool is_gadget_spec(const std::string &text);

/// A gadget DAG with the machine its constructions assume (r may be overridden by callers).
struct GadgetInstance {
    WeightedDag dag;
    Architecture arch;
};

GadgetInstance make_gadget(const GadgetSpec &spec);

// Zipper layout: hub group H_k occupies [k*d, (k+1)*d); chain k occupies
// [hubs + k*m, hubs + (k+1)*m). Chain 0 is v, chain 1 is u.
WeightedDag zipper_dag(std::uint32_t d, std::uint32_t m, std::uint32_t P = 2);
NodeId zipper_hub(std::uint32_t d, std::uint32_t group, std::uint32_t j);
NodeId zipper_chain(std::uint32_t d, std::uint32_t m, std::uint32_t P, std::uint32_t chain, std::uint32_t i);

/// Chain v on processor 0 and chain u on processor 1, reloading hubs for every node.
MbspSchedule zipper_two_stage_schedule(std::uint32_t d, std::uint32_t m, const Architecture &arch);
/// Children of H_1 on processor 0, children of H_2 on processor 1, exchanging chain values.
MbspSchedule zipper_optimal_schedule(std::uint32_t d, std::uint32_t m, const Architecture &arch);

struct GapGadget {
    WeightedDag dag;
    Architecture arch;
    MbspSchedule first;
    MbspSchedule second;
};

/// first = diagonal schedule, second = aligned schedule. Node 0 is the zero-memory source.
GapGadget async_gap_gadget(std::uint32_t P, Weight Z);
/// first = sync-optimal-style schedule, second = async-favoured alternative. P = 5.
GapGadget sync_gap_gadget(Weight Z);

/// Node 0 is w; u_i = i, u'_i = d + i, v_i = 2d + 1 + i.
WeightedDag empty_step_dag(std::uint32_t d, std::uint32_t m);

} // namespace mbsp
