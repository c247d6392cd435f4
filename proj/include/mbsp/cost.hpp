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

#include <string>
#include <vector>

namespace mbsp {

enum class Objective : std::uint8_t { Sync, Async };

const char *objective_name(Objective o);

struct SuperstepCost {
    Weight maxComp = 0;
    Weight maxSave = 0;
    Weight maxLoad = 0;
};

struct CostBreakdown {
    std::vector<SuperstepCost> supersteps;
    Weight totalSync = 0;
    std::vector<Weight> finish;
    Weight totalAsync = 0;

    /// `superstep,max_comp,max_save,max_load` rows, then `total_sync`, `finish_p<k>` and `total_async` lines.
    std::string toCsv() const;
};

// Costs assume a valid schedule; debug builds re-validate and throw std::invalid_argument.
Weight sync_cost(const MbspInstance &inst, const MbspSchedule &schedule);
Weight async_cost(const MbspInstance &inst, const MbspSchedule &schedule);
Weight schedule_cost(const MbspInstance &inst, const MbspSchedule &schedule, Objective objective);
CostBreakdown cost_breakdown(const MbspInstance &inst, const MbspSchedule &schedule);

Weight sync_cost(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule);
Weight async_cost(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule);

} // namespace mbsp
