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

#include "mbsp/cost.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mbsp {

const char *objective_name(Objective o) { return o == Objective::Sync ? "sync" : "async"; }

namespace {

void check_valid([[maybe_unused]] const MbspInstance &inst, [[maybe_unused]] const MbspSchedule &s) {
#ifndef NDEBUG
    if (auto rep = validate_schedule(inst, s); !rep.valid())
        throw std::invalid_argument("cost of invalid schedule: " + rep.violation->describe());
#endif
}

Weight op_cost(const MbspInstance &inst, const Op &op) {
    switch (op.kind) {
    case TransitionKind::Compute:
        return inst.dag.omega(op.node);
    case TransitionKind::Save:
    case TransitionKind::Load:
        return inst.arch.g * inst.dag.mu(op.node);
    case TransitionKind::Delete:
        break;
    }
    return 0;
}

Weight phase_cost(const MbspInstance &inst, const std::vector<Op> &ops) {
    Weight s = 0;
    for (const Op &op : ops)
        s += op_cost(inst, op);
    return s;
}

std::vector<SuperstepCost> sync_parts(const MbspInstance &inst, const MbspSchedule &s) {
    std::vector<SuperstepCost> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < s.processors(); ++p) {
            const auto &ps = s.at(i, p);
            out[i].maxComp = std::max(out[i].maxComp, phase_cost(inst, ps.comp));
            out[i].maxSave = std::max(out[i].maxSave, phase_cost(inst, ps.save));
            out[i].maxLoad = std::max(out[i].maxLoad, phase_cost(inst, ps.load));
        }
    return out;
}

Weight sum_sync(const MbspInstance &inst, const std::vector<SuperstepCost> &parts) {
    Weight total = 0;
    for (const auto &c : parts)
        total += c.maxComp + c.maxSave + c.maxLoad + inst.arch.L;
    return total;
}

std::vector<Weight> async_finish(const MbspInstance &inst, const MbspSchedule &s) {
    constexpr Weight kUnset = std::numeric_limits<Weight>::min();
    const std::uint32_t P = s.processors();
    std::vector<Weight> gamma(P, 0);
    std::vector<Weight> avail(inst.dag.size(), kUnset);
    for (NodeId v : inst.dag.sources())
        avail[v] = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        // Gamma of a value is fixed by its earliest superstep with a save, so saves of this
        // superstep are collected before any load of the same superstep consults them.
        std::vector<std::pair<NodeId, Weight>> saves;
        for (std::uint32_t p = 0; p < P; ++p) {
            const auto &ps = s.at(i, p);
            for (const Op &op : ps.comp)
                gamma[p] += op_cost(inst, op);
            for (const Op &op : ps.save) {
                gamma[p] += op_cost(inst, op);
                saves.emplace_back(op.node, gamma[p]);
            }
        }
        std::vector<std::uint8_t> fresh(inst.dag.size(), 0);
        for (const auto &[v, t] : saves) {
            if (avail[v] == kUnset) {
                avail[v] = t;
                fresh[v] = 1;
            } else if (fresh[v]) {
                avail[v] = std::min(avail[v], t);
            }
        }
        for (std::uint32_t p = 0; p < P; ++p)
            for (const Op &op : s.at(i, p).load) {
                if (avail[op.node] == kUnset)
                    throw std::invalid_argument("load of value " + std::to_string(op.node) + " before any save");
                gamma[p] = std::max(gamma[p], avail[op.node]) + op_cost(inst, op);
            }
    }
    return gamma;
}

} // namespace

Weight sync_cost(const MbspInstance &inst, const MbspSchedule &schedule) {
    check_valid(inst, schedule);
    return sum_sync(inst, sync_parts(inst, schedule));
}

Weight async_cost(const MbspInstance &inst, const MbspSchedule &schedule) {
    check_valid(inst, schedule);
    auto f = async_finish(inst, schedule);
    return f.empty() ? 0 : *std::max_element(f.begin(), f.end());
}

Weight schedule_cost(const MbspInstance &inst, const MbspSchedule &schedule, Objective objective) {
    return objective == Objective::Sync ? sync_cost(inst, schedule) : async_cost(inst, schedule);
}

CostBreakdown cost_breakdown(const MbspInstance &inst, const MbspSchedule &schedule) {
    check_valid(inst, schedule);
    CostBreakdown b;
    b.supersteps = sync_parts(inst, schedule);
    b.totalSync = sum_sync(inst, b.supersteps);
    b.finish = async_finish(inst, schedule);
    b.totalAsync = b.finish.empty() ? 0 : *std::max_element(b.finish.begin(), b.finish.end());
    return b;
}

Weight sync_cost(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule) {
    return sync_cost(MbspInstance(dag, arch), schedule);
}

Weight async_cost(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule) {
    return async_cost(MbspInstance(dag, arch), schedule);
}

std::string CostBreakdown::toCsv() const {
    std::ostringstream out;
    out << "superstep,max_comp,max_save,max_load\n";
    for (std::size_t i = 0; i < supersteps.size(); ++i)
        out << i << ',' << supersteps[i].maxComp << ',' << supersteps[i].maxSave << ',' << supersteps[i].maxLoad << '\n';
    out << "total_sync," << totalSync << '\n';
    for (std::size_t p = 0; p < finish.size(); ++p)
        out << "finish_p" << p << ',' << finish[p] << '\n';
    out << "total_async," << totalAsync << '\n';
    return out.str();
}

} // namespace mbsp
