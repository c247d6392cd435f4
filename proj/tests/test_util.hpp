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

#include "mbsp/dag.hpp"
#include "mbsp/schedule.hpp"

#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace mbsp::test {

inline WeightedDag chain(std::size_t n, Weight omega = 1, Weight mu = 1) {
    std::vector<NodeWeights> w(n, NodeWeights{omega, mu});
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId i = 0; i + 1 < n; ++i)
        e.emplace_back(i, i + 1);
    return WeightedDag(std::move(w), e);
}

inline WeightedDag diamond() {
    return WeightedDag(std::vector<NodeWeights>(4, NodeWeights{1, 1}), {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

inline MbspSchedule make(std::uint32_t P,
                         const std::vector<std::vector<std::tuple<std::uint32_t, Phase, TransitionKind, NodeId>>> &steps) {
    MbspSchedule s(P);
    for (const auto &step : steps) {
        std::size_t i = s.addSuperstep();
        for (const auto &[p, ph, k, v] : step)
            s.at(i, p).phase(ph).push_back({k, v});
    }
    return s;
}

/// Random DAG with a cache between the minimum feasible size and five above it.
inline MbspInstance random_instance(std::mt19937_64 &rng, std::size_t maxN = 40) {
    auto dag = random_dag(4 + rng() % maxN, 0.05 + 0.2 * static_cast<double>(rng() % 100) / 100.0, 5, 4, rng());
    Architecture arch{1 + static_cast<std::uint32_t>(rng() % 4), 0, 1 + static_cast<Weight>(rng() % 3),
                      static_cast<Weight>(rng() % 10)};
    arch.r = min_feasible_cache(dag) + static_cast<Weight>(rng() % 6);
    return MbspInstance(std::move(dag), arch);
}

/// True when MBSP_SKIP_SOLVER is unset and the configured solver command can run.
bool solver_available();

} // namespace mbsp::test
