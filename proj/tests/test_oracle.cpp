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
#include "mbsp/gadgets.hpp"
#include "mbsp/solver.hpp"
#include "mbsp/two_stage.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mbsp;
using mbsp::test::chain;

namespace {

MbspInstance tiny_instance(std::mt19937_64 &rng, std::uint32_t P, std::size_t maxN) {
    auto dag = random_dag(3 + rng() % (maxN - 2), 0.4, 2, 2, rng());
    Architecture arch{P, min_feasible_cache(dag) + static_cast<Weight>(rng() % 3), 1 + static_cast<Weight>(rng() % 3),
                      static_cast<Weight>(rng() % 6)};
    return MbspInstance(std::move(dag), arch);
}

OracleResult run(const MbspInstance &inst, Objective o, std::uint32_t bound = 0, bool recompute = true) {
    OracleConfig cfg;
    cfg.objective = o;
    cfg.maxTransitions = bound;
    cfg.allowRecompute = recompute;
    return brute_force_optimum(inst, cfg);
}

} // namespace

TEST(Oracle, TwoChainByHand) {
    // load source, compute sink, save sink: g + 1 + g.
    MbspInstance inst(chain(2), Architecture{1, 2, 1, 0});
    for (Objective o : {Objective::Sync, Objective::Async}) {
        const auto r = run(inst, o);
        EXPECT_EQ(r.cost, 3);
        EXPECT_EQ(r.transitions, 3U);
    }
}

TEST(Oracle, SyncChargesOneLatencyPerSuperstep) {
    MbspInstance inst(chain(2), Architecture{1, 2, 1, 7});
    EXPECT_EQ(run(inst, Objective::Sync).cost, 3 + 2 * 7);
    EXPECT_EQ(run(inst, Objective::Async).cost, 3);
}

TEST(Oracle, SourcesOnlyIsFree) {
    MbspInstance inst(WeightedDag(std::vector<NodeWeights>(3, NodeWeights{1, 1}), {}), Architecture{1, 1, 1, 5});
    const auto r = run(inst, Objective::Sync);
    EXPECT_EQ(r.cost, 0);
    EXPECT_EQ(r.schedule.size(), 0U);
}

TEST(Oracle, GuardAndLimits) {
    MbspInstance big(chain(13), Architecture{1, 2, 1, 0});
    EXPECT_THROW(run(big, Objective::Sync), std::invalid_argument);
    MbspInstance wide(chain(9), Architecture{2, 2, 1, 0});
    EXPECT_THROW(run(wide, Objective::Sync), std::invalid_argument);
    MbspInstance three(chain(3), Architecture{3, 2, 1, 0});
    EXPECT_THROW(run(three, Objective::Sync), std::invalid_argument);
    MbspInstance c4(chain(4), Architecture{1, 2, 1, 0});
    EXPECT_THROW(run(c4, Objective::Sync, 4), InfeasibleError);
    EXPECT_EQ(run(c4, Objective::Sync, 5).cost, 5);
    OracleConfig cfg;
    cfg.maxStates = 2;
    EXPECT_THROW(brute_force_optimum(c4, cfg), OracleLimitError);
}

// Hand-derived on the d=4, m=2 empty-step gadget (g=5, r=4):
// baseline 1 source load + 11 computes + 3 I/O = 31 in 15 transitions; recomputing the four-node
// chain instead of saving and reloading its tail gives 15 computes + 2 I/O = 25 in 17 transitions.
TEST(Oracle, EmptyStepHorizons) {
    MbspInstance inst(empty_step_dag(4, 2), Architecture{1, 4, 5, 0});
    const auto at16 = run(inst, Objective::Sync, 16);
    EXPECT_EQ(at16.cost, 31);
    EXPECT_EQ(at16.transitions, 15U); // one unused step, yet not optimal
    const auto at17 = run(inst, Objective::Sync, 17);
    EXPECT_EQ(at17.cost, 25);
    EXPECT_EQ(run(inst, Objective::Sync, 0, false).cost, 31);
}

TEST(OracleProperty, OrderingsOnTinyInstances) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::uint32_t P = 1 + static_cast<std::uint32_t>(trial % 2);
        const auto inst = tiny_instance(rng, P, P == 1 ? 8 : 6);
        SCOPED_TRACE(trial);
        const auto sync = run(inst, Objective::Sync);
        const auto async = run(inst, Objective::Async);
        EXPECT_LE(async.cost, sync.cost);
        const auto baseline = two_stage_schedule(inst);
        EXPECT_LE(sync.cost, schedule_cost(inst, baseline, Objective::Sync));
        EXPECT_LE(async.cost, schedule_cost(inst, baseline, Objective::Async));
        EXPECT_GE(run(inst, Objective::Sync, 0, false).cost, sync.cost);
        // A bound of the unbounded optimum's own length loses nothing.
        EXPECT_EQ(run(inst, Objective::Sync, sync.transitions).cost, sync.cost);
        if (P == 1 && inst.arch.L == 0) {
            EXPECT_EQ(sync.cost, async.cost);
        }
    }
}
