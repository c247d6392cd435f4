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
#include "mbsp/two_stage.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace mbsp;
using mbsp::test::random_instance;

namespace {

Weight load_cost(const MbspInstance &inst, const MbspSchedule &s) {
    Weight total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < s.processors(); ++p)
            for (const Op &op : s.at(i, p).load)
                total += inst.dag.mu(op.node);
    return total * inst.arch.g;
}

Weight io_cost(const MbspInstance &inst, const MbspSchedule &s) {
    Weight total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < s.processors(); ++p) {
            for (const Op &op : s.at(i, p).save)
                total += inst.dag.mu(op.node);
            for (const Op &op : s.at(i, p).load)
                total += inst.dag.mu(op.node);
        }
    return total * inst.arch.g;
}

} // namespace

// ============================================================================
// First stage
// ============================================================================

TEST(GreedyBsp, ChainStaysInOneSuperstep) {
    auto dag = test::chain(6);
    auto bsp = greedy_bsp_schedule(dag, Architecture{3, 10, 1, 5});
    ASSERT_TRUE(is_precedence_feasible(dag, bsp));
    EXPECT_EQ(bsp.numSupersteps(), 1U);
    for (NodeId v = 2; v < 6; ++v)
        EXPECT_EQ(bsp.processor[v], bsp.processor[1]);
    EXPECT_EQ(bsp.order, (std::vector<NodeId>{1, 2, 3, 4, 5}));
}

TEST(GreedyBsp, IndependentNodesSpread) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId v = 1; v <= 8; ++v)
        edges.emplace_back(0, v);
    WeightedDag dag(std::vector<NodeWeights>(9, NodeWeights{1, 1}), edges);
    auto bsp = greedy_bsp_schedule(dag, Architecture{4, 10, 1, 5});
    ASSERT_TRUE(is_precedence_feasible(dag, bsp));
    EXPECT_EQ(bsp.numSupersteps(), 1U);
    std::vector<int> count(4, 0);
    for (NodeId v = 1; v <= 8; ++v)
        ++count[bsp.processor[v]];
    EXPECT_EQ(count, (std::vector<int>{2, 2, 2, 2}));
}

TEST(GreedyBsp, ZipperChainsSplitAcrossProcessors) {
    const std::uint32_t d = 4;
    const std::uint32_t m = 9;
    auto dag = zipper_dag(d, m);
    auto bsp = greedy_bsp_schedule(dag, Architecture{2, 6, 1, 0});
    ASSERT_TRUE(is_precedence_feasible(dag, bsp));
    for (std::uint32_t c = 0; c < 2; ++c)
        for (std::uint32_t i = 2; i <= m; ++i)
            EXPECT_EQ(bsp.processor[zipper_chain(d, m, 2, c, i)], bsp.processor[zipper_chain(d, m, 2, c, 1)]);
    EXPECT_NE(bsp.processor[zipper_chain(d, m, 2, 0, 1)], bsp.processor[zipper_chain(d, m, 2, 1, 1)]);
    EXPECT_EQ(bsp.numSupersteps(), 1U);
}

TEST(WorkStealing, ChainsAndDeterminism) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    // Source 0 feeds three chains of length 4.
    for (NodeId c = 0; c < 3; ++c) {
        edges.emplace_back(0, 1 + 4 * c);
        for (NodeId i = 0; i < 3; ++i)
            edges.emplace_back(1 + 4 * c + i, 2 + 4 * c + i);
    }
    WeightedDag dag(std::vector<NodeWeights>(13, NodeWeights{1, 1}), edges);
    auto a = work_stealing_schedule(dag, Architecture{3, 10, 1, 0}, 1);
    auto b = work_stealing_schedule(dag, Architecture{3, 10, 1, 0}, 1);
    ASSERT_TRUE(is_precedence_feasible(dag, a));
    EXPECT_EQ(a.processor, b.processor);
    EXPECT_EQ(a.superstep, b.superstep);
    EXPECT_EQ(a.order, b.order);
    std::set<std::uint32_t> used;
    for (NodeId v = 1; v < 13; ++v)
        used.insert(a.processor[v]);
    EXPECT_GE(used.size(), 2U);
}

TEST(Dfs, DiamondOrder) {
    auto bsp = dfs_schedule(test::diamond());
    EXPECT_EQ(bsp.order, (std::vector<NodeId>{1, 2, 3}));
    EXPECT_EQ(bsp.numSupersteps(), 1U);
    EXPECT_TRUE(is_precedence_feasible(test::diamond(), bsp));
}

TEST(FirstStage, AllBaselinesFeasible) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = random_instance(rng);
        for (auto kind : {BaselineKind::Greedy, BaselineKind::WorkStealing, BaselineKind::Dfs}) {
            TwoStageConfig cfg;
            cfg.baseline = kind;
            cfg.seed = trial;
            auto bsp = first_stage(inst, cfg);
            EXPECT_TRUE(is_precedence_feasible(inst.dag, bsp));
            auto back = bsp_from_csv(inst.dag, bsp.processors, bsp_to_csv(bsp));
            EXPECT_EQ(back.processor, bsp.processor);
            EXPECT_EQ(back.superstep, bsp.superstep);
            EXPECT_EQ(back.order, bsp.order);
        }
    }
}

// ============================================================================
// Splitting and cache policies
// ============================================================================

TEST(Split, ChainFitsOneSegment) {
    MbspInstance inst(test::chain(6), Architecture{1, 2, 1, 0});
    auto sk = split_into_mbsp_supersteps(inst, dfs_schedule(inst.dag));
    ASSERT_EQ(sk.steps.size(), 1U);
    EXPECT_EQ(sk.steps[0][0], (std::vector<NodeId>{1, 2, 3, 4, 5}));
}

TEST(Split, LateSourceForcesCut) {
    // 0 -> 1 -> 2 -> 3 with a second input 4 of node 3. Holding 4 from the segment start
    // leaves no room for node 2 (mu 3) when r = 5, so the phase is cut before node 3.
    WeightedDag dag({{1, 1}, {1, 1}, {1, 3}, {1, 0}, {1, 2}}, {{0, 1}, {1, 2}, {2, 3}, {4, 3}});
    MbspInstance loose(dag, Architecture{1, 7, 1, 0});
    EXPECT_EQ(split_into_mbsp_supersteps(loose, dfs_schedule(dag)).steps.size(), 1U);
    MbspInstance tight(dag, Architecture{1, 5, 1, 0});
    auto sk = split_into_mbsp_supersteps(tight, dfs_schedule(dag));
    ASSERT_EQ(sk.steps.size(), 2U);
    EXPECT_EQ(sk.steps[0][0], (std::vector<NodeId>{1, 2}));
    EXPECT_EQ(sk.steps[1][0], std::vector<NodeId>{3});
    auto s = apply_cache_policy(tight, sk, EvictionPolicy::Clairvoyant);
    EXPECT_TRUE(validate_schedule(tight, s).valid());
}

TEST(Split, InfeasibleCache) {
    MbspInstance inst(test::diamond(), Architecture{1, 2, 1, 0});
    EXPECT_THROW(split_into_mbsp_supersteps(inst, dfs_schedule(inst.dag)), InfeasibleError);
    EXPECT_THROW(two_stage_schedule(inst), InfeasibleError);
}

TEST(Policies, ValidOnRandomInstances) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        auto inst = random_instance(rng);
        for (auto kind : {BaselineKind::Greedy, BaselineKind::WorkStealing, BaselineKind::Dfs})
            for (auto pol : {EvictionPolicy::Clairvoyant, EvictionPolicy::Lru}) {
                TwoStageConfig cfg;
                cfg.baseline = kind;
                cfg.policy = pol;
                auto s = two_stage_schedule(inst, cfg);
                auto rep = validate_schedule(inst, s);
                ASSERT_TRUE(rep.valid()) << "trial " << trial << ": " << rep.violation->describe();
                if (inst.arch.L == 0) {
                    EXPECT_LE(async_cost(inst, s), sync_cost(inst, s));
                }
            }
    }
}

// Farthest-next-use minimizes reloads for unit weights; saves of evicted live values are not
// covered by that argument, so only the load cost is a property.
TEST(Policies, ClairvoyantLoadsNeverExceedLruUniformSingleProcessor) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 1000; ++trial) {
        auto dag = random_dag(4 + rng() % 40, 0.05 + 0.002 * static_cast<double>(rng() % 100), 5, 1, rng());
        MbspInstance inst(dag, Architecture{1, min_feasible_cache(dag) + static_cast<Weight>(rng() % 4), 1, 0});
        TwoStageConfig cfg;
        cfg.baseline = static_cast<BaselineKind>(rng() % 3);
        auto sk = split_into_mbsp_supersteps(inst, first_stage(inst, cfg));
        auto c = clairvoyant_policy(inst, sk);
        auto l = lru_policy(inst, sk);
        EXPECT_LE(load_cost(inst, c), load_cost(inst, l)) << "trial " << trial;
    }
}

TEST(Policies, SkeletonFittingInCacheMatchesAcrossPolicies) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        auto dag = random_dag(4 + rng() % 20, 0.2, 5, 3, rng());
        MbspInstance inst(dag, Architecture{1 + static_cast<std::uint32_t>(rng() % 3), dag.totalMu(), 1, 0});
        auto sk = split_into_mbsp_supersteps(inst, first_stage(inst, {}));
        EXPECT_TRUE(clairvoyant_policy(inst, sk) == lru_policy(inst, sk));
    }
}

TEST(Policies, LruReloadsWhatClairvoyantKeeps) {
    // One processor, r = 3, unit weights. Computing 4 evicts one of the sources 0 and 1: clairvoyant
    // drops 1 (next needed by 6), LRU drops 0 (tie on recency, lower index) and reloads it for 5.
    WeightedDag dag(std::vector<NodeWeights>(7, NodeWeights{1, 1}), {{0, 3}, {1, 3}, {2, 4}, {2, 5}, {0, 5}, {1, 6}});
    MbspInstance inst(dag, Architecture{1, 3, 1, 0});
    ComputeSkeleton sk;
    sk.steps = {{{3}}, {{4}}, {{5}}, {{6}}};
    auto c = clairvoyant_policy(inst, sk);
    auto l = lru_policy(inst, sk);
    ASSERT_TRUE(validate_schedule(inst, c).valid());
    ASSERT_TRUE(validate_schedule(inst, l).valid());
    EXPECT_LT(load_cost(inst, c), load_cost(inst, l));
    EXPECT_LT(io_cost(inst, c), io_cost(inst, l));
}

TEST(TwoStage, ZipperUsesTwoProcessors) {
    auto g = make_gadget(parse_gadget_spec("gadget:zipper:d=4,m=15"));
    MbspInstance inst(g.dag, g.arch);
    auto s = two_stage_schedule(inst);
    ASSERT_TRUE(validate_schedule(inst, s).valid());
    EXPECT_GE(sync_cost(inst, s), 15 + 2 * 15 + 4 - 1);
}
