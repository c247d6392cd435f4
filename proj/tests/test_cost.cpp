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

#include <functional>
#include <map>
#include <random>

using namespace mbsp;
using test::make;
using K = TransitionKind;

namespace {

// Independent async evaluator: per-processor transition lists with memoized finishing times.
// Gamma(v) looks up the earliest superstep holding a save of v and takes the minimum there.
Weight reference_async(const MbspInstance &inst, const MbspSchedule &s) {
    struct Item {
        std::size_t step;
        Op op;
    };
    const std::uint32_t P = s.processors();
    std::vector<std::vector<Item>> seq(P);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < P; ++p)
            for (Phase ph : {Phase::Comp, Phase::Save, Phase::Del, Phase::Load})
                for (const Op &op : s.at(i, p).phase(ph))
                    seq[p].push_back({i, op});
    std::map<std::pair<std::uint32_t, std::size_t>, Weight> memo;
    std::function<Weight(std::uint32_t, std::size_t)> gamma = [&](std::uint32_t p, std::size_t k) -> Weight {
        auto key = std::make_pair(p, k);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        const Item &it = seq[p][k];
        Weight prev = k == 0 ? 0 : gamma(p, k - 1);
        Weight c = 0;
        switch (it.op.kind) {
        case K::Compute:
            c = inst.dag.omega(it.op.node);
            break;
        case K::Save:
        case K::Load:
            c = inst.arch.g * inst.dag.mu(it.op.node);
            break;
        case K::Delete:
            break;
        }
        if (it.op.kind == K::Load && !inst.dag.isSource(it.op.node)) {
            std::size_t first = SIZE_MAX;
            for (std::uint32_t q = 0; q < P; ++q)
                for (const Item &x : seq[q])
                    if (x.op.kind == K::Save && x.op.node == it.op.node)
                        first = std::min(first, x.step);
            Weight g = INT64_MAX;
            for (std::uint32_t q = 0; q < P; ++q)
                for (std::size_t j = 0; j < seq[q].size(); ++j)
                    if (seq[q][j].op.kind == K::Save && seq[q][j].op.node == it.op.node && seq[q][j].step == first)
                        g = std::min(g, gamma(q, j));
            prev = std::max(prev, g);
        }
        return memo[key] = prev + c;
    };
    Weight best = 0;
    for (std::uint32_t p = 0; p < P; ++p)
        if (!seq[p].empty())
            best = std::max(best, gamma(p, seq[p].size() - 1));
    return best;
}

// Transition-by-transition sync sum: per superstep, per processor phase totals, then maxima.
Weight reference_sync(const MbspInstance &inst, const MbspSchedule &s) {
    Weight total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        Weight mc = 0;
        Weight ms = 0;
        Weight ml = 0;
        for (std::uint32_t p = 0; p < s.processors(); ++p) {
            Weight c = 0;
            Weight sv = 0;
            Weight l = 0;
            for (const Op &op : s.at(i, p).comp)
                if (op.kind == K::Compute)
                    c += inst.dag.omega(op.node);
            for (const Op &op : s.at(i, p).save)
                sv += inst.arch.g * inst.dag.mu(op.node);
            for (const Op &op : s.at(i, p).load)
                l += inst.arch.g * inst.dag.mu(op.node);
            mc = std::max(mc, c);
            ms = std::max(ms, sv);
            ml = std::max(ml, l);
        }
        total += mc + ms + ml + inst.arch.L;
    }
    return total;
}

} // namespace

// ============================================================================
// Closed examples
// ============================================================================

TEST(SyncCost, TwoProcessorFormula) {
    // a (mu 0) feeds x (omega 3, mu 2) and y (omega 5, mu 1); b is an isolated source with mu 4.
    WeightedDag dag({{0, 0}, {3, 2}, {5, 1}, {0, 4}}, {{0, 1}, {0, 2}});
    MbspInstance inst(dag, Architecture{2, 10, 1, 10});
    inst.initialRed = {{0}, {0}};
    auto s = make(2, {{{0, Phase::Comp, K::Compute, 1}, {0, Phase::Save, K::Save, 1},
                       {1, Phase::Comp, K::Compute, 2}, {1, Phase::Save, K::Save, 2}, {1, Phase::Load, K::Load, 3}}});
    ASSERT_TRUE(validate_schedule(inst, s).valid());
    EXPECT_EQ(sync_cost(inst, s), 21);
    auto b = cost_breakdown(inst, s);
    ASSERT_EQ(b.supersteps.size(), 1U);
    EXPECT_EQ(b.supersteps[0].maxComp, 5);
    EXPECT_EQ(b.supersteps[0].maxSave, 2);
    EXPECT_EQ(b.supersteps[0].maxLoad, 4);
    EXPECT_EQ(b.toCsv(), "superstep,max_comp,max_save,max_load\n0,5,2,4\ntotal_sync,21\nfinish_p0,5\nfinish_p1,10\n"
                         "total_async,10\n");
}

TEST(SyncCost, EmptySchedule) {
    MbspInstance inst(WeightedDag({{1, 1}}, {}), Architecture{1, 1, 1, 10});
    EXPECT_EQ(sync_cost(inst, MbspSchedule(1)), 0);
    EXPECT_EQ(async_cost(inst, MbspSchedule(1)), 0);
}

TEST(AsyncCost, SequentialSum) {
    WeightedDag dag({{0, 0}, {2, 1}}, {{0, 1}});
    MbspInstance inst(dag, Architecture{1, 2, 1, 0});
    inst.initialRed = {{0}};
    auto s = make(1, {{{0, Phase::Comp, K::Compute, 1}, {0, Phase::Save, K::Save, 1}}});
    EXPECT_EQ(async_cost(inst, s), 3);
}

TEST(AsyncCost, LoadWaitsForGamma) {
    WeightedDag dag({{0, 0}, {5, 2}, {1, 1}}, {{0, 1}, {1, 2}});
    MbspInstance inst(dag, Architecture{2, 5, 1, 0});
    inst.initialRed = {{0}, {}};
    auto s = make(2, {{{0, Phase::Comp, K::Compute, 1}, {0, Phase::Save, K::Save, 1}, {1, Phase::Load, K::Load, 1}},
                      {{1, Phase::Comp, K::Compute, 2}, {1, Phase::Save, K::Save, 2}}});
    ASSERT_TRUE(validate_schedule(inst, s).valid());
    auto b = cost_breakdown(inst, s);
    EXPECT_EQ(b.finish[0], 7);
    // Load finishes at max(0, 7) + 2 = 9, then compute 1 and save 1.
    EXPECT_EQ(b.finish[1], 11);
    EXPECT_EQ(reference_async(inst, s), 11);
}

TEST(AsyncCost, GammaUsesEarliestSuperstep) {
    // Value 1 is saved by processor 0 in superstep 0 (at time 5) and by processor 1 in superstep 1
    // (at time 2): only the earliest superstep counts, so the load waits until 5.
    WeightedDag dag({{0, 0}, {1, 1}, {1, 1}, {3, 1}}, {{0, 1}, {1, 2}, {0, 3}});
    MbspInstance inst(dag, Architecture{3, 5, 1, 0});
    inst.initialRed = {{0}, {0}, {}};
    auto s = make(3, {{{0, Phase::Comp, K::Compute, 3}, {0, Phase::Comp, K::Compute, 1}, {0, Phase::Save, K::Save, 1},
                       {0, Phase::Save, K::Save, 3}},
                      {{1, Phase::Comp, K::Compute, 1}, {1, Phase::Save, K::Save, 1}, {2, Phase::Load, K::Load, 1}},
                      {{2, Phase::Comp, K::Compute, 2}, {2, Phase::Save, K::Save, 2}}});
    ASSERT_TRUE(validate_schedule(inst, s).valid());
    EXPECT_EQ(async_cost(inst, s), reference_async(inst, s));
    EXPECT_EQ(cost_breakdown(inst, s).finish[2], 5 + 1 + 1 + 1);
}

TEST(SyncCost, ZipperTwoStageMatchesIndependentSum) {
    const std::uint32_t d = 4;
    const std::uint32_t m = 21;
    Architecture arch{2, d + 2, 1, 0};
    MbspInstance inst(zipper_dag(d, m), arch);
    auto s = zipper_two_stage_schedule(d, m, arch);
    ASSERT_TRUE(validate_schedule(inst, s).valid());
    EXPECT_EQ(sync_cost(inst, s), reference_sync(inst, s));
    EXPECT_EQ(sync_cost(inst, s), m + (d * m + 1));
}

// ============================================================================
// Properties over generated schedules
// ============================================================================

TEST(CostProperties, AgreeWithReferenceEvaluators) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        MbspInstance inst(random_dag(5 + rng() % 25, 0.2, 4, 3, rng()), Architecture{1 + static_cast<std::uint32_t>(rng() % 4), 0,
                                                                                 static_cast<Weight>(rng() % 3), static_cast<Weight>(rng() % 5)});
        inst.arch.r = min_feasible_cache(inst.dag) + static_cast<Weight>(rng() % 4);
        TwoStageConfig cfg;
        cfg.baseline = static_cast<BaselineKind>(rng() % 3);
        cfg.policy = static_cast<EvictionPolicy>(rng() % 2);
        auto s = two_stage_schedule(inst, cfg);
        EXPECT_EQ(sync_cost(inst, s), reference_sync(inst, s));
        EXPECT_EQ(async_cost(inst, s), reference_async(inst, s));
    }
}

TEST(CostProperties, DeletesAreFreeAndOrderInsensitive) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MbspInstance inst(random_dag(20, 0.2, 4, 3, seed), Architecture{2, 0, 2, 3});
        inst.arch.r = min_feasible_cache(inst.dag) + 3;
        auto s = two_stage_schedule(inst);
        const Weight sc = sync_cost(inst, s);
        const Weight ac = async_cost(inst, s);
        auto t = s;
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::uint32_t p = 0; p < 2; ++p)
                std::reverse(t.at(i, p).del.begin(), t.at(i, p).del.end());
        ASSERT_TRUE(validate_schedule(inst, t).valid());
        EXPECT_EQ(sync_cost(inst, t), sc);
        EXPECT_EQ(async_cost(inst, t), ac);

        // Drop every value at the end of the schedule: legal and free.
        auto u = s;
        auto fin = final_configuration(inst, s);
        std::size_t last = u.addSuperstep();
        for (std::uint32_t p = 0; p < 2; ++p)
            for (NodeId v = 0; v < inst.dag.size(); ++v)
                if (fin.isRed(p, v))
                    u.at(last, p).del.push_back({K::Delete, v});
        ASSERT_TRUE(validate_schedule(inst, u).valid());
        EXPECT_EQ(sync_cost(inst, u), sc + inst.arch.L);
        EXPECT_EQ(async_cost(inst, u), ac);
    }
}

TEST(CostProperties, Homogeneity) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto dag = random_dag(18, 0.2, 4, 3, seed);
        MbspInstance inst(dag, Architecture{2, min_feasible_cache(dag) + 2, 1, 4});
        auto s = two_stage_schedule(inst);
        const Weight k = 3;
        std::vector<NodeWeights> w = dag.weights();
        for (auto &x : w) {
            x.omega *= k;
            x.mu *= k;
        }
        MbspInstance scaled(WeightedDag(w, dag.edges()), Architecture{2, inst.arch.r * k, 1, 4 * k});
        ASSERT_TRUE(validate_schedule(scaled, s).valid());
        EXPECT_EQ(sync_cost(scaled, s), k * sync_cost(inst, s));
        EXPECT_EQ(async_cost(scaled, s), k * async_cost(inst, s));
    }
}
