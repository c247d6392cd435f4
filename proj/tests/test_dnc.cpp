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
#include "mbsp/dnc.hpp"
#include "mbsp/two_stage.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace mbsp;
using mbsp::test::chain;

namespace {

std::optional<SolverConfig> solver_or_skip() {
    if (default_solver_command().empty())
        return std::nullopt;
    SolverConfig c;
    c.timeLimit = 20;
    return c;
}

bool quotient_acyclic(const WeightedDag &dag, const AcyclicPartition &p) {
    try {
        quotient_graph(dag, p.part);
        return true;
    } catch (const DagError &) {
        return false;
    }
}

std::size_t count_loads(const MbspSchedule &s, std::optional<NodeId> node = std::nullopt) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < s.processors(); ++p)
            for (const Op &op : s.at(i, p).load)
                c += !node || op.node == *node ? 1 : 0;
    return c;
}

WeightedDag two_chains(std::size_t len) {
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId i = 0; i + 1 < len; ++i) {
        e.emplace_back(i, i + 1);
        e.emplace_back(static_cast<NodeId>(len + i), static_cast<NodeId>(len + i + 1));
    }
    return WeightedDag(std::vector<NodeWeights>(2 * len, NodeWeights{1, 1}), e);
}

} // namespace

TEST(Bipartition, PrefixSplitOnChain) {
    const auto b = topological_prefix_split(chain(6));
    EXPECT_EQ(b.cut, 1U);
    EXPECT_TRUE(b.fallback);
    EXPECT_THROW(topological_prefix_split(chain(1)), std::invalid_argument);
    EXPECT_THROW(topological_prefix_split(chain(4), 0.6), std::invalid_argument);
}

TEST(Bipartition, IlpChainAndComponents) {
    const auto solver = solver_or_skip();
    if (!solver)
        GTEST_SKIP() << "no MILP solver configured";
    const auto c = acyclic_bipartition_ilp(chain(6), 1.0 / 3.0, solver);
    EXPECT_EQ(c.cut, 1U);
    EXPECT_FALSE(c.fallback);
    const WeightedDag two = two_chains(4);
    const auto t = acyclic_bipartition_ilp(two, 1.0 / 3.0, solver);
    EXPECT_EQ(t.cut, 0U);
    EXPECT_EQ(t.partition.part[0], t.partition.part[3]);
    EXPECT_NE(t.partition.part[0], t.partition.part[4]);
}

TEST(Bipartition, IlpNeverCutsMoreThanPrefix) {
    const auto solver = solver_or_skip();
    if (!solver)
        GTEST_SKIP() << "no MILP solver configured";
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto dag = random_dag(40, 0.08, 3, 3, seed);
        const auto ilp = acyclic_bipartition_ilp(dag, 1.0 / 3.0, solver);
        EXPECT_LE(ilp.cut, topological_prefix_split(dag).cut);
        EXPECT_TRUE(quotient_acyclic(dag, ilp.partition));
        const auto sizes = ilp.partition.members();
        EXPECT_GE(sizes[0].size(), 14U);
        EXPECT_GE(sizes[1].size(), 14U);
    }
}

TEST(RecursivePartition, SmallDagIsOnePart) {
    const auto p = recursive_partition(random_dag(50, 0.1, 2, 2, 3));
    EXPECT_EQ(p.parts, 1U);
}

TEST(RecursivePartition, LongChainSplitsContiguously) {
    std::vector<Bipartition> log;
    const auto p = recursive_partition(chain(200), 60, std::nullopt, &log);
    EXPECT_GE(p.parts, 4U);
    for (const auto &m : p.members())
        EXPECT_LE(m.size(), 60U);
    for (NodeId v = 0; v + 1 < 200; ++v)
        EXPECT_LE(p.part[v], p.part[v + 1]);
    for (const Bipartition &b : log) {
        const std::size_t n = b.partition.part.size();
        for (const auto &side : b.partition.members()) {
            EXPECT_GE(side.size(), (n + 2) / 3);
            EXPECT_LE(side.size(), 2 * n / 3);
        }
    }
}

TEST(RecursivePartition, PropertyRandomDags) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 80 + rng() % 150;
        const auto dag = random_dag(n, 2.5 / static_cast<double>(n), 4, 4, rng());
        const auto p = recursive_partition(dag, 30);
        EXPECT_TRUE(quotient_acyclic(dag, p));
        for (const auto &m : p.members()) {
            EXPECT_FALSE(m.empty());
            EXPECT_LE(m.size(), 30U);
        }
        // Parts are numbered topologically: every edge goes forward.
        for (const auto &[u, v] : dag.edges())
            EXPECT_LE(p.part[u], p.part[v]);
    }
}

TEST(PartitionCsv, RoundTripAndErrors) {
    AcyclicPartition p{{0, 0, 1, 2, 1}, 3};
    std::stringstream ss;
    write_partition_csv(ss, p);
    EXPECT_EQ(ss.str(), "node,part\n0,0\n1,0\n2,1\n3,2\n4,1\n");
    const auto back = read_partition_csv(ss);
    EXPECT_EQ(back.part, p.part);
    EXPECT_EQ(back.parts, 3U);
    std::istringstream gap("node,part\n0,0\n2,1\n");
    EXPECT_THROW(read_partition_csv(gap), ParseError);
    std::istringstream junk("0;1\n");
    EXPECT_THROW(read_partition_csv(junk), ParseError);
}

TEST(QuotientPlan, ChainUsesAllProcessors) {
    const auto plan = quotient_plan(chain(4, 6), Architecture{3, 10, 1, 1});
    for (std::uint32_t k = 0; k < 4; ++k) {
        EXPECT_EQ(plan[k].processors, (std::vector<std::uint32_t>{0, 1, 2}));
        EXPECT_EQ(plan[k].order, k);
        EXPECT_EQ(plan[k].finish - plan[k].start, 2);
    }
}

TEST(QuotientPlan, ParallelPartsShareEvenly) {
    const WeightedDag q(std::vector<NodeWeights>(2, NodeWeights{8, 1}), {});
    const auto plan = quotient_plan(q, Architecture{4, 10, 1, 1});
    EXPECT_EQ(plan[0].processors, (std::vector<std::uint32_t>{0, 1}));
    EXPECT_EQ(plan[1].processors, (std::vector<std::uint32_t>{2, 3}));
    EXPECT_EQ(plan[0].finish, 4);
}

TEST(QuotientPlan, ConcurrentPartsAreDisjoint) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = random_dag(3 + rng() % 10, 0.2, 9, 1, rng());
        const auto plan = quotient_plan(q, Architecture{1 + static_cast<std::uint32_t>(rng() % 4), 10, 1, 1});
        for (NodeId a = 0; a < q.size(); ++a) {
            EXPECT_FALSE(plan[a].processors.empty());
            for (NodeId u : q.parents(a))
                EXPECT_GE(plan[a].start, plan[u].finish);
            for (NodeId b = a + 1; b < q.size(); ++b) {
                const bool overlap = plan[a].start < plan[b].finish && plan[b].start < plan[a].finish;
                if (!overlap)
                    continue;
                for (std::uint32_t p : plan[a].processors)
                    EXPECT_EQ(std::count(plan[b].processors.begin(), plan[b].processors.end(), p), 0);
            }
        }
    }
}

TEST(Subproblem, RequiredBluesAreCrossingNodes) {
    MbspInstance inst(chain(6), Architecture{1, 2, 1, 0});
    const AcyclicPartition p{{0, 0, 0, 1, 1, 1}, 2};
    const auto first = make_subproblem(inst, p, 0, {0}, {{}});
    EXPECT_EQ(first.boundaryInputs, 0U);
    EXPECT_EQ(first.instance.requiredBlue, (std::vector<NodeId>{2}));
    const auto second = make_subproblem(inst, p, 1, {0}, {{2, 1}});
    EXPECT_EQ(second.global, (std::vector<NodeId>{2, 3, 4, 5}));
    EXPECT_EQ(second.instance.initialRed[0], (std::vector<NodeId>{0}));
    EXPECT_TRUE(second.instance.dag.isSource(0));
    EXPECT_EQ(second.instance.requiredBlue, (std::vector<NodeId>{3}));
}

TEST(Concatenate, SinglePartIsThePlainPipeline) {
    MbspInstance inst(random_dag(30, 0.15, 3, 3, 8), Architecture{3, 0, 2, 4});
    inst.arch.r = min_feasible_cache(inst.dag) + 2;
    DncConfig cfg;
    cfg.useSolver = false;
    const auto r = divide_and_conquer(inst, cfg);
    EXPECT_EQ(r.partition.parts, 1U);
    MbspSchedule plain = two_stage_schedule(inst);
    plain.removeEmptySupersteps();
    EXPECT_EQ(r.naive, plain);
}

// s feeds a and c; part 1 ({b}) does not need s, so the boundary drops it and part 2 reloads it.
TEST(Streamline, CancelsBoundaryDeleteAndReload) {
    MbspInstance inst(WeightedDag(std::vector<NodeWeights>(4, NodeWeights{1, 1}), {{0, 1}, {1, 2}, {2, 3}, {0, 3}}),
                      Architecture{1, 10, 2, 0});
    const AcyclicPartition p{{0, 0, 1, 2}, 3};
    DncConfig cfg;
    cfg.useSolver = false;
    const auto plan = quotient_plan(quotient_graph(inst.dag, p.part), inst.arch);
    const auto subs = solve_subproblems(inst, p, plan, cfg);
    for (const SubResult &s : subs)
        EXPECT_TRUE(validate_schedule(s.spec.instance, s.schedule).valid());
    const auto naive = concatenate(inst, subs);
    ASSERT_TRUE(validate_schedule(inst, naive).valid());
    const auto lean = streamline(inst, naive);
    ASSERT_TRUE(validate_schedule(inst, lean).valid());
    EXPECT_EQ(count_loads(naive, 0), 2U);
    EXPECT_EQ(count_loads(lean, 0), 1U);
    EXPECT_LT(count_loads(lean), count_loads(naive));
    EXPECT_LT(schedule_cost(inst, lean, Objective::Sync), schedule_cost(inst, naive, Objective::Sync));
}

TEST(DivideAndConquer, PropertyValidAndStreamlinedNoWorse) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 100 + rng() % 120;
        auto dag = random_dag(n, 3.0 / static_cast<double>(n), 5, 4, rng());
        Architecture arch{1 + static_cast<std::uint32_t>(rng() % 4), 0, 1 + static_cast<Weight>(rng() % 3),
                          static_cast<Weight>(rng() % 10)};
        arch.r = 3 * min_feasible_cache(dag);
        const MbspInstance inst(std::move(dag), arch);
        DncConfig cfg;
        cfg.useSolver = false;
        cfg.maxPart = 40;
        const auto r = divide_and_conquer(inst, cfg);
        for (const SubResult &s : r.subs)
            EXPECT_TRUE(validate_schedule(s.spec.instance, s.schedule).valid());
        EXPECT_TRUE(validate_schedule(inst, r.schedule).valid());
        EXPECT_LE(schedule_cost(inst, r.schedule, Objective::Sync), schedule_cost(inst, r.naive, Objective::Sync));
        std::ostringstream report;
        write_dnc_report(report, inst, r);
        const std::string text = report.str();
        EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), r.subs.size() + 1);
    }
}
