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

#include "mbsp/dag.hpp"
#include "mbsp/gadgets.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace mbsp;

// ============================================================================
// Parsing and serialization
// ============================================================================

TEST(DagParse, ThreeNodeChain) {
    auto dag = parse_dag_string("3 2\n1 1\n1 1\n1 1\n0 1\n1 2\n");
    ASSERT_EQ(dag.size(), 3U);
    EXPECT_EQ(dag.edgeCount(), 2U);
    EXPECT_EQ(dag.parents(1), std::vector<NodeId>{0});
    EXPECT_EQ(dag.children(1), std::vector<NodeId>{2});
    for (NodeId v = 0; v < 3; ++v) {
        EXPECT_EQ(dag.omega(v), 1);
        EXPECT_EQ(dag.mu(v), 1);
    }
}

TEST(DagParse, CommentsAndLayoutAreIgnored) {
    auto dag = parse_dag_string("% header\n3 2\n\n1 1 1 1\n% weights\n1 1 0 1\n  1 2\n");
    EXPECT_EQ(serialize_dag(dag), "3 2\n1 1\n1 1\n1 1\n0 1\n1 2\n");
}

TEST(DagParse, SelfLoopRejected) {
    try {
        parse_dag_string("3 1\n1 1\n1 1\n1 1\n2 2\n");
        FAIL() << "self-loop accepted";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 5U);
        EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
    }
}

TEST(DagParse, Errors) {
    EXPECT_THROW(parse_dag_string("2 1\n1 1\n1 x\n0 1\n"), ParseError);
    EXPECT_THROW(parse_dag_string("2 1\n1 1\n1 -1\n0 1\n"), ParseError);
    EXPECT_THROW(parse_dag_string("2 1\n1 1\n1 1\n0 2\n"), ParseError);
    EXPECT_THROW(parse_dag_string("2 2\n1 1\n1 1\n0 1\n1 0\n"), DagError);
    EXPECT_THROW(parse_dag_string("2 2\n1 1\n1 1\n0 1\n0 1\n"), ParseError);
    EXPECT_THROW(parse_dag_string("2 1\n1 1\n1 1\n"), ParseError);
    EXPECT_THROW(parse_dag_string("2 0\n1 1\n1 1\n5\n"), ParseError);
}

TEST(DagParse, CycleReported) {
    try {
        parse_dag_string("3 3\n1 1\n1 1\n1 1\n0 1\n1 2\n2 0\n");
        FAIL();
    } catch (const DagError &e) {
        EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
    }
}

TEST(DagParse, RoundTripRandom) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto dag = random_dag(1 + rng() % 30, 0.2, 9, 9, rng());
        // Shuffle edge order and sprinkle comments: canonical form must not depend on either.
        auto edges = dag.edges();
        std::shuffle(edges.begin(), edges.end(), rng);
        std::string text = "% random\n" + std::to_string(dag.size()) + " " + std::to_string(edges.size()) + "\n";
        for (const auto &w : dag.weights())
            text += std::to_string(w.omega) + " " + std::to_string(w.mu) + "\n";
        for (const auto &[u, v] : edges)
            text += std::to_string(u) + " " + std::to_string(v) + "\n% edge\n";
        auto parsed = parse_dag_string(text);
        EXPECT_TRUE(parsed == dag);
        EXPECT_EQ(serialize_dag(parsed), serialize_dag(dag));
        EXPECT_EQ(serialize_dag(parse_dag_string(serialize_dag(parsed))), serialize_dag(parsed));
    }
}

// ============================================================================
// Structural queries
// ============================================================================

TEST(DagTopo, Examples) {
    EXPECT_EQ(topological_order(test::chain(3)), (std::vector<NodeId>{0, 1, 2}));
    EXPECT_EQ(topological_order(test::diamond()), (std::vector<NodeId>{0, 1, 2, 3}));
    auto rev = WeightedDag(std::vector<NodeWeights>(3, NodeWeights{1, 1}), {{2, 1}, {1, 0}});
    EXPECT_EQ(topological_order(rev), (std::vector<NodeId>{2, 1, 0}));
}

TEST(DagTopo, PermutationRespectingEdges) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto dag = random_dag(50, 0.1, 3, 3, seed);
        auto order = topological_order(dag);
        ASSERT_EQ(order.size(), 50U);
        std::vector<std::size_t> pos(50, 99);
        for (std::size_t i = 0; i < order.size(); ++i)
            pos[order[i]] = i;
        for (std::size_t v = 0; v < 50; ++v)
            ASSERT_LT(pos[v], 50U);
        for (const auto &[u, v] : dag.edges())
            EXPECT_LT(pos[u], pos[v]);
    }
}

TEST(DagR0, Examples) {
    EXPECT_EQ(min_feasible_cache(test::chain(3)), 2);
    auto dag = WeightedDag({{1, 2}, {1, 3}, {1, 1}, {1, 4}}, {{0, 3}, {1, 3}, {2, 3}});
    EXPECT_EQ(min_feasible_cache(dag), 10);
    EXPECT_EQ(min_feasible_cache(zipper_dag(5, 7)), 7);
    auto edgeless = WeightedDag({{1, 2}, {1, 6}, {1, 3}}, {});
    EXPECT_EQ(min_feasible_cache(edgeless), 6);
}

TEST(DagR0, BoundedByTotalMemory) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto dag = random_dag(20, 0.15, 5, 5, seed);
        EXPECT_LE(min_feasible_cache(dag), dag.totalMu());
    }
}

TEST(DagRandomWeights, DeterministicAndInRange) {
    auto dag = random_dag(40, 0.1, 3, 1, 3);
    auto a = assign_random_memory_weights(dag, 11);
    auto b = assign_random_memory_weights(dag, 11);
    EXPECT_TRUE(a == b);
    for (NodeId v = 0; v < dag.size(); ++v) {
        EXPECT_GE(a.mu(v), 1);
        EXPECT_LE(a.mu(v), 5);
        EXPECT_EQ(a.omega(v), dag.omega(v));
    }
    EXPECT_EQ(a.edges(), dag.edges());
}

TEST(DagRandomWeights, UniformFrequencies) {
    auto dag = WeightedDag(std::vector<NodeWeights>(100000, NodeWeights{1, 1}), {});
    auto a = assign_random_memory_weights(dag, 2024);
    std::map<Weight, std::size_t> freq;
    for (NodeId v = 0; v < dag.size(); ++v)
        ++freq[a.mu(v)];
    ASSERT_EQ(freq.size(), 5U);
    for (const auto &[value, count] : freq)
        EXPECT_NEAR(static_cast<double>(count) / 1e5, 0.2, 0.02) << "value " << value;
}

TEST(DagQuotient, Examples) {
    auto q = quotient_graph(WeightedDag({{1, 2}, {3, 4}, {5, 6}}, {{0, 1}, {1, 2}}), {0, 1, 1});
    ASSERT_EQ(q.size(), 2U);
    EXPECT_EQ(q.edges(), (std::vector<std::pair<NodeId, NodeId>>{{0, 1}}));
    EXPECT_EQ(q.omega(1), 8);
    EXPECT_EQ(q.mu(1), 10);

    auto all = quotient_graph(test::diamond(), {0, 0, 0, 0});
    ASSERT_EQ(all.size(), 1U);
    EXPECT_EQ(all.omega(0), 4);
    EXPECT_EQ(all.mu(0), 4);

    EXPECT_THROW(quotient_graph(test::chain(3), {0, 1, 0}), DagError);
}

TEST(DagQuotient, PreservesTotals) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto dag = random_dag(30, 0.1, 7, 5, seed);
        // Contiguous blocks of a topological order always give an acyclic quotient.
        auto order = topological_order(dag);
        std::vector<std::uint32_t> part(dag.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            part[order[i]] = static_cast<std::uint32_t>(i / 7);
        auto q = quotient_graph(dag, part);
        EXPECT_EQ(q.totalOmega(), dag.totalOmega());
        EXPECT_EQ(q.totalMu(), dag.totalMu());
    }
}

TEST(DagInduced, KeepsInternalEdgesOnly) {
    auto sub = induced_subgraph(test::diamond(), {1, 3});
    ASSERT_EQ(sub.size(), 2U);
    EXPECT_EQ(sub.edges(), (std::vector<std::pair<NodeId, NodeId>>{{0, 1}}));
}
