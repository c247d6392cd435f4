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

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbsp {

using NodeId = std::uint32_t;
using Weight = std::int64_t;

class DagError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parse failure carrying the 1-based line number of the offending token.
class ParseError : public DagError {
  public:
    ParseError(std::size_t line, const std::string &what);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

struct NodeWeights {
    Weight omega = 0;
    Weight mu = 0;
};

/**
 * @brief Immutable computational DAG with compute weight omega and memory weight mu per node.
 *
 * Adjacency lists are sorted by node index. Construction rejects cycles, self-loops,
 * duplicate edges, negative weights and out-of-range endpoints.
 */
class WeightedDag {
  public:
    WeightedDag() = default;
    WeightedDag(std::vector<NodeWeights> weights, const std::vector<std::pair<NodeId, NodeId>> &edges);

    std::size_t size() const { return weights_.size(); }
    std::size_t edgeCount() const { return edgeCount_; }

    Weight omega(NodeId v) const { return weights_[v].omega; }
    Weight mu(NodeId v) const { return weights_[v].mu; }
    const std::vector<NodeWeights> &weights() const { return weights_; }

    const std::vector<NodeId> &parents(NodeId v) const { return parents_[v]; }
    const std::vector<NodeId> &children(NodeId v) const { return children_[v]; }

    bool isSource(NodeId v) const { return parents_[v].empty(); }
    bool isSink(NodeId v) const { return children_[v].empty(); }

    std::vector<NodeId> sources() const;
    std::vector<NodeId> sinks() const;

    /// Edges sorted lexicographically by (u, v).
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    Weight totalOmega() const;
    Weight totalMu() const;

    bool operator==(const WeightedDag &other) const;

  private:
    std::vector<NodeWeights> weights_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::size_t edgeCount_ = 0;
};

struct Architecture {
    std::uint32_t P = 1;
    Weight r = 0;
    Weight g = 1;
    Weight L = 10;

    void check() const;
};

WeightedDag parse_dag(std::istream &in);
WeightedDag parse_dag_string(const std::string &text);
WeightedDag read_dag_file(const std::string &path);

/// Canonical text form: header, weight lines, edges in sorted order, no comments.
std::string serialize_dag(const WeightedDag &dag);
void write_dag_file(const WeightedDag &dag, const std::string &path);

/// Kahn's algorithm; among ready nodes the smallest index goes first.
std::vector<NodeId> topological_order(const WeightedDag &dag);

/// Largest footprint of a non-source node plus its parents; max source mu on edgeless DAGs.
Weight min_feasible_cache(const WeightedDag &dag);

/// Replaces every mu with a uniform draw from {1,..,5}; omega is untouched.
WeightedDag assign_random_memory_weights(const WeightedDag &dag, std::uint64_t seed);

/// One node per part with summed weights; throws DagError when the quotient has a cycle.
WeightedDag quotient_graph(const WeightedDag &dag, const std::vector<std::uint32_t> &part);

/// Subgraph induced by `nodes` (kept in the given order); edges leaving the set are dropped.
WeightedDag induced_subgraph(const WeightedDag &dag, const std::vector<NodeId> &nodes);

/// Seeded random DAG on n nodes: edge (i, j) for i < j with probability p, weights drawn from the given ranges.
WeightedDag random_dag(std::size_t n, double edgeProbability, Weight omegaMax, Weight muMax, std::uint64_t seed);

} // namespace mbsp
