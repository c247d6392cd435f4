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

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace mbsp {

ParseError::ParseError(std::size_t line, const std::string &what)
    : DagError("line " + std::to_string(line) + ": " + what), line_(line) {}

WeightedDag::WeightedDag(std::vector<NodeWeights> weights, const std::vector<std::pair<NodeId, NodeId>> &edges)
    : weights_(std::move(weights)), parents_(weights_.size()), children_(weights_.size()) {
    const std::size_t n = weights_.size();
    for (std::size_t v = 0; v < n; ++v) {
        if (weights_[v].omega < 0 || weights_[v].mu < 0)
            throw DagError("negative weight on node " + std::to_string(v));
    }
    for (const auto &[u, v] : edges) {
        if (u >= n || v >= n)
            throw DagError("edge endpoint out of range: " + std::to_string(u) + " " + std::to_string(v));
        if (u == v)
            throw DagError("self-loop on node " + std::to_string(u));
        children_[u].push_back(v);
        parents_[v].push_back(u);
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(children_[v].begin(), children_[v].end());
        std::sort(parents_[v].begin(), parents_[v].end());
        if (std::adjacent_find(children_[v].begin(), children_[v].end()) != children_[v].end())
            throw DagError("duplicate edge from node " + std::to_string(v));
    }
    edgeCount_ = edges.size();
    if (topological_order(*this).size() != n)
        throw DagError("cycle detected");
}

std::vector<NodeId> WeightedDag::sources() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
        if (isSource(v))
            out.push_back(v);
    return out;
}

std::vector<NodeId> WeightedDag::sinks() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
        if (isSink(v))
            out.push_back(v);
    return out;
}

std::vector<std::pair<NodeId, NodeId>> WeightedDag::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edgeCount_);
    for (NodeId u = 0; u < size(); ++u)
        for (NodeId v : children_[u])
            out.emplace_back(u, v);
    return out;
}

Weight WeightedDag::totalOmega() const {
    Weight s = 0;
    for (const auto &w : weights_)
        s += w.omega;
    return s;
}

Weight WeightedDag::totalMu() const {
    Weight s = 0;
    for (const auto &w : weights_)
        s += w.mu;
    return s;
}

bool WeightedDag::operator==(const WeightedDag &other) const {
    if (size() != other.size() || children_ != other.children_)
        return false;
    for (std::size_t v = 0; v < size(); ++v)
        if (weights_[v].omega != other.weights_[v].omega || weights_[v].mu != other.weights_[v].mu)
            return false;
    return true;
}

void Architecture::check() const {
    if (P < 1)
        throw std::invalid_argument("architecture needs at least one processor");
    if (r < 0 || g < 0 || L < 0)
        throw std::invalid_argument("architecture parameters must be non-negative");
}

namespace {

// Whitespace tokenizer over non-comment lines that remembers each token's line.
class TokenStream {
  public:
    explicit TokenStream(std::istream &in) {
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            std::size_t first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%')
                continue;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok)
                tokens_.emplace_back(tok, lineNo);
            lastLine_ = lineNo;
        }
    }

    std::int64_t next(const char *what) {
        if (pos_ >= tokens_.size())
            throw ParseError(lastLine_ + 1, std::string("unexpected end of input, expected ") + what);
        const auto &[tok, line] = tokens_[pos_++];
        std::size_t used = 0;
        long long value = 0;
        try {
            value = std::stoll(tok, &used);
        } catch (const std::exception &) {
            throw ParseError(line, "expected integer " + std::string(what) + ", got '" + tok + "'");
        }
        if (used != tok.size())
            throw ParseError(line, "expected integer " + std::string(what) + ", got '" + tok + "'");
        return value;
    }

    std::size_t line() const { return pos_ == 0 ? 1 : tokens_[pos_ - 1].second; }

    void expectEnd() const {
        if (pos_ != tokens_.size())
            throw ParseError(tokens_[pos_].second, "trailing token '" + tokens_[pos_].first + "'");
    }

  private:
    std::vector<std::pair<std::string, std::size_t>> tokens_;
    std::size_t pos_ = 0;
    std::size_t lastLine_ = 0;
};

} // namespace

WeightedDag parse_dag(std::istream &in) {
    TokenStream ts(in);
    const std::int64_t n = ts.next("node count");
    const std::int64_t m = ts.next("edge count");
    if (n <= 0)
        throw ParseError(ts.line(), "node count must be positive");
    if (m < 0)
        throw ParseError(ts.line(), "edge count must be non-negative");
    std::vector<NodeWeights> weights(static_cast<std::size_t>(n));
    for (auto &w : weights) {
        w.omega = ts.next("compute weight");
        w.mu = ts.next("memory weight");
        if (w.omega < 0 || w.mu < 0)
            throw ParseError(ts.line(), "negative weight");
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t u = ts.next("edge source");
        const std::int64_t v = ts.next("edge target");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ParseError(ts.line(), "edge endpoint out of range");
        if (u == v)
            throw ParseError(ts.line(), "self-loop on node " + std::to_string(u));
        if (!seen.emplace(u, v).second)
            throw ParseError(ts.line(), "duplicate edge");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    ts.expectEnd();
    return WeightedDag(std::move(weights), edges);
}

WeightedDag parse_dag_string(const std::string &text) {
    std::istringstream in(text);
    return parse_dag(in);
}

WeightedDag read_dag_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DagError("cannot open " + path);
    return parse_dag(in);
}

std::string serialize_dag(const WeightedDag &dag) {
    std::ostringstream out;
    out << dag.size() << ' ' << dag.edgeCount() << '\n';
    for (const auto &w : dag.weights())
        out << w.omega << ' ' << w.mu << '\n';
    for (const auto &[u, v] : dag.edges())
        out << u << ' ' << v << '\n';
    return out.str();
}

void write_dag_file(const WeightedDag &dag, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw DagError("cannot write " + path);
    out << serialize_dag(dag);
}

std::vector<NodeId> topological_order(const WeightedDag &dag) {
    std::vector<std::size_t> indeg(dag.size());
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < dag.size(); ++v) {
        indeg[v] = dag.parents(v).size();
        if (indeg[v] == 0)
            ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(dag.size());
    while (!ready.empty()) {
        NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (NodeId c : dag.children(u))
            if (--indeg[c] == 0)
                ready.push(c);
    }
    return order;
}

Weight min_feasible_cache(const WeightedDag &dag) {
    Weight best = 0;
    bool anyNonSource = false;
    for (NodeId v = 0; v < dag.size(); ++v) {
        if (dag.isSource(v))
            continue;
        anyNonSource = true;
        Weight f = dag.mu(v);
        for (NodeId u : dag.parents(v))
            f += dag.mu(u);
        best = std::max(best, f);
    }
    if (!anyNonSource)
        for (NodeId v = 0; v < dag.size(); ++v)
            best = std::max(best, dag.mu(v));
    return best;
}

WeightedDag assign_random_memory_weights(const WeightedDag &dag, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Weight> draw(1, 5);
    std::vector<NodeWeights> w = dag.weights();
    for (auto &x : w)
        x.mu = draw(rng);
    return WeightedDag(std::move(w), dag.edges());
}

WeightedDag quotient_graph(const WeightedDag &dag, const std::vector<std::uint32_t> &part) {
    if (part.size() != dag.size())
        throw DagError("partition does not cover all nodes");
    std::uint32_t k = 0;
    for (auto p : part)
        k = std::max(k, p + 1);
    std::vector<NodeWeights> w(k);
    for (NodeId v = 0; v < dag.size(); ++v) {
        w[part[v]].omega += dag.omega(v);
        w[part[v]].mu += dag.mu(v);
    }
    std::set<std::pair<NodeId, NodeId>> qe;
    for (const auto &[u, v] : dag.edges()) {
        if (part[u] == part[v])
            continue;
        qe.emplace(part[u], part[v]);
    }
    try {
        return WeightedDag(std::move(w), std::vector<std::pair<NodeId, NodeId>>(qe.begin(), qe.end()));
    } catch (const DagError &e) {
        throw DagError(std::string("quotient graph invalid: ") + e.what());
    }
}

WeightedDag induced_subgraph(const WeightedDag &dag, const std::vector<NodeId> &nodes) {
    std::map<NodeId, NodeId> local;
    std::vector<NodeWeights> w;
    for (NodeId v : nodes) {
        local.emplace(v, static_cast<NodeId>(w.size()));
        w.push_back(dag.weights()[v]);
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId v : nodes)
        for (NodeId c : dag.children(v)) {
            auto it = local.find(c);
            if (it != local.end())
                edges.emplace_back(local.at(v), it->second);
        }
    return WeightedDag(std::move(w), edges);
}

WeightedDag random_dag(std::size_t n, double edgeProbability, Weight omegaMax, Weight muMax, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Weight> om(1, std::max<Weight>(1, omegaMax));
    std::uniform_int_distribution<Weight> mm(1, std::max<Weight>(1, muMax));
    std::bernoulli_distribution coin(edgeProbability);
    std::vector<NodeWeights> w(n);
    for (auto &x : w) {
        x.omega = om(rng);
        x.mu = mm(rng);
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId j = 1; j < n; ++j)
        for (NodeId i = 0; i < j; ++i)
            if (coin(rng))
                edges.emplace_back(i, j);
    return WeightedDag(std::move(w), edges);
}

} // namespace mbsp
