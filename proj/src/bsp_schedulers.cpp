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

#include "mbsp/two_stage.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace mbsp {

namespace {
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
}

std::uint32_t BspSchedule::numSupersteps() const {
    std::uint32_t k = 0;
    for (NodeId v : order)
        k = std::max(k, superstep[v] + 1);
    return k;
}

bool is_precedence_feasible(const WeightedDag &dag, const BspSchedule &bsp) {
    std::size_t computed = 0;
    std::vector<std::size_t> pos(dag.size(), kNone);
    for (std::size_t i = 0; i < bsp.order.size(); ++i) {
        NodeId v = bsp.order[i];
        if (v >= dag.size() || dag.isSource(v) || pos[v] != kNone || bsp.processor[v] >= bsp.processors)
            return false;
        pos[v] = i;
        ++computed;
    }
    if (computed + dag.sources().size() != dag.size())
        return false;
    for (const auto &[u, v] : dag.edges()) {
        if (dag.isSource(u))
            continue;
        if (bsp.superstep[u] > bsp.superstep[v] || pos[u] > pos[v])
            return false;
        if (bsp.superstep[u] == bsp.superstep[v] && bsp.processor[u] != bsp.processor[v])
            return false;
    }
    return true;
}

BspSchedule greedy_bsp_schedule(const WeightedDag &dag, const Architecture &arch, const GreedyBspConfig &cfg) {
    const std::uint32_t P = arch.P;
    const std::size_t n = dag.size();
    BspSchedule out;
    out.processors = P;
    out.processor.assign(n, 0);
    out.superstep.assign(n, 0);

    std::vector<std::uint32_t> proc(n, kNone);
    std::vector<std::uint32_t> step(n, kNone);
    std::vector<std::size_t> missing(n, 0);
    std::set<NodeId> ready;
    std::size_t todo = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (dag.isSource(v))
            continue;
        ++todo;
        for (NodeId u : dag.parents(v))
            if (!dag.isSource(u))
                ++missing[v];
        if (missing[v] == 0)
            ready.insert(v);
    }

    std::uint32_t s = 0;
    std::vector<Weight> load(P, 0);
    while (todo > 0) {
        // Processor a ready node is pinned to by parents computed in this superstep; kNone = free.
        struct Cand {
            NodeId v;
            std::uint32_t pin;
        };
        std::vector<Cand> cands;
        std::vector<std::size_t> pinnedCount(P, 0);
        for (NodeId v : ready) {
            std::uint32_t pin = kNone;
            bool blocked = false;
            for (NodeId u : dag.parents(v)) {
                if (dag.isSource(u) || step[u] != s)
                    continue;
                if (pin == kNone)
                    pin = proc[u];
                else if (pin != proc[u])
                    blocked = true;
            }
            if (blocked)
                continue;
            cands.push_back({v, pin});
            if (pin != kNone)
                ++pinnedCount[pin];
        }
        bool anyFree = std::any_of(cands.begin(), cands.end(), [](const Cand &c) { return c.pin == kNone; });

        bool close = cands.empty();
        if (!close && !anyFree) {
            for (std::uint32_t p = 0; p < P && !close; ++p) {
                if (pinnedCount[p] > 0)
                    continue;
                for (std::uint32_t q = 0; q < P; ++q)
                    if (pinnedCount[q] >= 2 && static_cast<double>(load[q]) > cfg.imbalance * static_cast<double>(load[p]))
                        close = true;
            }
        }
        if (close) {
            ++s;
            std::fill(load.begin(), load.end(), 0);
            continue;
        }

        std::tuple<Weight, NodeId, std::uint32_t> best{std::numeric_limits<Weight>::max(), 0, 0};
        for (const Cand &c : cands) {
            for (std::uint32_t p = 0; p < P; ++p) {
                if (c.pin != kNone && c.pin != p)
                    continue;
                Weight comm = 0;
                for (NodeId u : dag.parents(c.v))
                    if (!dag.isSource(u) && proc[u] != p)
                        comm += dag.mu(u);
                best = std::min(best, std::make_tuple(load[p] + dag.omega(c.v) + arch.g * comm, c.v, p));
            }
        }
        const auto [key, v, p] = best;
        proc[v] = p;
        step[v] = s;
        load[p] += dag.omega(v);
        out.order.push_back(v);
        ready.erase(v);
        --todo;
        for (NodeId c : dag.children(v))
            if (--missing[c] == 0)
                ready.insert(c);
    }
    for (NodeId v : out.order) {
        out.processor[v] = proc[v];
        out.superstep[v] = step[v];
    }
    return out;
}

BspSchedule work_stealing_schedule(const WeightedDag &dag, const Architecture &arch, std::uint64_t seed) {
    const std::uint32_t P = arch.P;
    const std::size_t n = dag.size();
    std::vector<std::deque<NodeId>> deques(P);
    std::vector<std::size_t> missing(n, 0);
    for (NodeId v = 0; v < n; ++v) {
        if (dag.isSource(v))
            continue;
        for (NodeId u : dag.parents(v))
            if (!dag.isSource(u))
                ++missing[v];
        if (missing[v] == 0)
            deques[0].push_back(v);
    }

    struct Started {
        Weight start;
        std::uint32_t worker;
        NodeId v;
    };
    std::vector<Started> started;
    std::vector<NodeId> running(P, kNone);
    std::vector<std::uint32_t> victimCursor(P);
    for (std::uint32_t w = 0; w < P; ++w)
        victimCursor[w] = static_cast<std::uint32_t>((w + 1 + seed) % P);
    using Event = std::pair<Weight, std::uint32_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> finishing;
    std::vector<std::uint32_t> owner(n, kNone);

    auto dispatch = [&](Weight now) {
        for (std::uint32_t w = 0; w < P; ++w) {
            if (running[w] != kNone || deques[w].empty())
                continue;
            running[w] = deques[w].back();
            deques[w].pop_back();
        }
        for (std::uint32_t w = 0; w < P; ++w) {
            if (running[w] != kNone)
                continue;
            for (std::uint32_t k = 0; k < P; ++k) {
                std::uint32_t victim = (victimCursor[w] + k) % P;
                if (victim == w || deques[victim].empty())
                    continue;
                running[w] = deques[victim].front();
                deques[victim].pop_front();
                victimCursor[w] = (victim + 1) % P;
                break;
            }
        }
        for (std::uint32_t w = 0; w < P; ++w) {
            NodeId v = running[w];
            if (v == kNone || owner[v] != kNone)
                continue;
            owner[v] = w;
            started.push_back({now, w, v});
            finishing.emplace(now + dag.omega(v), w);
        }
    };

    dispatch(0);
    while (!finishing.empty()) {
        const Weight now = finishing.top().first;
        while (!finishing.empty() && finishing.top().first == now) {
            const std::uint32_t w = finishing.top().second;
            finishing.pop();
            NodeId v = running[w];
            running[w] = kNone;
            for (NodeId c : dag.children(v))
                if (--missing[c] == 0)
                    deques[w].push_back(c);
        }
        dispatch(now);
    }

    BspSchedule out;
    out.processors = P;
    out.processor.assign(n, 0);
    out.superstep.assign(n, 0);
    std::stable_sort(started.begin(), started.end(), [](const Started &a, const Started &b) {
        return std::tie(a.start, a.worker) < std::tie(b.start, b.worker);
    });
    std::vector<std::uint32_t> lastStep(P, 0);
    for (const Started &st : started) {
        std::uint32_t s = lastStep[st.worker];
        for (NodeId u : dag.parents(st.v))
            if (!dag.isSource(u))
                s = std::max(s, out.superstep[u] + (out.processor[u] != st.worker ? 1U : 0U));
        out.processor[st.v] = st.worker;
        out.superstep[st.v] = s;
        lastStep[st.worker] = s;
        out.order.push_back(st.v);
    }
    return out;
}

BspSchedule dfs_schedule(const WeightedDag &dag) {
    const std::size_t n = dag.size();
    BspSchedule out;
    out.processors = 1;
    out.processor.assign(n, 0);
    out.superstep.assign(n, 0);
    std::vector<std::uint8_t> visited(n, 0);
    for (NodeId sink : dag.sinks()) {
        if (dag.isSource(sink) || visited[sink])
            continue;
        // Iterative post-order over parents, visited in index order.
        std::vector<std::pair<NodeId, std::size_t>> stack{{sink, 0}};
        visited[sink] = 1;
        while (!stack.empty()) {
            auto &[v, next] = stack.back();
            const auto &par = dag.parents(v);
            while (next < par.size() && (visited[par[next]] || dag.isSource(par[next])))
                ++next;
            if (next < par.size()) {
                NodeId u = par[next++];
                visited[u] = 1;
                stack.emplace_back(u, 0);
            } else {
                out.order.push_back(v);
                stack.pop_back();
            }
        }
    }
    return out;
}

std::string bsp_to_csv(const BspSchedule &bsp) {
    std::ostringstream out;
    out << "node,processor,superstep\n";
    for (NodeId v : bsp.order)
        out << v << ',' << bsp.processor[v] << ',' << bsp.superstep[v] << '\n';
    return out.str();
}

BspSchedule bsp_from_csv(const WeightedDag &dag, std::uint32_t processors, const std::string &csv) {
    BspSchedule out;
    out.processors = processors;
    out.processor.assign(dag.size(), 0);
    out.superstep.assign(dag.size(), 0);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (line.rfind("node,processor,superstep", 0) != 0)
        throw std::invalid_argument("missing BSP schedule CSV header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::uint64_t v = 0;
        std::uint64_t p = 0;
        std::uint64_t s = 0;
        char c1 = 0;
        char c2 = 0;
        if (!(ls >> v >> c1 >> p >> c2 >> s) || c1 != ',' || c2 != ',' || v >= dag.size())
            throw std::invalid_argument("malformed BSP schedule row: " + line);
        out.processor[v] = static_cast<std::uint32_t>(p);
        out.superstep[v] = static_cast<std::uint32_t>(s);
        out.order.push_back(static_cast<NodeId>(v));
    }
    return out;
}

} // namespace mbsp
