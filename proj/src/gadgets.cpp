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

#include "mbsp/gadgets.hpp"

#include <sstream>
#include <stdexcept>

namespace mbsp {

namespace {

void require(bool ok, const std::string &msg) {
    if (!ok)
        throw std::invalid_argument(msg);
}

constexpr TransitionKind C = TransitionKind::Compute;
constexpr TransitionKind S = TransitionKind::Save;
constexpr TransitionKind D = TransitionKind::Delete;
constexpr TransitionKind Ld = TransitionKind::Load;

void put(MbspSchedule &s, std::size_t step, std::uint32_t p, Phase ph, TransitionKind k, NodeId v) {
    while (s.size() <= step)
        s.addSuperstep();
    s.at(step, p).phase(ph).push_back({k, v});
}

} // namespace

std::int64_t GadgetSpec::get(const std::string &key, std::int64_t fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

bool is_gadget_spec(const std::string &text) { return text.rfind("gadget:", 0) == 0; }

GadgetSpec parse_gadget_spec(const std::string &text) {
    require(is_gadget_spec(text), "gadget specifier must start with 'gadget:'");
    GadgetSpec spec;
    std::string rest = text.substr(7);
    auto colon = rest.find(':');
    spec.family = rest.substr(0, colon);
    if (colon != std::string::npos) {
        std::istringstream in(rest.substr(colon + 1));
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item.empty())
                continue;
            auto eq = item.find('=');
            require(eq != std::string::npos, "gadget parameter '" + item + "' is not key=value");
            std::size_t used = 0;
            std::int64_t value = 0;
            try {
                value = std::stoll(item.substr(eq + 1), &used);
            } catch (const std::exception &) {
                used = 0;
            }
            require(used == item.size() - eq - 1 && used > 0, "gadget parameter '" + item + "' is not an integer");
            spec.params[item.substr(0, eq)] = value;
        }
    }
    return spec;
}

GadgetInstance make_gadget(const GadgetSpec &spec) {
    auto u32 = [&](const char *key, std::int64_t fallback) {
        std::int64_t v = spec.get(key, fallback);
        require(v >= 0, std::string("gadget parameter ") + key + " must be non-negative");
        return static_cast<std::uint32_t>(v);
    };
    GadgetInstance g;
    if (spec.family == "zipper") {
        const auto d = u32("d", 4);
        const auto m = u32("m", 21);
        const auto P = u32("P", 2);
        g.dag = zipper_dag(d, m, P);
        g.arch = Architecture{P, static_cast<Weight>(d) + 2, spec.get("g", 1), spec.get("L", 0)};
    } else if (spec.family == "async_gap") {
        auto gg = async_gap_gadget(u32("P", 4), spec.get("Z", 1000));
        g.dag = gg.dag;
        g.arch = gg.arch;
    } else if (spec.family == "sync_gap") {
        auto gg = sync_gap_gadget(spec.get("Z", 100));
        g.dag = gg.dag;
        g.arch = gg.arch;
    } else if (spec.family == "empty_step") {
        g.dag = empty_step_dag(u32("d", 3), u32("m", 3));
        g.arch = Architecture{1, 4, spec.get("g", 5), spec.get("L", 0)};
    } else {
        throw std::invalid_argument("unknown gadget family '" + spec.family + "'");
    }
    return g;
}

NodeId zipper_hub(std::uint32_t d, std::uint32_t group, std::uint32_t j) { return group * d + j; }

NodeId zipper_chain(std::uint32_t d, std::uint32_t m, std::uint32_t P, std::uint32_t chain, std::uint32_t i) {
    return P * d + chain * m + (i - 1);
}

namespace {

// Hub group feeding node i (1-based) of the given chain.
std::uint32_t zipper_group(std::uint32_t chain, std::uint32_t i) {
    if (chain >= 2)
        return chain;
    const bool odd = (i % 2) == 1;
    // Odd i: H1 -> u_i, H2 -> v_i. Even i: the reverse.
    return (chain == 0) == odd ? 1U : 0U;
}

} // namespace

WeightedDag zipper_dag(std::uint32_t d, std::uint32_t m, std::uint32_t P) {
    require(d >= 2 && m >= 2 && P >= 2, "zipper needs d >= 2, m >= 2, P >= 2");
    const std::size_t n = static_cast<std::size_t>(P) * (d + m);
    std::vector<NodeWeights> w(n, NodeWeights{1, 1});
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::uint32_t c = 0; c < P; ++c)
        for (std::uint32_t i = 1; i <= m; ++i) {
            const NodeId x = zipper_chain(d, m, P, c, i);
            if (i > 1)
                edges.emplace_back(zipper_chain(d, m, P, c, i - 1), x);
            for (std::uint32_t j = 0; j < d; ++j)
                edges.emplace_back(zipper_hub(d, zipper_group(c, i), j), x);
        }
    return WeightedDag(std::move(w), edges);
}

MbspSchedule zipper_two_stage_schedule(std::uint32_t d, std::uint32_t m, const Architecture &arch) {
    const std::uint32_t P = arch.P;
    require(P >= 2 && arch.r >= static_cast<Weight>(d) + 2, "zipper schedules need P >= 2 and r >= d+2");
    MbspSchedule s(P);
    for (std::uint32_t c = 0; c < P; ++c) {
        auto hubs = [&](std::uint32_t i) { return zipper_group(c, i); };
        for (std::uint32_t j = 0; j < d; ++j)
            put(s, 0, c, Phase::Load, Ld, zipper_hub(d, hubs(1), j));
        for (std::uint32_t i = 1; i <= m; ++i) {
            const NodeId x = zipper_chain(d, m, P, c, i);
            put(s, i, c, Phase::Comp, C, x);
            if (i > 1)
                put(s, i, c, Phase::Comp, D, zipper_chain(d, m, P, c, i - 1));
            if (i == m) {
                put(s, i, c, Phase::Save, S, x);
                continue;
            }
            if (hubs(i + 1) != hubs(i)) {
                for (std::uint32_t j = 0; j < d; ++j)
                    put(s, i, c, Phase::Del, D, zipper_hub(d, hubs(i), j));
                for (std::uint32_t j = 0; j < d; ++j)
                    put(s, i, c, Phase::Load, Ld, zipper_hub(d, hubs(i + 1), j));
            }
        }
    }
    return s;
}

MbspSchedule zipper_optimal_schedule(std::uint32_t d, std::uint32_t m, const Architecture &arch) {
    const std::uint32_t P = arch.P;
    require(P >= 2 && arch.r >= static_cast<Weight>(d) + 2, "zipper schedules need P >= 2 and r >= d+2");
    // Extra components behave exactly as in the two-stage schedule.
    MbspSchedule s = zipper_two_stage_schedule(d, m, arch);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::uint32_t p = 0; p < 2; ++p)
            s.at(i, p) = ProcessorSuperstep{};
    // Processor q holds hub group q and computes its children: chain (q == 0 ? u : v) at odd i.
    auto node = [&](std::uint32_t q, std::uint32_t i) {
        const std::uint32_t chain = ((i % 2 == 1) == (q == 0)) ? 1U : 0U;
        return zipper_chain(d, m, P, chain, i);
    };
    for (std::uint32_t q = 0; q < 2; ++q) {
        for (std::uint32_t j = 0; j < d; ++j)
            put(s, 0, q, Phase::Load, Ld, zipper_hub(d, q, j));
        for (std::uint32_t i = 1; i <= m; ++i) {
            const NodeId x = node(q, i);
            put(s, i, q, Phase::Comp, C, x);
            if (i > 1)
                put(s, i, q, Phase::Comp, D, node(1 - q, i - 1));
            put(s, i, q, Phase::Save, S, x);
            if (i < m) {
                put(s, i, q, Phase::Del, D, x);
                put(s, i, q, Phase::Load, Ld, node(1 - q, i));
            }
        }
    }
    return s;
}

GapGadget async_gap_gadget(std::uint32_t P, Weight Z) {
    require(P >= 4 && P % 2 == 0 && Z >= 2, "async gap gadget needs even P >= 4 and Z >= 2");
    const std::uint32_t H = P / 2;
    auto uId = [&](std::uint32_t i, std::uint32_t j) { return static_cast<NodeId>(1 + 2 * (i * H + j)); };
    auto vId = [&](std::uint32_t i, std::uint32_t j) { return uId(i, j) + 1; };
    std::vector<NodeWeights> w(1 + 2 * H * H, NodeWeights{1, 1});
    w[0] = NodeWeights{0, 0};
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::uint32_t i = 0; i < H; ++i) {
        w[uId(i, i)].omega = Z;
        w[vId(i, i)].omega = Z;
        edges.emplace_back(0, uId(i, 0));
        edges.emplace_back(0, vId(i, 0));
        for (std::uint32_t j = 0; j + 1 < H; ++j)
            for (NodeId a : {uId(i, j), vId(i, j)})
                for (NodeId b : {uId(i, j + 1), vId(i, j + 1)})
                    edges.emplace_back(a, b);
    }
    GapGadget g;
    g.dag = WeightedDag(std::move(w), edges);
    g.arch = Architecture{P, g.dag.totalMu(), 0, 0};

    // Pair i runs on processors i (u-nodes) and H + i (v-nodes), node j at superstep offset(i) + j.
    auto build = [&](auto offset) {
        MbspSchedule s(P);
        for (std::uint32_t i = 0; i < H; ++i) {
            for (std::uint32_t side = 0; side < 2; ++side) {
                const std::uint32_t p = side == 0 ? i : H + i;
                put(s, 0, p, Phase::Load, Ld, 0);
                for (std::uint32_t j = 0; j < H; ++j) {
                    const std::size_t step = offset(i) + j;
                    const NodeId mine = side == 0 ? uId(i, j) : vId(i, j);
                    const NodeId other = side == 0 ? vId(i, j) : uId(i, j);
                    put(s, step, p, Phase::Comp, C, mine);
                    put(s, step, p, Phase::Save, S, mine);
                    if (j + 1 < H)
                        put(s, step, p, Phase::Load, Ld, other);
                }
            }
        }
        return s;
    };
    g.first = build([](std::uint32_t) { return std::size_t{1}; });
    g.second = build([&](std::uint32_t i) { return static_cast<std::size_t>(H - i); });
    return g;
}

GapGadget sync_gap_gadget(Weight Z) {
    require(Z >= 2, "sync gap gadget needs Z >= 2");
    enum : NodeId { s0 = 0, u1, u2, u3, u4, v1, v2, v3, v4, w };
    std::vector<NodeWeights> wt(10, NodeWeights{Z - 1, 1});
    wt[s0] = NodeWeights{0, 0};
    wt[u3].omega = wt[u4].omega = wt[v1].omega = 2 * Z;
    std::vector<std::pair<NodeId, NodeId>> edges{{s0, u1}, {s0, u2}, {s0, v1}, {s0, w}, {u1, u3}, {u1, u4},
                                                 {u2, u3}, {u2, u4}, {v1, v2}, {v1, v3}, {v1, v4}};
    GapGadget g;
    g.dag = WeightedDag(std::move(wt), edges);
    g.arch = Architecture{5, g.dag.totalMu(), 0, 0};

    MbspSchedule a(5);
    for (std::uint32_t p : {0U, 1U, 2U})
        put(a, 0, p, Phase::Load, Ld, s0);
    put(a, 1, 0, Phase::Comp, C, u1);
    put(a, 1, 1, Phase::Comp, C, u2);
    put(a, 1, 2, Phase::Comp, C, w);
    put(a, 1, 0, Phase::Save, S, u1);
    put(a, 1, 1, Phase::Save, S, u2);
    put(a, 1, 2, Phase::Save, S, w);
    put(a, 1, 0, Phase::Load, Ld, u2);
    put(a, 1, 1, Phase::Load, Ld, u1);
    put(a, 2, 0, Phase::Comp, C, u3);
    put(a, 2, 1, Phase::Comp, C, u4);
    put(a, 2, 2, Phase::Comp, C, v1);
    put(a, 2, 0, Phase::Save, S, u3);
    put(a, 2, 1, Phase::Save, S, u4);
    put(a, 2, 2, Phase::Save, S, v1);
    put(a, 2, 3, Phase::Load, Ld, v1);
    put(a, 2, 4, Phase::Load, Ld, v1);
    put(a, 3, 2, Phase::Comp, C, v2);
    put(a, 3, 3, Phase::Comp, C, v3);
    put(a, 3, 4, Phase::Comp, C, v4);
    for (std::uint32_t p : {2U, 3U, 4U})
        put(a, 3, p, Phase::Save, S, v2 + (p - 2));

    MbspSchedule b(5);
    for (std::uint32_t p : {0U, 1U, 2U, 3U})
        put(b, 0, p, Phase::Load, Ld, s0);
    const NodeId first[4] = {u1, u2, v1, w};
    for (std::uint32_t p = 0; p < 4; ++p) {
        put(b, 1, p, Phase::Comp, C, first[p]);
        put(b, 1, p, Phase::Save, S, first[p]);
    }
    put(b, 1, 0, Phase::Load, Ld, u2);
    put(b, 1, 1, Phase::Load, Ld, u1);
    put(b, 1, 3, Phase::Load, Ld, v1);
    put(b, 1, 4, Phase::Load, Ld, v1);
    const NodeId second[5] = {u3, u4, v2, v3, v4};
    for (std::uint32_t p = 0; p < 5; ++p) {
        put(b, 2, p, Phase::Comp, C, second[p]);
        put(b, 2, p, Phase::Save, S, second[p]);
    }
    g.first = std::move(a);
    g.second = std::move(b);
    return g;
}

WeightedDag empty_step_dag(std::uint32_t d, std::uint32_t m) {
    require(d >= 1 && m >= 1, "empty-step gadget needs d >= 1 and m >= 1");
    const NodeId w = 0;
    auto u = [](std::uint32_t i) { return static_cast<NodeId>(i); };
    auto up = [&](std::uint32_t i) { return static_cast<NodeId>(d + i); };
    auto v = [&](std::uint32_t i) { return static_cast<NodeId>(2 * d + 1 + i); };
    const std::size_t n = 2 * static_cast<std::size_t>(d) + m + 2;
    std::vector<NodeWeights> wt(n, NodeWeights{1, 1});
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId x = 1; x < n; ++x)
        edges.emplace_back(w, x);
    for (std::uint32_t i = 1; i < d; ++i) {
        edges.emplace_back(u(i), u(i + 1));
        edges.emplace_back(up(i), up(i + 1));
    }
    edges.emplace_back(u(d), v(0));
    edges.emplace_back(up(d), v(0));
    for (std::uint32_t i = 1; i <= m; ++i) {
        edges.emplace_back(v(i - 1), v(i));
        edges.emplace_back(i % 2 == 1 ? u(d) : up(d), v(i));
    }
    return WeightedDag(std::move(wt), edges);
}

} // namespace mbsp
