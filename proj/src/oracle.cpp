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

// Exhaustive MBSP optimizer for tiny instances.
//
// Deletes are lazy: a compute or load evicts a minimal set of values exactly when it needs the
// room. Any schedule can be rearranged this way at equal cost, since a value only matters for
// memory between its last use and its delete.
//
// Sync search: states are (configuration, phase, per-processor lag behind the phase maximum).
// Adding work to a processor raises the cost by however much it pushes the phase maximum, so
// edge costs stay additive.
//
// Async search: states carry every processor's lag behind the makespan so far and the
// availability of values saved ahead of the slowest processor. Only processors with the
// smallest finishing time act, so transitions are explored in start-time order.

#include "mbsp/solver.hpp"
#include "mbsp/two_stage.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <unordered_map>

namespace mbsp {

namespace {

using Mask = std::uint16_t;
constexpr int kMaxP = 2;
constexpr int kMaxN = 12;
constexpr std::int32_t kNone = -1;

enum ActKind : std::uint8_t { kCompute, kSave, kLoad, kAdvance, kSleep };

struct Act {
    std::uint8_t kind = kAdvance;
    std::uint8_t p = 0;
    std::uint8_t v = 0;
    Mask evict = 0; ///< values deleted right before the transition
};

struct State {
    std::array<Mask, kMaxP> red{};
    Mask blue = 0; ///< saved values, sources included
    Mask computed = 0;
    std::uint8_t phase = 0; ///< sync: 0 comp, 1 save, 2 delete/load
    std::array<std::uint8_t, kMaxP> count{};
    std::array<std::int32_t, kMaxP> lag{};
    std::array<std::int32_t, kMaxN> pending{}; ///< async: makespan minus availability, kNone when settled
};

using Key = std::array<std::uint64_t, 5>;

struct KeyHash {
    std::size_t operator()(const Key &k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::uint64_t x : k)
            h = (h ^ x) * 0x100000001b3ULL + (h >> 29);
        return static_cast<std::size_t>(h);
    }
};

// Lags and availabilities are bounded by the guard's tiny weights; 16 bits each is checked.
std::uint64_t small(std::int32_t x) {
    if (x < -1 || x >= 0xFFFF)
        throw OracleLimitError("oracle time offset out of range");
    return static_cast<std::uint64_t>(x + 1);
}

Key pack(const State &s) {
    Key k{};
    k[0] = s.red[0] | std::uint64_t{s.red[1]} << 16 | std::uint64_t{s.blue} << 32 | std::uint64_t{s.computed} << 48;
    k[1] = s.phase | std::uint64_t{s.count[0]} << 8 | std::uint64_t{s.count[1]} << 16 | small(s.lag[0]) << 24 |
           small(s.lag[1]) << 40;
    for (int v = 0; v < kMaxN; ++v)
        k[2 + v / 4] |= small(s.pending[v]) << (16 * (v % 4));
    return k;
}

struct Node {
    State s;
    Weight cost;
    std::int32_t parent;
    Act act;
};

class Search {
  public:
    Search(const MbspInstance &inst, const OracleConfig &cfg) : inst_(inst), cfg_(cfg) {
        P_ = static_cast<int>(inst.arch.P);
        n_ = static_cast<int>(inst.dag.size());
        for (int v = 0; v < n_; ++v) {
            for (NodeId u : inst.dag.parents(static_cast<NodeId>(v)))
                parents_[v] |= bit(static_cast<int>(u));
            if (inst.dag.isSource(static_cast<NodeId>(v)))
                sources_ |= bit(v);
        }
        for (NodeId v : inst.requiredBlue)
            required_ |= bit(static_cast<int>(v));
        memo_.assign(std::size_t{1} << n_, 0);
        for (std::size_t m = 1; m < memo_.size(); ++m) {
            const int low = __builtin_ctz(static_cast<unsigned>(m));
            memo_[m] = memo_[m & (m - 1)] + inst.dag.mu(static_cast<NodeId>(low));
        }
    }

    OracleResult run() {
        State s0;
        s0.pending.fill(kNone);
        s0.blue = sources_;
        for (int p = 0; p < P_; ++p)
            for (NodeId v : inst_.initialRed[p])
                s0.red[p] |= bit(static_cast<int>(v));
        if ((s0.blue & required_) == required_)
            return finish(-1, 0);
        const bool sync = cfg_.objective == Objective::Sync;
        push(s0, sync ? inst_.arch.L : 0, -1, Act{});
        while (!queue_.empty()) {
            auto [negCost, id] = queue_.top();
            queue_.pop();
            const Weight cost = -negCost;
            if (cost > nodes_[id].cost)
                continue;
            const State s = nodes_[id].s;
            if ((s.blue & required_) == required_)
                return finish(id, cost);
            if (sync)
                expandSync(id, s, cost);
            else
                expandAsync(id, s, cost);
        }
        throw InfeasibleError("no schedule within " + std::to_string(cfg_.maxTransitions) + " transitions");
    }

  private:
    static Mask bit(int v) { return static_cast<Mask>(1U << v); }
    static bool has(Mask m, int v) { return (m >> v) & 1U; }

    Weight mu(Mask m) const { return memo_[m]; }
    Weight omega(int v) const { return inst_.dag.omega(static_cast<NodeId>(v)); }
    Weight io(int v) const { return inst_.arch.g * inst_.dag.mu(static_cast<NodeId>(v)); }

    bool countOk(const State &s, int p) const {
        return cfg_.maxTransitions == 0 || s.count[p] < cfg_.maxTransitions;
    }
    void bump(State &s, int p) const {
        if (cfg_.maxTransitions != 0)
            ++s.count[p];
    }

    // Minimal sets D within `candidates` such that red \ D leaves room for `need` more.
    std::vector<Mask> evictions(Mask red, Mask candidates, Weight need) const {
        const Weight excess = mu(red) + need - inst_.arch.r;
        if (excess <= 0)
            return {0};
        std::vector<Mask> out;
        for (Mask d = candidates;; d = static_cast<Mask>((d - 1) & candidates)) {
            if (d != 0 && mu(d) >= excess) {
                bool minimal = true;
                for (int x = 0; x < n_ && minimal; ++x)
                    if (has(d, x) && mu(static_cast<Mask>(d & ~bit(x))) >= excess)
                        minimal = false;
                if (minimal)
                    out.push_back(d);
            }
            if (d == 0)
                break;
        }
        return out;
    }

    template <typename F> void forComputes(const State &s, int p, F &&f) const {
        for (int v = 0; v < n_; ++v) {
            if (has(sources_, v) || has(s.red[p], v) || (s.red[p] & parents_[v]) != parents_[v] || !countOk(s, p))
                continue;
            if (!cfg_.allowRecompute && has(s.computed, v))
                continue;
            const Mask keep = parents_[v];
            for (Mask d : evictions(s.red[p], static_cast<Mask>(s.red[p] & ~keep), inst_.dag.mu(static_cast<NodeId>(v))))
                f(v, d);
        }
    }

    template <typename F> void forLoads(const State &s, int p, F &&f) const {
        for (int v = 0; v < n_; ++v) {
            if (!has(s.blue, v) || has(s.red[p], v) || !countOk(s, p))
                continue;
            for (Mask d : evictions(s.red[p], s.red[p], inst_.dag.mu(static_cast<NodeId>(v))))
                f(v, d);
        }
    }

    void push(const State &s, Weight cost, std::int32_t parent, Act act) {
        const Key key = pack(s);
        auto it = best_.find(key);
        if (it != best_.end() && nodes_[it->second].cost <= cost)
            return;
        if (nodes_.size() >= cfg_.maxStates)
            throw OracleLimitError("oracle exceeded " + std::to_string(cfg_.maxStates) + " states");
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({s, cost, parent, act});
        best_[key] = id;
        queue_.emplace(-cost, id);
    }

    // Sync: charge `c` to processor p in the current phase; returns the rise of the phase maximum.
    Weight charge(State &s, int p, Weight c) const {
        const Weight rise = c - s.lag[p];
        if (rise > 0) {
            for (int q = 0; q < P_; ++q)
                s.lag[q] = q == p ? 0 : s.lag[q] + static_cast<std::int32_t>(rise);
            return rise;
        }
        s.lag[p] -= static_cast<std::int32_t>(c);
        return 0;
    }

    void expandSync(std::int32_t id, const State &s, Weight cost) {
        for (int p = 0; p < P_; ++p) {
            const auto p8 = static_cast<std::uint8_t>(p);
            if (s.phase == 0) {
                forComputes(s, p, [&](int v, Mask d) {
                    State t = s;
                    t.red[p] = static_cast<Mask>((t.red[p] & ~d) | bit(v));
                    t.computed |= bit(v);
                    bump(t, p);
                    const Weight c = charge(t, p, omega(v));
                    push(t, cost + c, id, Act{kCompute, p8, static_cast<std::uint8_t>(v), d});
                });
            } else if (s.phase == 1) {
                for (int v = 0; v < n_; ++v) {
                    if (!has(s.red[p], v) || has(s.blue, v) || !countOk(s, p))
                        continue;
                    State t = s;
                    t.blue |= bit(v);
                    bump(t, p);
                    const Weight c = charge(t, p, io(v));
                    push(t, cost + c, id, Act{kSave, p8, static_cast<std::uint8_t>(v), 0});
                }
            } else {
                forLoads(s, p, [&](int v, Mask d) {
                    State t = s;
                    t.red[p] = static_cast<Mask>((t.red[p] & ~d) | bit(v));
                    bump(t, p);
                    const Weight c = charge(t, p, io(v));
                    push(t, cost + c, id, Act{kLoad, p8, static_cast<std::uint8_t>(v), d});
                });
            }
        }
        State t = s;
        t.phase = static_cast<std::uint8_t>((s.phase + 1) % 3);
        t.lag.fill(0);
        push(t, cost + (s.phase == 2 ? inst_.arch.L : 0), id, Act{kAdvance, 0, 0, 0});
    }

    // Async: absolute times are measured against the makespan so far, `cost`.
    void expandAsync(std::int32_t id, const State &s, Weight cost) {
        const std::int32_t slowest = *std::max_element(s.lag.begin(), s.lag.begin() + P_);
        for (int p = 0; p < P_; ++p) {
            if (s.lag[p] != slowest)
                continue;
            const Weight gamma = cost - s.lag[p];
            const auto p8 = static_cast<std::uint8_t>(p);
            auto emit = [&](State t, Weight newGamma, Act act, int saved) {
                std::array<Weight, kMaxP> g{};
                for (int q = 0; q < P_; ++q)
                    g[q] = q == p ? newGamma : cost - s.lag[q];
                const Weight makespan = std::max(cost, newGamma);
                const Weight earliest = *std::min_element(g.begin(), g.begin() + P_);
                for (int q = 0; q < P_; ++q)
                    t.lag[q] = static_cast<std::int32_t>(makespan - g[q]);
                for (int v = 0; v < n_; ++v) {
                    if (s.pending[v] == kNone)
                        continue;
                    const Weight avail = cost - s.pending[v];
                    t.pending[v] = avail <= earliest ? kNone : static_cast<std::int32_t>(makespan - avail);
                }
                if (saved >= 0 && newGamma > earliest)
                    t.pending[saved] = static_cast<std::int32_t>(makespan - newGamma);
                push(t, makespan, id, act);
            };
            forComputes(s, p, [&](int v, Mask d) {
                State t = s;
                t.red[p] = static_cast<Mask>((t.red[p] & ~d) | bit(v));
                t.computed |= bit(v);
                bump(t, p);
                emit(t, gamma + omega(v), Act{kCompute, p8, static_cast<std::uint8_t>(v), d}, -1);
            });
            for (int v = 0; v < n_; ++v) {
                if (!has(s.red[p], v) || has(s.blue, v) || !countOk(s, p))
                    continue;
                State t = s;
                t.blue |= bit(v);
                bump(t, p);
                emit(t, gamma + io(v), Act{kSave, p8, static_cast<std::uint8_t>(v), 0}, v);
            }
            forLoads(s, p, [&](int v, Mask d) {
                State t = s;
                t.red[p] = static_cast<Mask>((t.red[p] & ~d) | bit(v));
                bump(t, p);
                const Weight start = s.pending[v] != kNone ? std::max(gamma, cost - s.pending[v]) : gamma;
                emit(t, start + io(v), Act{kLoad, p8, static_cast<std::uint8_t>(v), d}, -1);
            });
            // Idle until the next processor finishes its current transition.
            Weight next = -1;
            for (int q = 0; q < P_; ++q) {
                const Weight gq = cost - s.lag[q];
                if (gq > gamma && (next < 0 || gq < next))
                    next = gq;
            }
            if (next >= 0)
                emit(s, next, Act{kSleep, p8, 0, 0}, -1);
        }
    }

    OracleResult finish(std::int32_t id, Weight cost) {
        std::vector<Act> acts;
        for (std::int32_t i = id; i >= 0 && nodes_[i].parent >= 0; i = nodes_[i].parent)
            acts.push_back(nodes_[i].act);
        std::reverse(acts.begin(), acts.end());
        OracleResult r;
        r.schedule = cfg_.objective == Objective::Sync ? buildSync(acts) : buildAsync(acts);
        r.states = nodes_.size();
        for (int p = 0; p < P_; ++p) {
            std::uint32_t c = 0;
            for (std::size_t i = 0; i < r.schedule.size(); ++i) {
                const auto &ps = r.schedule.at(i, static_cast<std::uint32_t>(p));
                for (const Op &op : ps.comp)
                    c += op.kind == TransitionKind::Compute ? 1 : 0;
                c += static_cast<std::uint32_t>(ps.save.size() + ps.load.size());
            }
            r.transitions = std::max(r.transitions, c);
        }
        if (auto v = validate_schedule(inst_, r.schedule); !v.valid())
            throw std::logic_error("oracle built an invalid schedule: " + v.violation->describe());
        r.cost = schedule_cost(inst_, r.schedule, cfg_.objective);
        if (r.cost != cost)
            throw std::logic_error("oracle schedule cost " + std::to_string(r.cost) + " differs from search cost " +
                                   std::to_string(cost));
        return r;
    }

    void evict(std::vector<Op> &phase, Mask d) const {
        for (int x = 0; x < n_; ++x)
            if (has(d, x))
                phase.push_back({TransitionKind::Delete, static_cast<NodeId>(x)});
    }

    MbspSchedule buildSync(const std::vector<Act> &acts) const {
        MbspSchedule s(static_cast<std::uint32_t>(P_));
        if (acts.empty())
            return s;
        std::size_t i = s.addSuperstep();
        int phase = 0;
        for (const Act &a : acts) {
            auto &ps = s.at(i, a.p);
            switch (a.kind) {
            case kAdvance:
                phase = (phase + 1) % 3;
                if (phase == 0)
                    i = s.addSuperstep();
                break;
            case kCompute:
                evict(ps.comp, a.evict);
                ps.comp.push_back({TransitionKind::Compute, a.v});
                break;
            case kSave:
                ps.save.push_back({TransitionKind::Save, a.v});
                break;
            case kLoad:
                evict(ps.del, a.evict);
                ps.load.push_back({TransitionKind::Load, a.v});
                break;
            default:
                break;
            }
        }
        // The search may stop right after opening a superstep.
        s.removeEmptySupersteps();
        return s;
    }

    // Slices each processor's transition sequence into supersteps; a load never precedes the
    // superstep of the save it reads.
    MbspSchedule buildAsync(const std::vector<Act> &acts) const {
        MbspSchedule s(static_cast<std::uint32_t>(P_));
        std::array<std::size_t, kMaxP> sup{};
        std::array<int, kMaxP> rank{};
        std::array<std::size_t, kMaxN> saveSup{};
        auto place = [&](int p, int r) {
            if (r < rank[p])
                ++sup[p];
            rank[p] = r;
            while (s.size() <= sup[p])
                s.addSuperstep();
            return &s.at(sup[p], static_cast<std::uint32_t>(p));
        };
        for (const Act &a : acts) {
            const int p = a.p;
            switch (a.kind) {
            case kCompute: {
                auto *ps = place(p, 0);
                evict(ps->comp, a.evict);
                ps->comp.push_back({TransitionKind::Compute, a.v});
                break;
            }
            case kSave:
                place(p, 1)->save.push_back({TransitionKind::Save, a.v});
                saveSup[a.v] = sup[p];
                break;
            case kLoad:
                if (!has(sources_, a.v) && saveSup[a.v] > sup[p]) {
                    sup[p] = saveSup[a.v];
                    rank[p] = 0;
                }
                evict(place(p, 2)->del, a.evict);
                place(p, 3)->load.push_back({TransitionKind::Load, a.v});
                break;
            default:
                break;
            }
        }
        return s;
    }

    const MbspInstance &inst_;
    const OracleConfig &cfg_;
    int P_ = 1;
    int n_ = 0;
    std::array<Mask, kMaxN> parents_{};
    Mask sources_ = 0;
    Mask required_ = 0;
    std::vector<Weight> memo_;
    std::vector<Node> nodes_;
    std::unordered_map<Key, std::int32_t, KeyHash> best_;
    std::priority_queue<std::pair<Weight, std::int32_t>> queue_;
};

} // namespace

OracleResult brute_force_optimum(const MbspInstance &raw, const OracleConfig &cfg) {
    MbspInstance inst = raw;
    inst.normalize();
    const std::size_t n = inst.dag.size();
    const std::uint32_t P = inst.arch.P;
    if (!((P == 1 && n <= 12) || (P == 2 && n <= 8)))
        throw std::invalid_argument("oracle guard: needs P = 1 with n <= 12 or P = 2 with n <= 8");
    inst.arch.check();
    return Search(inst, cfg).run();
}

} // namespace mbsp
