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

// Schedule <-> assignment translation for the scheduling ILP.
//
// Encoding lays every processor's transitions onto ILP time steps ("lanes"). Deletes are
// attached to the end of a step; a delete issued before the lane's next operation belongs
// to the previous step so that red_t already excludes it.

#include "mbsp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbsp {

namespace {

Weight op_weight(const MbspInstance &inst, TransitionKind k, NodeId v) {
    switch (k) {
    case TransitionKind::Compute:
        return inst.dag.omega(v);
    case TransitionKind::Save:
    case TransitionKind::Load:
        return inst.arch.g * inst.dag.mu(v);
    case TransitionKind::Delete:
        return 0;
    }
    return 0;
}

} // namespace

MbspSchedule normalize_schedule(const MbspInstance &inst, const MbspSchedule &s) {
    const std::uint32_t P = inst.arch.P;
    constexpr Weight kUnset = std::numeric_limits<Weight>::min();
    Configuration c = initial_configuration(inst);
    MbspSchedule out(P);
    std::vector<Weight> gamma(P, 0);
    std::vector<Weight> avail(inst.dag.size(), kUnset);
    for (NodeId v : inst.dag.sources())
        avail[v] = 0;
    auto apply = [&](std::uint32_t p, const Op &op) {
        apply_transition_in_place(inst.dag, inst.arch, c, Transition{op.kind, p, op.node});
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        out.addSuperstep();
        // No-op computes (value already red) are dropped.
        for (std::uint32_t p = 0; p < P; ++p)
            for (const Op &op : s.at(i, p).comp) {
                if (op.kind == TransitionKind::Compute && c.isRed(p, op.node))
                    continue;
                apply(p, op);
                out.at(i, p).comp.push_back(op);
                gamma[p] += op_weight(inst, op.kind, op.node);
            }
        // Of the saves that make a value blue, keep the one finishing first (ties: lower processor).
        struct Candidate {
            Weight finish;
            std::uint32_t p;
            std::size_t pos;
        };
        std::vector<std::optional<Candidate>> best(inst.dag.size());
        for (std::uint32_t p = 0; p < P; ++p) {
            Weight f = gamma[p];
            const auto &saves = s.at(i, p).save;
            for (std::size_t k = 0; k < saves.size(); ++k) {
                const NodeId v = saves[k].node;
                if (!c.isRed(p, v))
                    throw TransitionError(Rule::SaveNotRed, "save of a value that is not red");
                if (c.isBlue(v))
                    continue;
                f += op_weight(inst, TransitionKind::Save, v);
                if (!best[v] || f < best[v]->finish)
                    best[v] = Candidate{f, p, k};
            }
        }
        for (std::uint32_t p = 0; p < P; ++p) {
            const auto &saves = s.at(i, p).save;
            for (std::size_t k = 0; k < saves.size(); ++k) {
                const NodeId v = saves[k].node;
                if (!best[v] || best[v]->p != p || best[v]->pos != k)
                    continue;
                out.at(i, p).save.push_back(saves[k]);
                gamma[p] += op_weight(inst, TransitionKind::Save, v);
                avail[v] = gamma[p];
            }
        }
        for (std::uint32_t p = 0; p < P; ++p)
            for (const Op &op : out.at(i, p).save)
                apply(p, op);
        for (std::uint32_t p = 0; p < P; ++p) {
            for (const Op &op : s.at(i, p).del) {
                apply(p, op);
                out.at(i, p).del.push_back(op);
            }
            for (const Op &op : s.at(i, p).load) {
                if (c.isRed(p, op.node))
                    continue;
                apply(p, op);
                out.at(i, p).load.push_back(op);
                gamma[p] = std::max(gamma[p], avail[op.node]) + op_weight(inst, op.kind, op.node);
            }
        }
    }
    out.removeEmptySupersteps();
    return out;
}

namespace {

struct PlanStep {
    explicit PlanStep(std::uint32_t P) : comp(P), save(P), load(P), preDel(P), postDel(P) {}

    std::vector<std::vector<NodeId>> comp, save, load;
    std::vector<std::vector<NodeId>> preDel;  ///< applied before this step's loads
    std::vector<std::vector<NodeId>> postDel; ///< applied after every operation of this step
    bool compphase = false;
    bool savephase = false; ///< unmerged models
    bool loadphase = false; ///< unmerged models
    bool commphase = false; ///< merged models
    bool commends = false;
};

// Per-processor placement state. `start` is red at the beginning of `step`; `group` holds the
// values computed in `step` when computes are merged.
struct Lane {
    std::uint32_t step = 0;
    bool used = false;
    bool commStep = false;
    std::vector<std::uint8_t> red;
    std::vector<std::uint8_t> start;
    std::vector<std::uint8_t> inGroup;
    std::vector<NodeId> group;
    Weight startMu = 0;
    Weight groupMu = 0;

    std::uint32_t end() const { return used ? step + 1 : step; }
};

class Encoder {
  public:
    Encoder(const MbspInstance &inst, const IlpConfig &cfg) : inst_(inst), cfg_(cfg), lanes_(inst.arch.P) {
        const std::size_t n = inst.dag.size();
        for (std::uint32_t p = 0; p < inst.arch.P; ++p) {
            Lane &L = lanes_[p];
            L.red.assign(n, 0);
            L.inGroup.assign(n, 0);
            if (p < inst.initialRed.size())
                for (NodeId v : inst.initialRed[p])
                    L.red[v] = 1;
            reset(L, 0);
        }
    }

    std::vector<PlanStep> run(const MbspSchedule &s) {
        if (cfg_.objective == Objective::Sync)
            runSync(s);
        else
            runAsync(s);
        return std::move(plan_);
    }

  private:
    bool merged() const { return cfg_.stepMerging; }

    PlanStep &at(std::uint32_t t) {
        while (plan_.size() <= t)
            plan_.emplace_back(inst_.arch.P);
        return plan_[t];
    }

    void reset(Lane &L, std::uint32_t step) {
        L.step = step;
        L.used = false;
        L.commStep = false;
        L.start = L.red;
        for (NodeId v : L.group)
            L.inGroup[v] = 0;
        L.group.clear();
        L.groupMu = 0;
        L.startMu = 0;
        for (NodeId v = 0; v < L.red.size(); ++v)
            if (L.red[v])
                L.startMu += inst_.dag.mu(v);
    }

    bool fits(const Lane &L, NodeId c) const {
        if (L.commStep || L.start[c] || L.inGroup[c])
            return false;
        for (NodeId u : inst_.dag.parents(c))
            if (!L.start[u] && !L.inGroup[u])
                return false;
        return L.startMu + L.groupMu + inst_.dag.mu(c) <= inst_.arch.r;
    }

    void compute(std::uint32_t p, NodeId c) {
        Lane &L = lanes_[p];
        if (L.used && (!merged() || !fits(L, c)))
            reset(L, L.step + 1);
        if (merged() && !fits(L, c))
            throw std::logic_error("compute does not fit an empty ILP step");
        at(L.step).comp[p].push_back(c);
        L.inGroup[c] = 1;
        L.group.push_back(c);
        L.groupMu += inst_.dag.mu(c);
        L.red[c] = 1;
        L.used = true;
    }

    // One communication transition per step (unmerged models and merged async).
    void communicate(std::uint32_t p, TransitionKind k, NodeId v) {
        Lane &L = lanes_[p];
        if (L.used)
            reset(L, L.step + 1);
        if (k == TransitionKind::Save) {
            at(L.step).save[p].push_back(v);
        } else {
            at(L.step).load[p].push_back(v);
            L.red[v] = 1;
        }
        L.used = true;
        L.commStep = true;
    }

    void erase(std::uint32_t p, NodeId x) {
        Lane &L = lanes_[p];
        L.red[x] = 0;
        if (L.used) {
            at(L.step).postDel[p].push_back(x);
        } else if (L.step > 0) {
            at(L.step - 1).postDel[p].push_back(x);
            L.start[x] = 0;
            L.startMu -= inst_.dag.mu(x);
        } else {
            at(0).postDel[p].push_back(x);
            L.used = true;
        }
    }

    void compPhase(const MbspSchedule &s, std::size_t i, std::uint32_t p) {
        for (const Op &op : s.at(i, p).comp) {
            if (op.kind == TransitionKind::Compute)
                compute(p, op.node);
            else
                erase(p, op.node);
        }
    }

    std::uint32_t lanesEnd() const {
        std::uint32_t e = 0;
        for (const Lane &L : lanes_)
            e = std::max(e, L.end());
        return e;
    }

    void runSync(const MbspSchedule &s) {
        const std::uint32_t P = inst_.arch.P;
        std::vector<std::uint8_t> blue(inst_.dag.size(), 0);
        for (NodeId v : inst_.dag.sources())
            blue[v] = 1;
        std::uint32_t t0 = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::uint32_t p = 0; p < P; ++p) {
                reset(lanes_[p], t0);
                compPhase(s, i, p);
            }
            const std::uint32_t b = lanesEnd();
            for (std::uint32_t t = t0; t < b; ++t)
                at(t).compphase = true;
            std::uint32_t last = b;
            if (merged()) {
                bool twoSteps = false;
                for (std::uint32_t p = 0; p < P; ++p)
                    for (const Op &op : s.at(i, p).load)
                        twoSteps = twoSteps || !blue[op.node];
                for (std::uint32_t p = 0; p < P; ++p) {
                    Lane &L = lanes_[p];
                    for (const Op &op : s.at(i, p).save)
                        at(b).save[p].push_back(op.node);
                    for (const Op &op : s.at(i, p).del) {
                        (twoSteps ? at(b).postDel[p] : at(b).preDel[p]).push_back(op.node);
                        L.red[op.node] = 0;
                    }
                    for (const Op &op : s.at(i, p).load) {
                        at(twoSteps ? b + 1 : b).load[p].push_back(op.node);
                        L.red[op.node] = 1;
                    }
                }
                last = twoSteps ? b + 1 : b;
                for (std::uint32_t t = b; t <= last; ++t)
                    at(t).commphase = true;
            } else {
                for (std::uint32_t p = 0; p < P; ++p) {
                    reset(lanes_[p], b);
                    for (const Op &op : s.at(i, p).save)
                        communicate(p, TransitionKind::Save, op.node);
                    for (const Op &op : s.at(i, p).del)
                        erase(p, op.node);
                }
                const std::uint32_t saveEnd = lanesEnd();
                for (std::uint32_t p = 0; p < P; ++p) {
                    reset(lanes_[p], saveEnd);
                    for (const Op &op : s.at(i, p).load)
                        communicate(p, TransitionKind::Load, op.node);
                }
                std::uint32_t loadEnd = lanesEnd();
                for (std::uint32_t t = b; t < saveEnd; ++t)
                    at(t).savephase = true;
                for (std::uint32_t t = saveEnd; t < loadEnd; ++t)
                    at(t).loadphase = true;
                // A superstep without communication still needs a step that closes it.
                if (loadEnd == b) {
                    at(b).savephase = true;
                    loadEnd = b + 1;
                }
                last = loadEnd - 1;
            }
            at(last).commends = true;
            for (std::uint32_t p = 0; p < P; ++p)
                for (const Op &op : s.at(i, p).save)
                    blue[op.node] = 1;
            t0 = last + 1;
        }
    }

    void runAsync(const MbspSchedule &s) {
        const std::uint32_t P = inst_.arch.P;
        std::vector<std::int64_t> saveStep(inst_.dag.size(), -1);
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::uint32_t p = 0; p < P; ++p) {
                compPhase(s, i, p);
                for (const Op &op : s.at(i, p).save) {
                    communicate(p, TransitionKind::Save, op.node);
                    saveStep[op.node] = lanes_[p].step;
                }
            }
            for (std::uint32_t p = 0; p < P; ++p) {
                Lane &L = lanes_[p];
                for (const Op &op : s.at(i, p).del)
                    erase(p, op.node);
                for (const Op &op : s.at(i, p).load) {
                    const NodeId v = op.node;
                    if (!inst_.dag.isSource(v)) {
                        if (saveStep[v] < 0)
                            throw std::invalid_argument("load of a value that was never saved");
                        const auto ready = static_cast<std::uint32_t>(saveStep[v] + 1);
                        if (ready > L.end())
                            reset(L, ready);
                    }
                    communicate(p, TransitionKind::Load, v);
                }
            }
        }
    }

    const MbspInstance &inst_;
    const IlpConfig &cfg_;
    std::vector<Lane> lanes_;
    std::vector<PlanStep> plan_;
};

std::vector<PlanStep> encode(const MbspInstance &inst, const MbspSchedule &normalized, const IlpConfig &cfg) {
    return Encoder(inst, cfg).run(normalized);
}

MbspInstance normalized_instance(MbspInstance inst) {
    inst.normalize();
    return inst;
}

void require_valid(const MbspInstance &inst, const MbspSchedule &s) {
    if (auto r = validate_schedule(inst, s); !r.valid())
        throw std::invalid_argument("schedule is invalid: " + r.violation->describe());
}

} // namespace

std::uint32_t encoded_steps(const MbspInstance &raw, const MbspSchedule &schedule, const IlpConfig &cfg) {
    const MbspInstance inst = normalized_instance(raw);
    require_valid(inst, schedule);
    const auto plan = encode(inst, normalize_schedule(inst, schedule), cfg);
    return static_cast<std::uint32_t>(plan.size());
}

std::uint32_t choose_horizon(const MbspInstance &inst, const MbspSchedule &schedule, const IlpConfig &cfg) {
    return std::max<std::uint32_t>(1, encoded_steps(inst, schedule, cfg) + cfg.slack);
}

Assignment warm_start(const MbspIlp &model, const MbspSchedule &schedule) {
    const MbspInstance &inst = model.inst;
    const IlpLayout &Ly = model.layout;
    const IlpConfig &cfg = model.cfg;
    require_valid(inst, schedule);
    const MbspSchedule norm = normalize_schedule(inst, schedule);
    const auto plan = encode(inst, norm, cfg);
    if (plan.size() > Ly.T)
        throw std::invalid_argument("schedule needs " + std::to_string(plan.size()) + " ILP steps, horizon is " +
                                    std::to_string(Ly.T));
    const std::uint32_t P = Ly.P;
    const std::uint32_t n = Ly.n;
    const std::uint32_t T = Ly.T;
    const PlanStep idle(P);
    auto step = [&](std::uint32_t t) -> const PlanStep & { return t < plan.size() ? plan[t] : idle; };

    Assignment a(model.milp.numVariables(), 0.0);
    auto set = [&](std::int32_t var, double x) {
        if (var >= 0)
            a[static_cast<std::size_t>(var)] = x;
    };

    // Pebbling variables by replaying the plan.
    std::vector<std::vector<std::uint8_t>> red(P, std::vector<std::uint8_t>(n, 0));
    for (std::uint32_t p = 0; p < P; ++p)
        for (NodeId v : inst.initialRed[p])
            red[p][v] = 1;
    std::vector<std::uint8_t> blue(n, 0);
    for (std::uint32_t t = 0; t < T; ++t) {
        const PlanStep &st = step(t);
        for (std::uint32_t p = 0; p < P; ++p) {
            for (NodeId v : st.comp[p]) {
                set(Ly.comp[Ly.pvt(p, v, t)], 1);
                red[p][v] = 1;
            }
            for (NodeId v : st.save[p]) {
                set(Ly.save[Ly.pvt(p, v, t)], 1);
                blue[v] = 1;
            }
            for (NodeId v : st.preDel[p])
                red[p][v] = 0;
            for (NodeId v : st.load[p]) {
                set(Ly.load[Ly.pvt(p, v, t)], 1);
                red[p][v] = 1;
            }
            for (NodeId v : st.postDel[p])
                red[p][v] = 0;
            for (NodeId v = 0; v < n; ++v)
                set(Ly.red[Ly.pvs(p, v, t + 1)], red[p][v]);
            if (cfg.stepMerging) {
                set(Ly.compstep[Ly.pt(p, t)], st.comp[p].empty() ? 0 : 1);
                set(Ly.commstep[Ly.pt(p, t)], st.save[p].empty() && st.load[p].empty() ? 0 : 1);
            }
        }
        for (NodeId v = 0; v < n; ++v)
            set(Ly.blue[Ly.vs(v, t + 1)], blue[v]);
    }

    const double M = static_cast<double>(model.bigM);
    const double g = static_cast<double>(inst.arch.g);
    auto val = [&](std::int32_t var) { return var >= 0 ? a[static_cast<std::size_t>(var)] : 0.0; };
    auto cost = [&](const std::vector<NodeId> &vs, bool compute) {
        double c = 0;
        for (NodeId v : vs)
            c += compute ? static_cast<double>(inst.dag.omega(v)) : g * static_cast<double>(inst.dag.mu(v));
        return c;
    };
    if (cfg.objective == Objective::Sync) {
        for (std::uint32_t t = 0; t < T; ++t) {
            const PlanStep &st = step(t);
            set(Ly.compphase[t], st.compphase);
            if (cfg.stepMerging) {
                set(Ly.commphase[t], st.commphase);
            } else {
                set(Ly.savephase[t], st.savephase);
                set(Ly.loadphase[t], st.loadphase);
            }
            set(Ly.compends[t], st.compphase && !step(t + 1).compphase ? 1 : 0);
            set(Ly.commends[t], st.commends);
        }
        for (std::uint32_t t = 0; t < T; ++t) {
            const PlanStep &st = step(t);
            double ci = 0;
            double si = 0;
            double li = 0;
            for (std::uint32_t p = 0; p < P; ++p) {
                const double prevC = t > 0 ? val(Ly.compuntil[Ly.pt(p, t - 1)]) : 0.0;
                const double prevS = t > 0 ? val(Ly.saveuntil[Ly.pt(p, t - 1)]) - M * val(Ly.commends[t - 1]) : 0.0;
                const double prevL = t > 0 ? val(Ly.loaduntil[Ly.pt(p, t - 1)]) - M * val(Ly.commends[t - 1]) : 0.0;
                const double cu = std::max(0.0, prevC + cost(st.comp[p], true) - M * val(Ly.commends[t]));
                const double su = std::max(0.0, prevS + cost(st.save[p], false));
                const double lu = std::max(0.0, prevL + cost(st.load[p], false));
                set(Ly.compuntil[Ly.pt(p, t)], cu);
                set(Ly.saveuntil[Ly.pt(p, t)], su);
                set(Ly.loaduntil[Ly.pt(p, t)], lu);
                ci = std::max(ci, cu - M * (1 - val(Ly.compends[t])));
                si = std::max(si, su - M * (1 - val(Ly.commends[t])));
                li = std::max(li, lu - M * (1 - val(Ly.commends[t])));
            }
            set(Ly.compinduced[t], ci);
            set(Ly.saveinduced[t], si);
            set(Ly.loadinduced[t], li);
            set(Ly.comminduced[t], si + li);
        }
    } else {
        std::vector<double> gets(n, 0.0);
        std::vector<double> finish(P, 0.0);
        for (std::uint32_t t = 0; t < T; ++t) {
            const PlanStep &st = step(t);
            for (std::uint32_t p = 0; p < P; ++p) {
                const double loadCost = cost(st.load[p], false);
                double f = finish[p] + cost(st.comp[p], true) + cost(st.save[p], false) + loadCost;
                for (NodeId v : st.load[p]) {
                    if (inst.dag.isSource(v))
                        continue;
                    const double own = cfg.stepMerging ? loadCost : g * static_cast<double>(inst.dag.mu(v));
                    f = std::max(f, gets[v] + own);
                }
                finish[p] = f;
                set(Ly.finish[Ly.pt(p, t)], f);
                for (NodeId v : st.save[p])
                    gets[v] = std::max(gets[v], f);
            }
        }
        for (NodeId v = 0; v < n; ++v)
            set(Ly.getsblue[v], gets[v]);
        set(Ly.makespan, *std::max_element(finish.begin(), finish.end()));
    }

    if (auto err = check_assignment(model.milp, a))
        throw std::invalid_argument("warm start violates the model: " + *err);
    const double expected = static_cast<double>(schedule_cost(inst, norm, cfg.objective));
    const double got = model.milp.objectiveValue(a);
    if (std::abs(got - expected) > 1e-6 * std::max(1.0, std::abs(expected)))
        throw std::logic_error("warm start objective " + std::to_string(got) + " differs from schedule cost " +
                               std::to_string(expected));
    return a;
}

MbspSchedule decode_solution(const MbspIlp &model, const Assignment &a) {
    if (auto err = check_assignment(model.milp, a))
        throw DecodeError("assignment is not feasible: " + *err);
    const MbspInstance &inst = model.inst;
    const IlpLayout &Ly = model.layout;
    const std::uint32_t P = Ly.P;
    const std::uint32_t n = Ly.n;
    const std::uint32_t T = Ly.T;
    auto on = [&](std::int32_t var) { return var >= 0 && std::lround(a[static_cast<std::size_t>(var)]) == 1; };
    auto red = [&](std::uint32_t p, NodeId v, std::uint32_t t) { return on(Ly.red[Ly.pvs(p, v, t)]); };
    const auto order = topological_order(inst.dag);

    std::vector<std::vector<std::uint8_t>> cur(P, std::vector<std::uint8_t>(n, 0));
    for (std::uint32_t p = 0; p < P; ++p)
        for (NodeId v : inst.initialRed[p])
            cur[p][v] = 1;
    std::vector<std::uint8_t> blue(n, 0);
    for (NodeId v : inst.dag.sources())
        blue[v] = 1;
    MbspSchedule out(P);

    // Computes of one step in topological order, then the deletes that step implies.
    auto computeStep = [&](std::size_t i, std::uint32_t t, Phase delPhase) {
        for (std::uint32_t p = 0; p < P; ++p) {
            auto &ps = out.at(i, p);
            for (NodeId v : order)
                if (on(Ly.comp[Ly.pvt(p, v, t)]) && !cur[p][v]) {
                    ps.comp.push_back({TransitionKind::Compute, v});
                    cur[p][v] = 1;
                }
            if (delPhase == Phase::Comp)
                for (NodeId v = 0; v < n; ++v)
                    if (cur[p][v] && !red(p, v, t + 1)) {
                        ps.comp.push_back({TransitionKind::Delete, v});
                        cur[p][v] = 0;
                    }
        }
    };
    // Saves of values red at the start and not yet blue, deletes, then loads reaching red `until`.
    auto commPhase = [&](std::size_t i, std::uint32_t from, std::uint32_t to, std::uint32_t until) {
        std::vector<std::uint8_t> saved(n, 0);
        for (std::uint32_t p = 0; p < P; ++p)
            for (NodeId v = 0; v < n; ++v) {
                if (!cur[p][v] || blue[v])
                    continue;
                bool any = false;
                for (std::uint32_t t = from; t < to && !any; ++t)
                    any = on(Ly.save[Ly.pvt(p, v, t)]);
                if (any) {
                    out.at(i, p).save.push_back({TransitionKind::Save, v});
                    saved[v] = 1;
                }
            }
        for (NodeId v = 0; v < n; ++v)
            blue[v] = blue[v] || saved[v];
        for (std::uint32_t p = 0; p < P; ++p) {
            auto &ps = out.at(i, p);
            for (NodeId v = 0; v < n; ++v)
                if (cur[p][v] && !red(p, v, until)) {
                    ps.del.push_back({TransitionKind::Delete, v});
                    cur[p][v] = 0;
                }
            for (NodeId v = 0; v < n; ++v)
                if (!cur[p][v] && red(p, v, until)) {
                    if (!blue[v])
                        throw DecodeError("value " + std::to_string(v) + " turns red without a compute or a blue pebble");
                    ps.load.push_back({TransitionKind::Load, v});
                    cur[p][v] = 1;
                }
        }
    };

    if (model.cfg.objective == Objective::Sync) {
        auto comm = [&](std::uint32_t t) {
            return model.cfg.stepMerging ? on(Ly.commphase[t]) : on(Ly.savephase[t]) || on(Ly.loadphase[t]);
        };
        std::uint32_t regionStart = 0;
        for (std::uint32_t e = 0; e < T; ++e) {
            if (!on(Ly.commends[e]))
                continue;
            const std::size_t i = out.addSuperstep();
            std::uint32_t firstComm = regionStart;
            while (firstComm < e && !comm(firstComm))
                ++firstComm;
            for (std::uint32_t t = regionStart; t < firstComm; ++t)
                computeStep(i, t, Phase::Comp);
            commPhase(i, firstComm, e + 1, e + 1);
            regionStart = e + 1;
        }
        // Steps after the last superstep boundary cannot make anything blue; they are dropped.
    } else {
        for (std::uint32_t t = 0; t < T; ++t) {
            const std::size_t i = out.addSuperstep();
            computeStep(i, t, Phase::Del);
            commPhase(i, t, t + 1, t + 1);
        }
    }

    MbspSchedule s = normalize_schedule(inst, out);
    if (auto r = validate_schedule(inst, s); !r.valid())
        throw DecodeError("decoded schedule is invalid: " + r.violation->describe());
    return s;
}

} // namespace mbsp
