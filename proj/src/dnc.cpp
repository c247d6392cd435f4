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

// Divide and conquer for DAGs too large for one scheduling ILP.

#include "mbsp/dnc.hpp"
#include "mbsp/two_stage.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace mbsp {

std::vector<std::vector<NodeId>> AcyclicPartition::members() const {
    std::vector<std::vector<NodeId>> m(parts);
    for (NodeId v = 0; v < part.size(); ++v)
        m.at(part[v]).push_back(v);
    return m;
}

std::size_t hyperedge_cut(const WeightedDag &dag, const std::vector<std::uint32_t> &part) {
    std::size_t cut = 0;
    for (NodeId u = 0; u < dag.size(); ++u)
        cut += std::any_of(dag.children(u).begin(), dag.children(u).end(),
                           [&](NodeId v) { return part[v] != part[u]; })
                   ? 1
                   : 0;
    return cut;
}

namespace {

std::size_t min_side(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));
}

} // namespace

Bipartition topological_prefix_split(const WeightedDag &dag, double minFraction) {
    const std::size_t n = dag.size();
    const std::size_t lo = std::max<std::size_t>(1, min_side(n, minFraction));
    if (n < 2 || lo > n - lo)
        throw std::invalid_argument("bipartition needs n >= 2 and a balance fraction of at most 1/2");
    const auto order = topological_order(dag);
    Bipartition best;
    best.fallback = true;
    best.status = "prefix";
    best.cut = std::numeric_limits<std::size_t>::max();
    std::vector<std::uint32_t> part(n, 1);
    for (std::size_t k = 0; k < lo; ++k)
        part[order[k]] = 0;
    for (std::size_t k = lo; k <= n - lo; ++k) {
        const std::size_t cut = hyperedge_cut(dag, part);
        if (cut < best.cut) {
            best.cut = cut;
            best.partition = AcyclicPartition{part, 2};
        }
        if (k < n)
            part[order[k]] = 0;
    }
    return best;
}

Bipartition acyclic_bipartition_ilp(const WeightedDag &dag, double minFraction, const std::optional<SolverConfig> &solver) {
    Bipartition prefix = topological_prefix_split(dag, minFraction);
    if (!solver) {
        prefix.status = "no solver";
        return prefix;
    }
    const std::size_t n = dag.size();
    const double lo = static_cast<double>(std::max<std::size_t>(1, min_side(n, minFraction)));
    MilpModel m;
    std::vector<std::int32_t> x(n);
    std::vector<std::int32_t> y(n, -1);
    for (NodeId v = 0; v < n; ++v)
        x[v] = m.addBinary("x_v" + std::to_string(v));
    LinExpr objective;
    LinExpr size;
    for (NodeId u = 0; u < n; ++u) {
        size.add(x[u]);
        if (dag.isSink(u))
            continue;
        y[u] = m.addBinary("y_v" + std::to_string(u));
        objective.add(y[u]);
        for (NodeId v : dag.children(u)) {
            // Edges only run from part 0 to part 1; y_u marks a cut hyperedge.
            m.addConstraint(LinExpr{}.add(x[u]), Sense::Le, LinExpr{}.add(x[v]));
            m.addConstraint(LinExpr{}.add(y[u]), Sense::Ge, LinExpr{}.add(x[v]).add(x[u], -1.0));
        }
    }
    m.addConstraint(size, Sense::Ge, lo);
    m.addConstraint(size, Sense::Le, static_cast<double>(n) - lo);
    m.setObjective(objective);

    Assignment warm(m.numVariables(), 0.0);
    const auto &pp = prefix.partition.part;
    for (NodeId u = 0; u < n; ++u) {
        warm[static_cast<std::size_t>(x[u])] = pp[u];
        if (y[u] >= 0)
            warm[static_cast<std::size_t>(y[u])] =
                std::any_of(dag.children(u).begin(), dag.children(u).end(), [&](NodeId v) { return pp[v] != pp[u]; });
    }
    SolverConfig cfg = *solver;
    cfg.warmStart = warm;
    const SolverRun run = solve(m, cfg);
    if (!run.assignment) {
        prefix.status = std::string(status_name(run.status)) + ": " + run.message;
        return prefix;
    }
    Bipartition out;
    out.partition.parts = 2;
    out.partition.part.resize(n);
    for (NodeId v = 0; v < n; ++v)
        out.partition.part[v] = (*run.assignment)[static_cast<std::size_t>(x[v])] > 0.5 ? 1 : 0;
    out.cut = hyperedge_cut(dag, out.partition.part);
    out.status = status_name(run.status);
    out.fallback = run.status != SolverStatus::Optimal && out.cut >= prefix.cut;
    return out;
}

AcyclicPartition recursive_partition(const WeightedDag &dag, std::size_t maxPart, const std::optional<SolverConfig> &solver,
                                     std::vector<Bipartition> *log, double minFraction) {
    if (maxPart < 2)
        throw std::invalid_argument("maximum part size must be at least 2");
    std::vector<std::vector<NodeId>> parts;
    if (dag.size() > 0) {
        parts.emplace_back(dag.size());
        std::iota(parts[0].begin(), parts[0].end(), NodeId{0});
    }
    // Replacing a part by (part 0, part 1) in place keeps the list topologically ordered.
    for (std::size_t i = 0; i < parts.size();) {
        if (parts[i].size() <= maxPart) {
            ++i;
            continue;
        }
        const WeightedDag sub = induced_subgraph(dag, parts[i]);
        Bipartition b = acyclic_bipartition_ilp(sub, minFraction, solver);
        std::vector<NodeId> first;
        std::vector<NodeId> second;
        for (std::size_t k = 0; k < parts[i].size(); ++k)
            (b.partition.part[k] == 0 ? first : second).push_back(parts[i][k]);
        parts[i] = std::move(first);
        parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(second));
        if (log != nullptr)
            log->push_back(std::move(b));
    }
    AcyclicPartition out;
    out.parts = static_cast<std::uint32_t>(parts.size());
    out.part.assign(dag.size(), 0);
    for (std::uint32_t k = 0; k < parts.size(); ++k)
        for (NodeId v : parts[k])
            out.part[v] = k;
    return out;
}

void write_partition_csv(std::ostream &out, const AcyclicPartition &p) {
    out << "node,part\n";
    for (NodeId v = 0; v < p.part.size(); ++v)
        out << v << ',' << p.part[v] << '\n';
}

AcyclicPartition read_partition_csv(std::istream &in) {
    AcyclicPartition p;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || (lineNo == 1 && line == "node,part"))
            continue;
        std::istringstream ls(line);
        long long v = -1;
        long long part = -1;
        char comma = 0;
        std::string rest;
        if (!(ls >> v >> comma >> part) || comma != ',' || v < 0 || part < 0 || (ls >> rest))
            throw ParseError(lineNo, "expected `node,part`");
        if (static_cast<std::size_t>(v) != p.part.size())
            throw ParseError(lineNo, "nodes must be listed in order from 0");
        p.part.push_back(static_cast<std::uint32_t>(part));
        p.parts = std::max(p.parts, static_cast<std::uint32_t>(part) + 1);
    }
    return p;
}

std::vector<PartPlan> quotient_plan(const WeightedDag &q, const Architecture &arch) {
    const std::size_t m = q.size();
    std::vector<PartPlan> plan(m);
    std::vector<std::size_t> waiting(m);
    std::set<NodeId> ready;
    for (NodeId v = 0; v < m; ++v) {
        waiting[v] = q.parents(v).size();
        if (waiting[v] == 0)
            ready.insert(v);
    }
    std::vector<std::uint32_t> idle(arch.P);
    std::iota(idle.begin(), idle.end(), 0U);
    std::multiset<std::pair<Weight, NodeId>> running;
    Weight now = 0;
    std::uint32_t order = 0;
    while (order < m || !running.empty()) {
        if (!ready.empty() && !idle.empty()) {
            std::vector<NodeId> take(ready.begin(), ready.end());
            take.resize(std::min(take.size(), idle.size()));
            // Each part gets one processor; the rest go by largest remainder of the weight share.
            std::vector<std::size_t> share(take.size(), 1);
            const std::size_t extra = idle.size() - take.size();
            Weight total = 0;
            for (NodeId v : take)
                total += q.omega(v);
            std::vector<std::pair<double, std::size_t>> rem;
            std::size_t given = 0;
            for (std::size_t k = 0; k < take.size(); ++k) {
                const double exact = total > 0 ? static_cast<double>(extra) * static_cast<double>(q.omega(take[k])) /
                                                      static_cast<double>(total)
                                                : static_cast<double>(extra) / static_cast<double>(take.size());
                const auto whole = static_cast<std::size_t>(std::floor(exact));
                share[k] += whole;
                given += whole;
                rem.emplace_back(-(exact - static_cast<double>(whole)), k);
            }
            std::sort(rem.begin(), rem.end());
            for (std::size_t k = 0; given < extra; ++k, ++given)
                ++share[rem[k].second];
            std::size_t next = 0;
            for (std::size_t k = 0; k < take.size(); ++k) {
                PartPlan &pl = plan[take[k]];
                pl.processors.assign(idle.begin() + static_cast<std::ptrdiff_t>(next),
                                     idle.begin() + static_cast<std::ptrdiff_t>(next + share[k]));
                next += share[k];
                const auto procs = static_cast<Weight>(pl.processors.size());
                pl.order = order++;
                pl.start = now;
                pl.finish = now + (q.omega(take[k]) + procs - 1) / procs;
                running.emplace(pl.finish, take[k]);
                ready.erase(take[k]);
            }
            idle.clear();
            continue;
        }
        if (running.empty())
            throw std::logic_error("quotient plan stalled; the quotient has a cycle");
        now = running.begin()->first;
        while (!running.empty() && running.begin()->first == now) {
            const NodeId v = running.begin()->second;
            running.erase(running.begin());
            idle.insert(idle.end(), plan[v].processors.begin(), plan[v].processors.end());
            for (NodeId c : q.children(v))
                if (--waiting[c] == 0)
                    ready.insert(c);
        }
        std::sort(idle.begin(), idle.end());
    }
    return plan;
}

SubproblemSpec make_subproblem(const MbspInstance &inst, const AcyclicPartition &partition, std::uint32_t part,
                               const std::vector<std::uint32_t> &processors,
                               const std::vector<std::vector<NodeId>> &carryRed) {
    const auto &dag = inst.dag;
    SubproblemSpec spec;
    spec.part = part;
    spec.processors = processors;
    std::vector<NodeId> own;
    std::set<NodeId> inputs;
    for (NodeId v = 0; v < dag.size(); ++v) {
        if (partition.part[v] != part)
            continue;
        own.push_back(v);
        for (NodeId u : dag.parents(v))
            if (partition.part[u] != part)
                inputs.insert(u);
    }
    spec.global.assign(inputs.begin(), inputs.end());
    spec.boundaryInputs = spec.global.size();
    spec.global.insert(spec.global.end(), own.begin(), own.end());
    std::vector<std::int64_t> local(dag.size(), -1);
    for (std::size_t k = 0; k < spec.global.size(); ++k)
        local[spec.global[k]] = static_cast<std::int64_t>(k);

    std::vector<NodeWeights> w;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId g : spec.global)
        w.push_back(dag.weights()[g]);
    for (NodeId v : own)
        for (NodeId u : dag.parents(v))
            edges.emplace_back(static_cast<NodeId>(local[u]), static_cast<NodeId>(local[v]));
    const Architecture arch{static_cast<std::uint32_t>(processors.size()), inst.arch.r, inst.arch.g, inst.arch.L};
    spec.instance = MbspInstance(WeightedDag(std::move(w), edges), arch);
    for (std::size_t i = 0; i < processors.size() && i < carryRed.size(); ++i)
        for (NodeId g : carryRed[i])
            if (local[g] >= 0)
                spec.instance.initialRed[i].push_back(static_cast<NodeId>(local[g]));
    std::set<NodeId> required(inst.requiredBlue.begin(), inst.requiredBlue.end());
    for (NodeId v : own) {
        const bool leaves = std::any_of(dag.children(v).begin(), dag.children(v).end(),
                                        [&](NodeId c) { return partition.part[c] != part; });
        if (leaves || required.count(v) != 0)
            spec.instance.requiredBlue.push_back(static_cast<NodeId>(local[v]));
    }
    spec.instance.normalize();
    return spec;
}

namespace {

// Red sets per global processor while sub-schedules are appended in planned order.
class Concatenation {
  public:
    explicit Concatenation(const MbspInstance &inst)
        : inst_(inst), out_(inst.arch.P), next_(inst.arch.P, 0), red_(inst.arch.P),
          blueStep_(inst.dag.size(), kNever) {
        for (std::uint32_t p = 0; p < inst.arch.P && p < inst.initialRed.size(); ++p)
            red_[p].insert(inst.initialRed[p].begin(), inst.initialRed[p].end());
        for (NodeId v : inst.dag.sources())
            blueStep_[v] = 0;
    }

    /// Reds of each listed processor, in global ids.
    std::vector<std::vector<NodeId>> carry(const std::vector<std::uint32_t> &procs) const {
        std::vector<std::vector<NodeId>> c;
        for (std::uint32_t p : procs)
            c.emplace_back(red_[p].begin(), red_[p].end());
        return c;
    }

    void append(const SubproblemSpec &spec, const MbspSchedule &sub) {
        std::size_t base = 0;
        for (std::uint32_t p : spec.processors)
            base = std::max(base, next_[p]);
        for (std::size_t k = 0; k < spec.boundaryInputs; ++k) {
            const std::size_t s = blueStep_[spec.global[k]];
            if (s == kNever)
                throw std::logic_error("boundary input " + std::to_string(spec.global[k]) + " was never saved");
            base = std::max(base, s);
        }
        std::size_t len = sub.size();
        for (std::uint32_t i = 0; i < spec.processors.size(); ++i) {
            const std::uint32_t p = spec.processors[i];
            std::set<NodeId> keep;
            for (NodeId v : spec.instance.initialRed[i])
                keep.insert(spec.global[v]);
            // Values the part cannot use are dropped before it starts.
            for (NodeId v : red_[p])
                if (keep.count(v) == 0) {
                    ensure(base + 1);
                    out_.at(base, p).comp.push_back({TransitionKind::Delete, v});
                    len = std::max<std::size_t>(len, 1);
                }
            red_[p] = std::move(keep);
        }
        ensure(base + len);
        static constexpr Phase kPhases[] = {Phase::Comp, Phase::Save, Phase::Del, Phase::Load};
        for (std::size_t k = 0; k < sub.size(); ++k)
            for (std::uint32_t i = 0; i < spec.processors.size(); ++i) {
                const std::uint32_t p = spec.processors[i];
                for (Phase ph : kPhases)
                    for (const Op &op : sub.at(k, i).phase(ph)) {
                        const NodeId v = spec.global[op.node];
                        out_.at(base + k, p).phase(ph).push_back({op.kind, v});
                        if (op.kind == TransitionKind::Compute || op.kind == TransitionKind::Load)
                            red_[p].insert(v);
                        else if (op.kind == TransitionKind::Delete)
                            red_[p].erase(v);
                        else if (blueStep_[v] == kNever)
                            blueStep_[v] = base + k;
                    }
            }
        for (std::uint32_t p : spec.processors)
            next_[p] = base + len;
    }

    MbspSchedule finish() {
        out_.removeEmptySupersteps();
        return std::move(out_);
    }

  private:
    static constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

    void ensure(std::size_t steps) {
        if (out_.size() < steps)
            out_.resize(steps);
    }

    const MbspInstance &inst_;
    MbspSchedule out_;
    std::vector<std::size_t> next_;
    std::vector<std::set<NodeId>> red_;
    std::vector<std::size_t> blueStep_;
};

std::vector<std::uint32_t> planned_order(const std::vector<PartPlan> &plan) {
    std::vector<std::uint32_t> order(plan.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return plan[a].order < plan[b].order; });
    return order;
}

} // namespace

std::vector<SubResult> solve_subproblems(const MbspInstance &inst, const AcyclicPartition &partition,
                                         const std::vector<PartPlan> &plan, const DncConfig &cfg) {
    std::vector<SubResult> out;
    Concatenation concat(inst);
    for (std::uint32_t part : planned_order(plan)) {
        const auto t0 = std::chrono::steady_clock::now();
        SubResult r;
        const auto &procs = plan[part].processors;
        r.spec = make_subproblem(inst, partition, part, procs, concat.carry(procs));
        const MbspInstance &sub = r.spec.instance;
        const Objective obj = cfg.ilp.objective;
        const MbspSchedule warm = two_stage_schedule(sub);
        r.warmCost = schedule_cost(sub, warm, obj);
        r.schedule = warm;
        r.cost = r.warmCost;
        r.fallback = true;
        r.status = "no solver";
        if (cfg.useSolver) {
            try {
                IlpConfig ic = cfg.ilp;
                ic.T = choose_horizon(sub, warm, ic);
                const IlpResult res = solve_mbsp(build_full_ilp(sub, ic), cfg.solver, warm);
                r.status = status_name(res.run.status);
                if (res.schedule && res.cost <= r.warmCost) {
                    r.schedule = *res.schedule;
                    r.cost = res.cost;
                    r.fallback = res.fromWarmStart;
                }
                if (!res.run.message.empty())
                    r.status += ": " + res.run.message;
            } catch (const std::exception &e) {
                r.status = std::string("error: ") + e.what();
            }
        }
        concat.append(r.spec, r.schedule);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

MbspSchedule concatenate(const MbspInstance &inst, const std::vector<SubResult> &subs) {
    Concatenation concat(inst);
    for (const SubResult &r : subs)
        concat.append(r.spec, r.schedule);
    return concat.finish();
}

namespace {

struct Costs {
    Weight sync;
    Weight async;
    bool noWorseThan(const Costs &o) const { return sync <= o.sync && async <= o.async; }
};

std::optional<Costs> accept(const MbspInstance &inst, const MbspSchedule &s) {
    if (!validate_schedule(inst, s).valid())
        return std::nullopt;
    return Costs{schedule_cost(inst, s, Objective::Sync), schedule_cost(inst, s, Objective::Async)};
}

// Superstep i absorbs i+1 on every processor whose comm phase in i is empty or whose part of i+1 is empty.
std::optional<MbspSchedule> merged(const MbspSchedule &s, std::size_t i) {
    MbspSchedule out = s;
    for (std::uint32_t p = 0; p < s.processors(); ++p) {
        const ProcessorSuperstep &a = s.at(i, p);
        const ProcessorSuperstep &b = s.at(i + 1, p);
        ProcessorSuperstep &m = out.at(i, p);
        if (a.save.empty() && a.del.empty() && a.load.empty()) {
            m.comp.insert(m.comp.end(), b.comp.begin(), b.comp.end());
            m.save = b.save;
            m.del = b.del;
            m.load = b.load;
        } else if (!b.empty()) {
            return std::nullopt;
        }
    }
    out.erase(i + 1);
    return out;
}

struct OpRef {
    std::size_t step;
    std::uint32_t p;
    Phase phase;
    std::size_t pos;
    bool operator<(const OpRef &o) const {
        return std::tie(step, p, phase, pos) < std::tie(o.step, o.p, o.phase, o.pos);
    }
};

MbspSchedule without(const MbspSchedule &s, const std::set<OpRef> &drop) {
    MbspSchedule out = s;
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
        auto &ops = out.at(it->step, it->p).phase(it->phase);
        ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(it->pos));
    }
    return out;
}

} // namespace

MbspSchedule streamline(const MbspInstance &inst, const MbspSchedule &schedule) {
    MbspSchedule cur = schedule;
    cur.removeEmptySupersteps();
    auto costs = accept(inst, cur);
    if (!costs)
        throw std::invalid_argument("streamline needs a valid schedule");

    for (std::size_t i = 0; i + 1 < cur.size();) {
        auto cand = merged(cur, i);
        std::optional<Costs> c;
        if (cand && (c = accept(inst, *cand)) && c->noWorseThan(*costs)) {
            cur = std::move(*cand);
            costs = c;
        } else {
            ++i;
        }
    }

    // A delete followed, on the same processor, by a reload of the same value with nothing
    // else touching it in between: keep the value instead, if memory allows.
    static constexpr Phase kPhases[] = {Phase::Comp, Phase::Save, Phase::Del, Phase::Load};
    std::vector<std::pair<OpRef, OpRef>> pairs;
    for (std::uint32_t p = 0; p < cur.processors(); ++p) {
        std::vector<std::optional<OpRef>> pendingDelete(inst.dag.size());
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (Phase ph : kPhases) {
                const auto &ops = cur.at(i, p).phase(ph);
                for (std::size_t k = 0; k < ops.size(); ++k) {
                    const OpRef here{i, p, ph, k};
                    auto &d = pendingDelete[ops[k].node];
                    if (ops[k].kind == TransitionKind::Load && d)
                        pairs.emplace_back(*d, here);
                    d.reset();
                    if (ops[k].kind == TransitionKind::Delete)
                        d = here;
                }
            }
    }
    std::set<OpRef> drop;
    for (const auto &[del, load] : pairs) {
        std::set<OpRef> trial = drop;
        trial.insert(del);
        trial.insert(load);
        const MbspSchedule cand = without(cur, trial);
        if (auto c = accept(inst, cand); c && c->noWorseThan(*costs)) {
            drop = std::move(trial);
            costs = c;
        }
    }
    cur = without(cur, drop);
    cur.removeEmptySupersteps();
    return cur;
}

DncResult divide_and_conquer(const MbspInstance &inst, const DncConfig &cfg) {
    DncResult r;
    std::optional<SolverConfig> partSolver;
    if (cfg.useSolver) {
        partSolver = cfg.solver;
        partSolver->timeLimit = cfg.partitionTimeLimit;
        partSolver->warmStart.reset();
    }
    r.partition = recursive_partition(inst.dag, cfg.maxPart, partSolver, &r.splits, cfg.minFraction);
    r.plan = quotient_plan(quotient_graph(inst.dag, r.partition.part), inst.arch);
    r.subs = solve_subproblems(inst, r.partition, r.plan, cfg);
    r.naive = concatenate(inst, r.subs);
    if (auto v = validate_schedule(inst, r.naive); !v.valid())
        throw std::logic_error("concatenated schedule is invalid: " + v.violation->describe());
    r.schedule = streamline(inst, r.naive);
    return r;
}

void write_dnc_report(std::ostream &out, const MbspInstance &inst, const DncResult &r) {
    for (const SubResult &s : r.subs) {
        nlohmann::json j;
        j["part"] = s.spec.part;
        j["nodes"] = s.spec.global.size() - s.spec.boundaryInputs;
        j["boundary_inputs"] = s.spec.boundaryInputs;
        j["processors"] = s.spec.processors;
        j["status"] = s.status;
        j["fallback"] = s.fallback;
        j["warm_cost"] = s.warmCost;
        j["cost"] = s.cost;
        j["seconds"] = s.seconds;
        out << j.dump() << '\n';
    }
    nlohmann::json j;
    j["parts"] = r.partition.parts;
    j["cut"] = hyperedge_cut(inst.dag, r.partition.part);
    std::size_t fallbacks = 0;
    for (const Bipartition &b : r.splits)
        fallbacks += b.fallback ? 1 : 0;
    j["partition_fallbacks"] = fallbacks;
    j["naive_sync_cost"] = schedule_cost(inst, r.naive, Objective::Sync);
    j["sync_cost"] = schedule_cost(inst, r.schedule, Objective::Sync);
    j["async_cost"] = schedule_cost(inst, r.schedule, Objective::Async);
    out << j.dump() << '\n';
}

} // namespace mbsp
