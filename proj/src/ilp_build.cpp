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

#include "mbsp/milp.hpp"

#include <algorithm>
#include <stdexcept>

namespace mbsp {

Weight default_big_m(const MbspInstance &inst, std::uint32_t T) {
    const Weight work = inst.dag.totalOmega() + inst.arch.g * inst.dag.totalMu();
    const Weight step = inst.dag.totalOmega() + 2 * inst.arch.g * inst.dag.totalMu();
    return std::max<Weight>({Weight{1}, Weight{inst.arch.P} * work, Weight{T} * step});
}

namespace {

std::string pvt_name(const char *family, std::uint32_t p, NodeId v, std::uint32_t t) {
    return std::string(family) + "_p" + std::to_string(p) + "_v" + std::to_string(v) + "_t" + std::to_string(t);
}

std::string pt_name(const char *family, std::uint32_t p, std::uint32_t t) {
    return std::string(family) + "_p" + std::to_string(p) + "_t" + std::to_string(t);
}

std::string t_name(const char *family, std::uint32_t t) { return std::string(family) + "_t" + std::to_string(t); }

class Builder {
  public:
    Builder(const MbspInstance &inst, const IlpConfig &cfg) : m_{} {
        m_.inst = inst;
        m_.inst.normalize();
        m_.cfg = cfg;
        m_.bigM = cfg.bigM > 0 ? cfg.bigM : default_big_m(m_.inst, cfg.T);
        auto &L = m_.layout;
        L.P = inst.arch.P;
        L.n = static_cast<std::uint32_t>(inst.dag.size());
        L.T = cfg.T;
        initRed_.assign(L.P, std::vector<std::uint8_t>(L.n, 0));
        for (std::uint32_t p = 0; p < L.P; ++p)
            for (NodeId v : m_.inst.initialRed[p])
                initRed_[p][v] = 1;
    }

    MbspIlp build() {
        variables();
        pebbling();
        if (m_.cfg.objective == Objective::Sync)
            sync();
        else
            async();
        if (!m_.cfg.allowRecompute)
            m_ = forbid_recompute(std::move(m_));
        return std::move(m_);
    }

  private:
    const WeightedDag &dag() const { return m_.inst.dag; }
    bool merged() const { return m_.cfg.stepMerging; }

    LinExpr red(std::uint32_t p, NodeId v, std::uint32_t t) const {
        LinExpr e;
        if (t == 0)
            return e.addConstant(initRed_[p][v]);
        return e.add(m_.layout.red[m_.layout.pvs(p, v, t)]);
    }

    LinExpr blue(NodeId v, std::uint32_t t) const {
        LinExpr e;
        if (dag().isSource(v))
            return e.addConstant(1);
        if (t == 0)
            return e;
        return e.add(m_.layout.blue[m_.layout.vs(v, t)]);
    }

    std::int32_t comp(std::uint32_t p, NodeId v, std::uint32_t t) const { return m_.layout.comp[m_.layout.pvt(p, v, t)]; }
    std::int32_t save(std::uint32_t p, NodeId v, std::uint32_t t) const { return m_.layout.save[m_.layout.pvt(p, v, t)]; }
    std::int32_t load(std::uint32_t p, NodeId v, std::uint32_t t) const { return m_.layout.load[m_.layout.pvt(p, v, t)]; }

    void variables() {
        auto &L = m_.layout;
        auto &milp = m_.milp;
        const std::size_t pvt = std::size_t{L.P} * L.n * L.T;
        L.comp.assign(pvt, -1);
        L.save.assign(pvt, -1);
        L.load.assign(pvt, -1);
        L.red.assign(std::size_t{L.P} * L.n * (L.T + 1), -1);
        L.blue.assign(std::size_t{L.n} * (L.T + 1), -1);
        for (std::uint32_t p = 0; p < L.P; ++p)
            for (NodeId v = 0; v < L.n; ++v)
                for (std::uint32_t t = 0; t < L.T; ++t) {
                    if (!dag().isSource(v)) {
                        L.comp[L.pvt(p, v, t)] = milp.addBinary(pvt_name("comp", p, v, t));
                        L.save[L.pvt(p, v, t)] = milp.addBinary(pvt_name("save", p, v, t));
                    }
                    L.load[L.pvt(p, v, t)] = milp.addBinary(pvt_name("load", p, v, t));
                }
        for (std::uint32_t p = 0; p < L.P; ++p)
            for (NodeId v = 0; v < L.n; ++v)
                for (std::uint32_t t = 1; t <= L.T; ++t)
                    L.red[L.pvs(p, v, t)] = milp.addBinary(pvt_name("red", p, v, t));
        for (NodeId v = 0; v < L.n; ++v)
            if (!dag().isSource(v))
                for (std::uint32_t t = 1; t <= L.T; ++t)
                    L.blue[L.vs(v, t)] = milp.addBinary("blue_v" + std::to_string(v) + "_t" + std::to_string(t));
        if (merged()) {
            L.compstep.assign(std::size_t{L.P} * L.T, -1);
            L.commstep.assign(std::size_t{L.P} * L.T, -1);
            for (std::uint32_t p = 0; p < L.P; ++p)
                for (std::uint32_t t = 0; t < L.T; ++t) {
                    L.compstep[L.pt(p, t)] = milp.addBinary(pt_name("compstep", p, t));
                    L.commstep[L.pt(p, t)] = milp.addBinary(pt_name("commstep", p, t));
                }
        }
    }

    void pebbling() {
        auto &L = m_.layout;
        auto &milp = m_.milp;
        const Weight r = m_.inst.arch.r;
        for (std::uint32_t p = 0; p < L.P; ++p) {
            for (std::uint32_t t = 0; t < L.T; ++t) {
                LinExpr ops;
                LinExpr comps;
                LinExpr comms;
                LinExpr memory;
                for (NodeId v = 0; v < L.n; ++v) {
                    // Load needs a blue pebble; save needs a red one.
                    if (!dag().isSource(v))
                        milp.addConstraint(LinExpr{}.add(load(p, v, t)), Sense::Le, blue(v, t));
                    if (save(p, v, t) >= 0)
                        milp.addConstraint(LinExpr{}.add(save(p, v, t)), Sense::Le, red(p, v, t));
                    // Compute needs every parent red (or computed in the same merged step).
                    if (comp(p, v, t) >= 0) {
                        for (NodeId u : dag().parents(v)) {
                            LinExpr have = red(p, u, t);
                            if (merged())
                                have.add(comp(p, u, t));
                            milp.addConstraint(LinExpr{}.add(comp(p, v, t)), Sense::Le, have);
                        }
                    }
                    // A red pebble persists, or arrives by compute or load.
                    LinExpr next = red(p, v, t);
                    next.add(comp(p, v, t)).add(load(p, v, t));
                    milp.addConstraint(red(p, v, t + 1), Sense::Le, next);

                    ops.add(comp(p, v, t)).add(save(p, v, t)).add(load(p, v, t));
                    comps.add(comp(p, v, t));
                    comms.add(save(p, v, t)).add(load(p, v, t));
                    const double mu = static_cast<double>(dag().mu(v));
                    for (const LinTerm &x : red(p, v, t).terms)
                        memory.add(x.var, mu);
                    memory.addConstant(mu * red(p, v, t).constant);
                    memory.add(comp(p, v, t), mu);
                }
                if (merged()) {
                    const double nn = L.n;
                    const std::int32_t cs = L.compstep[L.pt(p, t)];
                    const std::int32_t ms = L.commstep[L.pt(p, t)];
                    milp.addConstraint(comps, Sense::Le, LinExpr{}.add(cs, nn));
                    // Async I/O stays one transition per step so finishing times are exact.
                    const double cap = m_.cfg.objective == Objective::Async ? 1.0 : 2.0 * nn;
                    milp.addConstraint(comms, Sense::Le, LinExpr{}.add(ms, cap));
                    milp.addConstraint(LinExpr{}.add(cs).add(ms), Sense::Le, 1.0);
                } else {
                    milp.addConstraint(ops, Sense::Le, 1.0);
                }
                milp.addConstraint(memory, Sense::Le, static_cast<double>(r));
            }
            LinExpr last;
            for (NodeId v = 0; v < L.n; ++v)
                last.add(L.red[L.pvs(p, v, L.T)], static_cast<double>(dag().mu(v)));
            milp.addConstraint(last, Sense::Le, static_cast<double>(r));
        }
        for (NodeId v = 0; v < L.n; ++v) {
            if (dag().isSource(v))
                continue;
            for (std::uint32_t t = 0; t < L.T; ++t) {
                LinExpr next = blue(v, t);
                for (std::uint32_t p = 0; p < L.P; ++p)
                    next.add(save(p, v, t));
                milp.addConstraint(blue(v, t + 1), Sense::Le, next);
            }
        }
        for (NodeId v : m_.inst.requiredBlue)
            if (!dag().isSource(v))
                milp.addConstraint(blue(v, L.T), Sense::Ge, 1.0);
    }

    LinExpr comm_phase(std::uint32_t t) const {
        const auto &L = m_.layout;
        LinExpr e;
        if (merged())
            return e.add(L.commphase[t]);
        return e.add(L.savephase[t]).add(L.loadphase[t]);
    }

    void sync() {
        auto &L = m_.layout;
        auto &milp = m_.milp;
        const double M = static_cast<double>(m_.bigM);
        const double g = static_cast<double>(m_.inst.arch.g);
        auto series = [&](std::vector<std::int32_t> &out, const char *family) {
            out.resize(L.T);
            for (std::uint32_t t = 0; t < L.T; ++t)
                out[t] = milp.addBinary(t_name(family, t));
        };
        auto cseries = [&](std::vector<std::int32_t> &out, const char *family) {
            out.resize(L.T);
            for (std::uint32_t t = 0; t < L.T; ++t)
                out[t] = milp.addContinuous(t_name(family, t));
        };
        auto pseries = [&](std::vector<std::int32_t> &out, const char *family) {
            out.resize(std::size_t{L.P} * L.T);
            for (std::uint32_t p = 0; p < L.P; ++p)
                for (std::uint32_t t = 0; t < L.T; ++t)
                    out[L.pt(p, t)] = milp.addContinuous(pt_name(family, p, t));
        };
        series(L.compphase, "compphase");
        if (merged()) {
            series(L.commphase, "commphase");
        } else {
            series(L.savephase, "savephase");
            series(L.loadphase, "loadphase");
        }
        series(L.compends, "compends");
        series(L.commends, "commends");
        pseries(L.compuntil, "compuntil");
        pseries(L.saveuntil, "saveuntil");
        pseries(L.loaduntil, "loaduntil");
        cseries(L.compinduced, "compinduced");
        cseries(L.saveinduced, "saveinduced");
        cseries(L.loadinduced, "loadinduced");
        cseries(L.comminduced, "comminduced");

        for (std::uint32_t t = 0; t < L.T; ++t) {
            // Phase indicators: a step is a compute step or a communication step for every processor.
            for (std::uint32_t p = 0; p < L.P; ++p) {
                if (merged()) {
                    milp.addConstraint(LinExpr{}.add(L.compstep[L.pt(p, t)]), Sense::Le, LinExpr{}.add(L.compphase[t]));
                    milp.addConstraint(LinExpr{}.add(L.commstep[L.pt(p, t)]), Sense::Le, LinExpr{}.add(L.commphase[t]));
                } else {
                    LinExpr c;
                    LinExpr s;
                    LinExpr l;
                    for (NodeId v = 0; v < L.n; ++v) {
                        c.add(comp(p, v, t));
                        s.add(save(p, v, t));
                        l.add(load(p, v, t));
                    }
                    milp.addConstraint(c, Sense::Le, LinExpr{}.add(L.compphase[t]));
                    milp.addConstraint(s, Sense::Le, LinExpr{}.add(L.savephase[t]));
                    milp.addConstraint(l, Sense::Le, LinExpr{}.add(L.loadphase[t]));
                }
            }
            LinExpr excl = comm_phase(t);
            excl.add(L.compphase[t]);
            milp.addConstraint(excl, Sense::Le, 1.0);

            // Phase ends: the last step of every maximal run.
            milp.addConstraint(LinExpr{}.add(L.compends[t]), Sense::Le, LinExpr{}.add(L.compphase[t]));
            LinExpr compEnd = LinExpr{}.add(L.compphase[t]);
            if (t + 1 < L.T)
                compEnd.add(L.compphase[t + 1], -1.0);
            milp.addConstraint(LinExpr{}.add(L.compends[t]), Sense::Ge, compEnd);
            milp.addConstraint(LinExpr{}.add(L.commends[t]), Sense::Le, comm_phase(t));
            LinExpr commEnd = comm_phase(t);
            if (t + 1 < L.T)
                for (const LinTerm &x : comm_phase(t + 1).terms)
                    commEnd.add(x.var, -x.coef);
            milp.addConstraint(LinExpr{}.add(L.commends[t]), Sense::Ge, commEnd);

            // Running sums per processor, reset at superstep boundaries.
            for (std::uint32_t p = 0; p < L.P; ++p) {
                LinExpr cu;
                LinExpr su;
                LinExpr lu;
                for (NodeId v = 0; v < L.n; ++v) {
                    cu.add(comp(p, v, t), static_cast<double>(dag().omega(v)));
                    su.add(save(p, v, t), g * static_cast<double>(dag().mu(v)));
                    lu.add(load(p, v, t), g * static_cast<double>(dag().mu(v)));
                }
                if (t > 0) {
                    // The reset below relaxes the whole sum, so the step's own work needs its own bound.
                    milp.addConstraint(LinExpr{}.add(L.saveuntil[L.pt(p, t)]), Sense::Ge, su);
                    milp.addConstraint(LinExpr{}.add(L.loaduntil[L.pt(p, t)]), Sense::Ge, lu);
                    cu.add(L.compuntil[L.pt(p, t - 1)]);
                    su.add(L.saveuntil[L.pt(p, t - 1)]).add(L.commends[t - 1], -M);
                    lu.add(L.loaduntil[L.pt(p, t - 1)]).add(L.commends[t - 1], -M);
                }
                cu.add(L.commends[t], -M);
                milp.addConstraint(LinExpr{}.add(L.compuntil[L.pt(p, t)]), Sense::Ge, cu);
                milp.addConstraint(LinExpr{}.add(L.saveuntil[L.pt(p, t)]), Sense::Ge, su);
                milp.addConstraint(LinExpr{}.add(L.loaduntil[L.pt(p, t)]), Sense::Ge, lu);

                // Induced costs: the maximum over processors at the end of each phase.
                milp.addConstraint(LinExpr{}.add(L.compinduced[t]), Sense::Ge,
                                   LinExpr{}.add(L.compuntil[L.pt(p, t)]).add(L.compends[t], M).addConstant(-M));
                milp.addConstraint(LinExpr{}.add(L.saveinduced[t]), Sense::Ge,
                                   LinExpr{}.add(L.saveuntil[L.pt(p, t)]).add(L.commends[t], M).addConstant(-M));
                milp.addConstraint(LinExpr{}.add(L.loadinduced[t]), Sense::Ge,
                                   LinExpr{}.add(L.loaduntil[L.pt(p, t)]).add(L.commends[t], M).addConstant(-M));
            }
            milp.addConstraint(LinExpr{}.add(L.comminduced[t]), Sense::Eq,
                               LinExpr{}.add(L.saveinduced[t]).add(L.loadinduced[t]));
        }
        // Valid cuts: summed phase maxima dominate each processor's own totals. Every operation lies in a
        // phase whose end charges at least the running sum containing it.
        for (std::uint32_t p = 0; p < L.P; ++p) {
            LinExpr work, saved, loaded;
            for (std::uint32_t t = 0; t < L.T; ++t) {
                work.add(L.compinduced[t], -1.0);
                saved.add(L.saveinduced[t], -1.0);
                loaded.add(L.loadinduced[t], -1.0);
                for (NodeId v = 0; v < L.n; ++v) {
                    work.add(comp(p, v, t), static_cast<double>(dag().omega(v)));
                    saved.add(save(p, v, t), g * static_cast<double>(dag().mu(v)));
                    loaded.add(load(p, v, t), g * static_cast<double>(dag().mu(v)));
                }
            }
            milp.addConstraint(work, Sense::Le, 0.0);
            milp.addConstraint(saved, Sense::Le, 0.0);
            milp.addConstraint(loaded, Sense::Le, 0.0);
        }

        LinExpr obj;
        for (std::uint32_t t = 0; t < L.T; ++t)
            obj.add(L.compinduced[t]).add(L.comminduced[t]).add(L.commends[t], static_cast<double>(m_.inst.arch.L));
        milp.setObjective(obj);
    }

    void async() {
        auto &L = m_.layout;
        auto &milp = m_.milp;
        const double M = static_cast<double>(m_.bigM);
        const double g = static_cast<double>(m_.inst.arch.g);
        L.finish.resize(std::size_t{L.P} * L.T);
        for (std::uint32_t p = 0; p < L.P; ++p)
            for (std::uint32_t t = 0; t < L.T; ++t)
                L.finish[L.pt(p, t)] = milp.addContinuous(pt_name("finish", p, t));
        L.getsblue.assign(L.n, -1);
        for (NodeId v = 0; v < L.n; ++v)
            if (!dag().isSource(v))
                L.getsblue[v] = milp.addContinuous("getsblue_v" + std::to_string(v));
        L.makespan = milp.addContinuous("makespan");

        for (std::uint32_t p = 0; p < L.P; ++p) {
            for (std::uint32_t t = 0; t < L.T; ++t) {
                const std::int32_t f = L.finish[L.pt(p, t)];
                LinExpr step;
                LinExpr loadSum;
                for (NodeId v = 0; v < L.n; ++v) {
                    const double mu = g * static_cast<double>(dag().mu(v));
                    step.add(comp(p, v, t), static_cast<double>(dag().omega(v)));
                    step.add(save(p, v, t), mu).add(load(p, v, t), mu);
                    loadSum.add(load(p, v, t), mu);
                }
                if (t > 0)
                    step.add(L.finish[L.pt(p, t - 1)]);
                milp.addConstraint(LinExpr{}.add(f), Sense::Ge, step);
                for (NodeId v = 0; v < L.n; ++v) {
                    if (dag().isSource(v))
                        continue;
                    milp.addConstraint(LinExpr{}.add(L.getsblue[v]), Sense::Ge,
                                       LinExpr{}.add(f).add(save(p, v, t), M).addConstant(-M));
                    LinExpr start = LinExpr{}.add(L.getsblue[v]).add(load(p, v, t), M).addConstant(-M);
                    if (merged()) {
                        for (const LinTerm &x : loadSum.terms)
                            start.add(x.var, x.coef);
                    } else {
                        start.add(load(p, v, t), g * static_cast<double>(dag().mu(v)));
                    }
                    milp.addConstraint(LinExpr{}.add(f), Sense::Ge, start);
                }
            }
            milp.addConstraint(LinExpr{}.add(L.makespan), Sense::Ge, LinExpr{}.add(L.finish[L.pt(p, L.T - 1)]));
        }
        milp.setObjective(LinExpr{}.add(L.makespan));
    }

    MbspIlp m_;
    std::vector<std::vector<std::uint8_t>> initRed_;
};

} // namespace

MbspIlp build_full_ilp(const MbspInstance &inst, const IlpConfig &cfg) {
    if (cfg.T == 0)
        throw std::invalid_argument("ILP horizon T must be positive");
    inst.arch.check();
    for (std::uint32_t p = 0; p < inst.initialRed.size(); ++p)
        for (NodeId v : inst.initialRed[p])
            if (v >= inst.dag.size())
                throw std::invalid_argument("initial red pebble on unknown node");
    return Builder(inst, cfg).build();
}

MbspIlp forbid_recompute(MbspIlp model) {
    const auto &L = model.layout;
    for (NodeId v = 0; v < L.n; ++v) {
        if (model.inst.dag.isSource(v))
            continue;
        LinExpr e;
        for (std::uint32_t p = 0; p < L.P; ++p)
            for (std::uint32_t t = 0; t < L.T; ++t)
                e.add(L.comp[L.pvt(p, v, t)]);
        model.milp.addConstraint(e, Sense::Le, 1.0);
    }
    model.cfg.allowRecompute = false;
    return model;
}

} // namespace mbsp
