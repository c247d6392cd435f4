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
#include <limits>

namespace mbsp {

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

std::vector<std::uint8_t> required_mask(const MbspInstance &inst) {
    std::vector<std::uint8_t> req(inst.dag.size(), 0);
    for (NodeId v : inst.requiredBlue)
        req[v] = 1;
    return req;
}

// Peak working set of list[a, b) run from an emptied cache, freeing each value after its last use.
// `pos` maps nodes of the list to their index and everything else to kNever.
bool segment_fits(const MbspInstance &inst, const std::vector<NodeId> &list, std::size_t a, std::size_t b,
                  const std::vector<std::size_t> &pos, const std::vector<std::uint8_t> &req,
                  std::vector<std::size_t> &lastUse, std::vector<std::uint8_t> &seen) {
    const auto &dag = inst.dag;
    auto inSeg = [&](NodeId u) { return pos[u] != kNever && pos[u] >= a && pos[u] < b; };
    Weight mem = 0;
    std::vector<NodeId> touched;
    for (std::size_t k = a; k < b; ++k)
        for (NodeId u : dag.parents(list[k])) {
            if (!seen[u]) {
                seen[u] = 1;
                touched.push_back(u);
                if (!inSeg(u))
                    mem += dag.mu(u);
            }
            lastUse[u] = k;
        }
    bool ok = mem <= inst.arch.r;
    for (std::size_t k = a; k < b && ok; ++k) {
        const NodeId v = list[k];
        mem += dag.mu(v);
        if (mem > inst.arch.r) {
            ok = false;
            break;
        }
        for (NodeId u : dag.parents(v)) {
            if (lastUse[u] != k)
                continue;
            bool keep = false;
            if (inSeg(u)) {
                keep = req[u] != 0;
                for (NodeId c : dag.children(u))
                    if (!inSeg(c))
                        keep = true;
            }
            if (!keep)
                mem -= dag.mu(u);
        }
        bool usedLater = seen[v] != 0;
        bool keep = req[v] != 0;
        for (NodeId c : dag.children(v))
            if (!inSeg(c))
                keep = true;
        if (!usedLater && !keep)
            mem -= dag.mu(v);
    }
    for (NodeId u : touched) {
        seen[u] = 0;
        lastUse[u] = kNever;
    }
    return ok;
}

} // namespace

ComputeSkeleton split_into_mbsp_supersteps(const MbspInstance &inst, const BspSchedule &bsp) {
    const auto &dag = inst.dag;
    for (NodeId v = 0; v < dag.size(); ++v) {
        if (dag.isSource(v))
            continue;
        Weight f = dag.mu(v);
        for (NodeId u : dag.parents(v))
            f += dag.mu(u);
        if (f > inst.arch.r)
            throw InfeasibleError("node " + std::to_string(v) + " needs " + std::to_string(f) +
                                  " memory units but r=" + std::to_string(inst.arch.r));
    }
    const auto req = required_mask(inst);
    const std::uint32_t K = bsp.numSupersteps();
    std::vector<std::vector<std::vector<NodeId>>> seq(K, std::vector<std::vector<NodeId>>(bsp.processors));
    for (NodeId v : bsp.order)
        seq[bsp.superstep[v]][bsp.processor[v]].push_back(v);

    std::vector<std::size_t> pos(dag.size(), kNever);
    std::vector<std::size_t> lastUse(dag.size(), kNever);
    std::vector<std::uint8_t> seen(dag.size(), 0);
    ComputeSkeleton sk;
    sk.processors = bsp.processors;
    for (std::uint32_t s = 0; s < K; ++s) {
        std::vector<std::vector<std::vector<NodeId>>> segs(bsp.processors);
        std::size_t most = 0;
        for (std::uint32_t p = 0; p < bsp.processors; ++p) {
            const auto &list = seq[s][p];
            for (std::size_t k = 0; k < list.size(); ++k)
                pos[list[k]] = k;
            std::size_t start = 0;
            while (start < list.size()) {
                std::size_t end = start + 1;
                while (end < list.size() && segment_fits(inst, list, start, end + 1, pos, req, lastUse, seen))
                    ++end;
                segs[p].emplace_back(list.begin() + static_cast<std::ptrdiff_t>(start),
                                     list.begin() + static_cast<std::ptrdiff_t>(end));
                start = end;
            }
            for (NodeId v : list)
                pos[v] = kNever;
            most = std::max(most, segs[p].size());
        }
        for (std::size_t k = 0; k < most; ++k) {
            std::vector<std::vector<NodeId>> row(bsp.processors);
            for (std::uint32_t p = 0; p < bsp.processors; ++p)
                if (k < segs[p].size())
                    row[p] = segs[p][k];
            sk.steps.push_back(std::move(row));
        }
    }
    return sk;
}

namespace {

class PolicySimulator {
  public:
    PolicySimulator(const MbspInstance &inst, const ComputeSkeleton &sk, EvictionPolicy policy)
        : inst_(inst), dag_(inst.dag), sk_(sk), policy_(policy), K_(sk.steps.size()) {
        const std::size_t n = dag_.size();
        compProc_.assign(n, kNone);
        for (std::size_t j = 0; j < K_; ++j)
            for (std::uint32_t p = 0; p < sk.processors; ++p)
                for (NodeId v : sk.steps[j][p]) {
                    if (dag_.isSource(v) || compProc_[v] != kNone)
                        throw std::invalid_argument("skeleton computes a source or a node twice");
                    compProc_[v] = p;
                }
        required_ = required_mask(inst);
        structuralSave_.assign(n, 0);
        for (NodeId v = 0; v < n; ++v) {
            if (compProc_[v] == kNone)
                continue;
            bool s = required_[v] != 0;
            for (NodeId c : dag_.children(v))
                if (compProc_[c] != compProc_[v])
                    s = true;
            structuralSave_[v] = s ? 1 : 0;
        }
        reuse_.assign(n, 0);
        for (std::uint32_t p = 0; p < inst.arch.P && p < inst.initialRed.size(); ++p)
            for (NodeId v : inst.initialRed[p])
                if (!dag_.isSource(v))
                    throw std::invalid_argument("cache policies need blue initial red pebbles");
    }

    MbspSchedule run() {
        // The first pass discovers values evicted before their last use; the second saves them.
        for (int pass = 0; pass < 2; ++pass) {
            out_ = MbspSchedule(sk_.processors);
            out_.resize(K_ + 1);
            for (std::uint32_t p = 0; p < sk_.processors; ++p)
                simulate(p);
        }
        out_.removeEmptySupersteps();
        return out_;
    }

  private:
    const MbspInstance &inst_;
    const WeightedDag &dag_;
    const ComputeSkeleton &sk_;
    EvictionPolicy policy_;
    std::size_t K_;
    std::vector<std::uint32_t> compProc_;
    std::vector<std::uint8_t> required_;
    std::vector<std::uint8_t> structuralSave_;
    std::vector<std::uint8_t> reuse_;
    MbspSchedule out_;

    // Per-processor state.
    std::vector<std::vector<std::size_t>> uses_;
    std::vector<std::uint8_t> red_;
    std::vector<std::size_t> lastActive_;
    std::size_t clock_ = 0;
    Weight mem_ = 0;

    std::size_t nextUse(NodeId u, std::size_t pos) const {
        const auto &list = uses_[u];
        auto it = std::lower_bound(list.begin(), list.end(), pos);
        return it == list.end() ? kNever : *it;
    }

    NodeId victim(const std::vector<std::uint8_t> &pinned, std::size_t pos) const {
        NodeId best = kNone;
        for (NodeId u = 0; u < dag_.size(); ++u) {
            if (!red_[u] || pinned[u])
                continue;
            if (best == kNone) {
                best = u;
                continue;
            }
            if (policy_ == EvictionPolicy::Clairvoyant ? nextUse(u, pos) > nextUse(best, pos)
                                                       : lastActive_[u] < lastActive_[best])
                best = u;
        }
        return best;
    }

    void evict(NodeId u, std::size_t pos, std::vector<Op> &phase) {
        if (compProc_[u] != kNone && !structuralSave_[u] && nextUse(u, pos) != kNever)
            reuse_[u] = 1;
        drop(u, phase);
    }

    void drop(NodeId u, std::vector<Op> &phase) {
        phase.push_back({TransitionKind::Delete, u});
        red_[u] = 0;
        mem_ -= dag_.mu(u);
    }

    void simulate(std::uint32_t p) {
        const std::size_t n = dag_.size();
        const Weight r = inst_.arch.r;
        uses_.assign(n, {});
        std::vector<std::size_t> stepStart(K_ + 1, 0);
        std::size_t pos = 0;
        for (std::size_t j = 0; j < K_; ++j) {
            stepStart[j] = pos;
            for (NodeId v : sk_.steps[j][p]) {
                for (NodeId u : dag_.parents(v))
                    uses_[u].push_back(pos);
                ++pos;
            }
        }
        stepStart[K_] = pos;
        red_.assign(n, 0);
        lastActive_.assign(n, 0);
        clock_ = 1;
        mem_ = 0;
        if (p < inst_.initialRed.size())
            for (NodeId v : inst_.initialRed[p]) {
                red_[v] = 1;
                mem_ += dag_.mu(v);
            }

        for (std::size_t j = 0; j <= K_; ++j) {
            auto &ps = out_.at(j, p);
            std::vector<NodeId> computedNow;
            if (j > 0) {
                const auto &comps = sk_.steps[j - 1][p];
                const std::size_t phaseEnd = stepStart[j];
                pos = stepStart[j - 1];
                for (NodeId v : comps) {
                    std::vector<std::uint8_t> pinned(n, 0);
                    for (NodeId u : dag_.parents(v))
                        pinned[u] = 1;
                    for (NodeId u = 0; u < n; ++u)
                        if (red_[u] && nextUse(u, pos + 1) < phaseEnd)
                            pinned[u] = 1;
                    for (NodeId w : computedNow)
                        if (structuralSave_[w] || nextUse(w, pos + 1) != kNever)
                            pinned[w] = 1;
                    while (mem_ + dag_.mu(v) > r) {
                        NodeId x = victim(pinned, pos);
                        if (x == kNone)
                            throw InfeasibleError("cache policy cannot make room for node " + std::to_string(v));
                        evict(x, pos, ps.comp);
                    }
                    ps.comp.push_back({TransitionKind::Compute, v});
                    red_[v] = 1;
                    mem_ += dag_.mu(v);
                    computedNow.push_back(v);
                    ++clock_;
                    lastActive_[v] = clock_;
                    for (NodeId u : dag_.parents(v))
                        lastActive_[u] = clock_;
                    std::vector<NodeId> touched(dag_.parents(v).begin(), dag_.parents(v).end());
                    touched.push_back(v);
                    for (NodeId u : touched) {
                        if (!red_[u] || nextUse(u, pos + 1) != kNever)
                            continue;
                        bool pending = std::find(computedNow.begin(), computedNow.end(), u) != computedNow.end() &&
                                       (structuralSave_[u] || reuse_[u]);
                        if (!pending)
                            drop(u, ps.comp);
                    }
                    ++pos;
                }
                for (NodeId v : computedNow)
                    if (red_[v] && (structuralSave_[v] || reuse_[v]))
                        ps.save.push_back({TransitionKind::Save, v});
            }
            const std::size_t posNext = stepStart[std::min(j, K_)];
            for (NodeId u = 0; u < n; ++u)
                if (red_[u] && nextUse(u, posNext) == kNever)
                    drop(u, ps.del);
            if (j == K_)
                break;
            std::vector<std::uint8_t> inputs(n, 0);
            std::vector<std::uint8_t> local(n, 0);
            for (NodeId v : sk_.steps[j][p])
                local[v] = 1;
            Weight need = 0;
            std::vector<NodeId> missing;
            for (NodeId v : sk_.steps[j][p])
                for (NodeId u : dag_.parents(v))
                    if (!local[u] && !inputs[u]) {
                        inputs[u] = 1;
                        if (!red_[u]) {
                            missing.push_back(u);
                            need += dag_.mu(u);
                        }
                    }
            std::sort(missing.begin(), missing.end());
            while (mem_ + need > r) {
                NodeId x = victim(inputs, posNext);
                if (x == kNone)
                    throw InfeasibleError("cache policy cannot fit the inputs of superstep " + std::to_string(j));
                evict(x, posNext, ps.del);
            }
            for (NodeId u : missing) {
                ps.load.push_back({TransitionKind::Load, u});
                red_[u] = 1;
                mem_ += dag_.mu(u);
                lastActive_[u] = ++clock_;
            }
        }
    }
};

} // namespace

MbspSchedule apply_cache_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton, EvictionPolicy policy) {
    MbspSchedule s = PolicySimulator(inst, skeleton, policy).run();
    if (auto rep = validate_schedule(inst, s); !rep.valid())
        throw std::logic_error("cache policy produced an invalid schedule: " + rep.violation->describe());
    return s;
}

MbspSchedule clairvoyant_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton) {
    return apply_cache_policy(inst, skeleton, EvictionPolicy::Clairvoyant);
}

MbspSchedule lru_policy(const MbspInstance &inst, const ComputeSkeleton &skeleton) {
    return apply_cache_policy(inst, skeleton, EvictionPolicy::Lru);
}

BspSchedule first_stage(const MbspInstance &inst, const TwoStageConfig &cfg) {
    switch (cfg.baseline) {
    case BaselineKind::Greedy:
        return greedy_bsp_schedule(inst.dag, inst.arch, cfg.greedy);
    case BaselineKind::WorkStealing:
        return work_stealing_schedule(inst.dag, inst.arch, cfg.seed);
    case BaselineKind::Dfs:
        break;
    }
    BspSchedule b = dfs_schedule(inst.dag);
    b.processors = inst.arch.P;
    return b;
}

MbspSchedule two_stage_schedule(const MbspInstance &inst, const TwoStageConfig &cfg) {
    return apply_cache_policy(inst, split_into_mbsp_supersteps(inst, first_stage(inst, cfg)), cfg.policy);
}

} // namespace mbsp
