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

#include "mbsp/schedule.hpp"

#include <algorithm>
#include <sstream>

namespace mbsp {

char kind_letter(TransitionKind k) {
    switch (k) {
    case TransitionKind::Load:
        return 'L';
    case TransitionKind::Save:
        return 'S';
    case TransitionKind::Compute:
        return 'C';
    case TransitionKind::Delete:
        return 'D';
    }
    return '?';
}

const char *phase_name(Phase ph) {
    switch (ph) {
    case Phase::Comp:
        return "comp";
    case Phase::Save:
        return "save";
    case Phase::Del:
        return "del";
    case Phase::Load:
        return "load";
    }
    return "?";
}

const char *rule_name(Rule r) {
    switch (r) {
    case Rule::PhaseKind:
        return "phase-kind";
    case Rule::BadIndex:
        return "index-out-of-range";
    case Rule::LoadNotBlue:
        return "load-requires-blue";
    case Rule::SaveNotRed:
        return "save-requires-red";
    case Rule::ComputeSource:
        return "compute-on-source";
    case Rule::ComputeParentMissing:
        return "compute-requires-parents";
    case Rule::DeleteNotRed:
        return "delete-requires-red";
    case Rule::MemoryBound:
        return "memory-bound";
    case Rule::InitialState:
        return "initial-state";
    case Rule::TerminalState:
        return "terminal-state";
    }
    return "?";
}

std::vector<Op> &ProcessorSuperstep::phase(Phase ph) {
    switch (ph) {
    case Phase::Comp:
        return comp;
    case Phase::Save:
        return save;
    case Phase::Del:
        return del;
    case Phase::Load:
        break;
    }
    return load;
}

const std::vector<Op> &ProcessorSuperstep::phase(Phase ph) const {
    return const_cast<ProcessorSuperstep *>(this)->phase(ph);
}

std::size_t MbspSchedule::addSuperstep() {
    steps_.emplace_back(processors_);
    return steps_.size() - 1;
}

void MbspSchedule::resize(std::size_t supersteps) { steps_.resize(supersteps, std::vector<ProcessorSuperstep>(processors_)); }

void MbspSchedule::erase(std::size_t step) { steps_.erase(steps_.begin() + static_cast<std::ptrdiff_t>(step)); }

void MbspSchedule::removeEmptySupersteps() {
    std::erase_if(steps_, [](const std::vector<ProcessorSuperstep> &s) {
        return std::all_of(s.begin(), s.end(), [](const ProcessorSuperstep &x) { return x.empty(); });
    });
}

MbspInstance::MbspInstance(WeightedDag d, Architecture a) : dag(std::move(d)), arch(a) { normalize(); }

void MbspInstance::normalize() {
    initialRed.resize(arch.P);
    for (auto &r : initialRed) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    for (NodeId v : dag.sinks())
        requiredBlue.push_back(v);
    std::sort(requiredBlue.begin(), requiredBlue.end());
    requiredBlue.erase(std::unique(requiredBlue.begin(), requiredBlue.end()), requiredBlue.end());
}

Configuration initial_configuration(const WeightedDag &dag, const Architecture &arch) {
    Configuration c;
    c.red.assign(arch.P, std::vector<std::uint8_t>(dag.size(), 0));
    c.memory.assign(arch.P, 0);
    c.blue.assign(dag.size(), 0);
    for (NodeId v : dag.sources())
        c.blue[v] = 1;
    return c;
}

Configuration initial_configuration(const MbspInstance &inst) {
    Configuration c = initial_configuration(inst.dag, inst.arch);
    for (std::uint32_t p = 0; p < inst.initialRed.size() && p < inst.arch.P; ++p)
        for (NodeId v : inst.initialRed[p]) {
            c.red[p][v] = 1;
            c.memory[p] += inst.dag.mu(v);
        }
    return c;
}

namespace {

std::string where(const Transition &t) {
    return std::string(1, kind_letter(t.kind)) + " node " + std::to_string(t.node) + " on processor " +
           std::to_string(t.processor);
}

} // namespace

void apply_transition_in_place(const WeightedDag &dag, const Architecture &arch, Configuration &c,
                               const Transition &t) {
    if (t.processor >= arch.P || t.node >= dag.size())
        throw TransitionError(Rule::BadIndex, "index out of range: " + where(t));
    const std::uint32_t p = t.processor;
    const NodeId v = t.node;
    switch (t.kind) {
    case TransitionKind::Load:
        if (!c.blue[v])
            throw TransitionError(Rule::LoadNotBlue, "load of non-blue value: " + where(t));
        break;
    case TransitionKind::Save:
        if (!c.red[p][v])
            throw TransitionError(Rule::SaveNotRed, "save of non-red value: " + where(t));
        c.blue[v] = 1;
        return;
    case TransitionKind::Compute:
        if (dag.isSource(v))
            throw TransitionError(Rule::ComputeSource, "compute of source: " + where(t));
        for (NodeId u : dag.parents(v))
            if (!c.red[p][u])
                throw TransitionError(Rule::ComputeParentMissing,
                                      "parent " + std::to_string(u) + " not red: " + where(t));
        break;
    case TransitionKind::Delete:
        if (!c.red[p][v])
            throw TransitionError(Rule::DeleteNotRed, "delete of non-red value: " + where(t));
        c.red[p][v] = 0;
        c.memory[p] -= dag.mu(v);
        return;
    }
    if (!c.red[p][v]) {
        c.red[p][v] = 1;
        c.memory[p] += dag.mu(v);
    }
    if (c.memory[p] > arch.r)
        throw TransitionError(Rule::MemoryBound, "memory " + std::to_string(c.memory[p]) + " exceeds r=" +
                                                     std::to_string(arch.r) + " after " + where(t));
}

Configuration apply_transition(const WeightedDag &dag, const Architecture &arch, const Configuration &config,
                               const Transition &t) {
    Configuration c = config;
    apply_transition_in_place(dag, arch, c, t);
    return c;
}

std::string Violation::describe() const {
    std::ostringstream out;
    out << rule_name(rule) << " at superstep " << superstep << ", processor " << processor << ", phase "
        << phase_name(phase) << ", position " << position << ", node " << node << ": " << message;
    return out.str();
}

namespace {

bool kind_allowed(Phase ph, TransitionKind k) {
    switch (ph) {
    case Phase::Comp:
        return k == TransitionKind::Compute || k == TransitionKind::Delete;
    case Phase::Save:
        return k == TransitionKind::Save;
    case Phase::Del:
        return k == TransitionKind::Delete;
    case Phase::Load:
        return k == TransitionKind::Load;
    }
    return false;
}

// Replays the schedule; returns the first violation and leaves `c` at the failure point.
std::optional<Violation> replay(const MbspInstance &inst, const MbspSchedule &s, Configuration &c) {
    const auto &dag = inst.dag;
    const auto &arch = inst.arch;
    c = initial_configuration(inst);
    for (std::uint32_t p = 0; p < arch.P; ++p)
        if (c.memory[p] > arch.r)
            return Violation{Rule::InitialState, 0, p, Phase::Comp, 0, 0, "initial red pebbles exceed r"};
    if (s.processors() != arch.P)
        return Violation{Rule::BadIndex, 0, 0, Phase::Comp, 0, 0, "schedule processor count differs from P"};

    auto run = [&](std::size_t i, std::uint32_t p, Phase ph) -> std::optional<Violation> {
        const auto &ops = s.at(i, p).phase(ph);
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const Op &op = ops[k];
            if (!kind_allowed(ph, op.kind))
                return Violation{Rule::PhaseKind, i, p, ph, k, op.node,
                                 std::string("transition kind ") + kind_letter(op.kind) + " not allowed"};
            try {
                apply_transition_in_place(dag, arch, c, Transition{op.kind, p, op.node});
            } catch (const TransitionError &e) {
                return Violation{e.rule(), i, p, ph, k, op.node, e.what()};
            }
        }
        return std::nullopt;
    };

    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::uint32_t p = 0; p < arch.P; ++p)
            if (auto v = run(i, p, Phase::Comp))
                return v;
        // Saves only need red pebbles, so replaying them on the shared blue set is the merge.
        for (std::uint32_t p = 0; p < arch.P; ++p)
            if (auto v = run(i, p, Phase::Save))
                return v;
        for (std::uint32_t p = 0; p < arch.P; ++p) {
            if (auto v = run(i, p, Phase::Del))
                return v;
            if (auto v = run(i, p, Phase::Load))
                return v;
        }
    }
    for (NodeId v : inst.requiredBlue)
        if (!c.blue[v])
            return Violation{Rule::TerminalState, s.size(), 0, Phase::Load, 0, v, "required value never saved"};
    return std::nullopt;
}

} // namespace

ValidationReport validate_schedule(const MbspInstance &inst, const MbspSchedule &schedule) {
    Configuration c;
    return ValidationReport{replay(inst, schedule, c)};
}

ValidationReport validate_schedule(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule) {
    return validate_schedule(MbspInstance(dag, arch), schedule);
}

Configuration final_configuration(const MbspInstance &inst, const MbspSchedule &schedule) {
    Configuration c;
    if (auto v = replay(inst, schedule, c); v && v->rule != Rule::TerminalState)
        throw TransitionError(v->rule, v->describe());
    return c;
}

std::string serialize_schedule(const MbspSchedule &schedule) {
    std::ostringstream out;
    static constexpr Phase kPhases[] = {Phase::Comp, Phase::Save, Phase::Del, Phase::Load};
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        out << "superstep " << i << '\n';
        for (std::uint32_t p = 0; p < schedule.processors(); ++p)
            for (Phase ph : kPhases)
                for (const Op &op : schedule.at(i, p).phase(ph))
                    out << "p " << p << ' ' << phase_name(ph) << ' ' << kind_letter(op.kind) << ' ' << op.node << '\n';
    }
    return out.str();
}

MbspSchedule parse_schedule(std::istream &in, std::uint32_t processors) {
    MbspSchedule s(processors);
    std::string line;
    std::size_t lineNo = 0;
    auto fail = [&](const std::string &msg) { throw ParseError(lineNo, msg); };
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '%')
            continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "superstep") {
            std::size_t k = 0;
            if (!(ls >> k) || k != s.size())
                fail("superstep headers must count up from 0");
            s.addSuperstep();
        } else if (head == "p") {
            long long proc = -1;
            long long node = -1;
            std::string ph;
            std::string kind;
            if (!(ls >> proc >> ph >> kind >> node) || proc < 0 || node < 0)
                fail("expected 'p <proc> <phase> <kind> <node>'");
            if (s.size() == 0)
                fail("transition before first superstep header");
            if (proc >= processors)
                fail("processor index out of range");
            Phase phase;
            if (ph == "comp")
                phase = Phase::Comp;
            else if (ph == "save")
                phase = Phase::Save;
            else if (ph == "del")
                phase = Phase::Del;
            else if (ph == "load")
                phase = Phase::Load;
            else
                fail("unknown phase '" + ph + "'");
            TransitionKind k;
            if (kind == "L")
                k = TransitionKind::Load;
            else if (kind == "S")
                k = TransitionKind::Save;
            else if (kind == "C")
                k = TransitionKind::Compute;
            else if (kind == "D")
                k = TransitionKind::Delete;
            else
                fail("unknown transition kind '" + kind + "'");
            s.at(s.size() - 1, static_cast<std::uint32_t>(proc)).phase(phase).push_back(Op{k, static_cast<NodeId>(node)});
        } else {
            fail("unrecognized line");
        }
        std::string extra;
        if (ls >> extra)
            fail("trailing token '" + extra + "'");
    }
    return s;
}

MbspSchedule parse_schedule_string(const std::string &text, std::uint32_t processors) {
    std::istringstream in(text);
    return parse_schedule(in, processors);
}

} // namespace mbsp
