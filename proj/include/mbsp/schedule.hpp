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

#include "mbsp/dag.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mbsp {

enum class TransitionKind : std::uint8_t { Load, Save, Compute, Delete };
enum class Phase : std::uint8_t { Comp, Save, Del, Load };

char kind_letter(TransitionKind k);
const char *phase_name(Phase ph);

struct Transition {
    TransitionKind kind;
    std::uint32_t processor;
    NodeId node;
};

/// A transition whose processor is implied by its position in the schedule.
struct Op {
    TransitionKind kind;
    NodeId node;

    bool operator==(const Op &) const = default;
};

struct ProcessorSuperstep {
    std::vector<Op> comp;
    std::vector<Op> save;
    std::vector<Op> del;
    std::vector<Op> load;

    std::vector<Op> &phase(Phase ph);
    const std::vector<Op> &phase(Phase ph) const;
    bool empty() const { return comp.empty() && save.empty() && del.empty() && load.empty(); }
    bool operator==(const ProcessorSuperstep &) const = default;
};

/**
 * @brief Sequence of supersteps, each holding one ProcessorSuperstep per processor.
 */
class MbspSchedule {
  public:
    MbspSchedule() = default;
    explicit MbspSchedule(std::uint32_t processors) : processors_(processors) {}

    std::uint32_t processors() const { return processors_; }
    std::size_t size() const { return steps_.size(); }

    /// Appends an empty superstep and returns its index.
    std::size_t addSuperstep();
    void resize(std::size_t supersteps);

    ProcessorSuperstep &at(std::size_t step, std::uint32_t p) { return steps_[step][p]; }
    const ProcessorSuperstep &at(std::size_t step, std::uint32_t p) const { return steps_[step][p]; }

    void erase(std::size_t step);
    /// Drops supersteps in which no processor has any transition.
    void removeEmptySupersteps();

    bool operator==(const MbspSchedule &) const = default;

  private:
    std::uint32_t processors_ = 1;
    std::vector<std::vector<ProcessorSuperstep>> steps_;
};

/**
 * @brief A scheduling problem: DAG, machine, and boundary conditions.
 *
 * Defaults are the plain problem: empty caches at start and every sink required in slow
 * memory at the end. Subproblems of the divide-and-conquer pipeline carry over red pebbles
 * and require extra blue pebbles.
 */
struct MbspInstance {
    WeightedDag dag;
    Architecture arch;
    std::vector<std::vector<NodeId>> initialRed;
    std::vector<NodeId> requiredBlue;

    MbspInstance() = default;
    MbspInstance(WeightedDag d, Architecture a);

    /// Sorted union of sinks and explicitly required nodes is what `requiredBlue` holds.
    void normalize();
};

struct Configuration {
    std::vector<std::vector<std::uint8_t>> red;
    std::vector<std::uint8_t> blue;
    std::vector<Weight> memory;

    bool isRed(std::uint32_t p, NodeId v) const { return red[p][v] != 0; }
    bool isBlue(NodeId v) const { return blue[v] != 0; }
};

Configuration initial_configuration(const WeightedDag &dag, const Architecture &arch);
Configuration initial_configuration(const MbspInstance &inst);

enum class Rule : std::uint8_t {
    PhaseKind,
    BadIndex,
    LoadNotBlue,
    SaveNotRed,
    ComputeSource,
    ComputeParentMissing,
    DeleteNotRed,
    MemoryBound,
    InitialState,
    TerminalState,
};

const char *rule_name(Rule r);

class TransitionError : public std::runtime_error {
  public:
    TransitionError(Rule rule, const std::string &what) : std::runtime_error(what), rule_(rule) {}
    Rule rule() const { return rule_; }

  private:
    Rule rule_;
};

/// Applies one transition in place; throws TransitionError on a precondition or memory violation.
void apply_transition_in_place(const WeightedDag &dag, const Architecture &arch, Configuration &config,
                               const Transition &t);
Configuration apply_transition(const WeightedDag &dag, const Architecture &arch, const Configuration &config,
                               const Transition &t);

struct Violation {
    Rule rule;
    std::size_t superstep = 0;
    std::uint32_t processor = 0;
    Phase phase = Phase::Comp;
    std::size_t position = 0;
    NodeId node = 0;
    std::string message;

    std::string describe() const;
};

struct ValidationReport {
    std::optional<Violation> violation;
    bool valid() const { return !violation.has_value(); }
};

ValidationReport validate_schedule(const MbspInstance &inst, const MbspSchedule &schedule);
ValidationReport validate_schedule(const WeightedDag &dag, const Architecture &arch, const MbspSchedule &schedule);

/// Configuration after replaying a schedule; throws TransitionError if the schedule is invalid.
Configuration final_configuration(const MbspInstance &inst, const MbspSchedule &schedule);

std::string serialize_schedule(const MbspSchedule &schedule);
MbspSchedule parse_schedule(std::istream &in, std::uint32_t processors);
MbspSchedule parse_schedule_string(const std::string &text, std::uint32_t processors);

} // namespace mbsp
