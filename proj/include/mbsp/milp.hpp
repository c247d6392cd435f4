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

#include "mbsp/cost.hpp"
#include "mbsp/schedule.hpp"

#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbsp {

// ============================================================================
// Generic MILP container
// ============================================================================

enum class VarType : std::uint8_t { Binary, Continuous };
enum class Sense : std::uint8_t { Le, Ge, Eq };

struct MilpVariable {
    std::string name;
    VarType type = VarType::Continuous;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
};

struct LinTerm {
    std::int32_t var;
    double coef;
};

/// Sum of terms plus a constant. Terms with var < 0 are dropped when added.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr &add(std::int32_t var, double coef = 1.0);
    LinExpr &addConstant(double c);
};

struct MilpConstraint {
    std::vector<LinTerm> terms; ///< sorted by variable, merged, no zero coefficients
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

/// Values indexed by variable id.
using Assignment = std::vector<double>;

/**
 * @brief Minimization MILP with named variables.
 *
 * Names are unique. Constraints only reference declared variables.
 */
class MilpModel {
  public:
    std::int32_t addBinary(const std::string &name);
    std::int32_t addContinuous(const std::string &name, double lb = 0.0,
                               double ub = std::numeric_limits<double>::infinity());
    /// Adds `lhs sense rhs`; everything is moved to the left, constants to the right.
    void addConstraint(const LinExpr &lhs, Sense sense, const LinExpr &rhs);
    void addConstraint(const LinExpr &lhs, Sense sense, double rhs);
    void setObjective(const LinExpr &objective);

    std::int32_t find(const std::string &name) const;
    std::size_t numVariables() const { return vars_.size(); }
    std::size_t numBinaries() const;
    const std::vector<MilpVariable> &variables() const { return vars_; }
    const std::vector<MilpConstraint> &constraints() const { return cons_; }
    const std::vector<LinTerm> &objective() const { return obj_; }
    double objectiveConstant() const { return objConst_; }

    double objectiveValue(const Assignment &a) const;

  private:
    std::int32_t add(MilpVariable v);

    std::vector<MilpVariable> vars_;
    std::unordered_map<std::string, std::int32_t> index_;
    std::vector<MilpConstraint> cons_;
    std::vector<LinTerm> obj_;
    double objConst_ = 0.0;
};

struct AssignmentTolerance {
    double continuous = 1e-6;
    double integrality = 1e-4;
};

/// First violated bound, integrality requirement or constraint, described; nullopt when feasible.
std::optional<std::string> check_assignment(const MilpModel &model, const Assignment &a,
                                            const AssignmentTolerance &tol = {});

// ============================================================================
// MBSP scheduling ILP
// ============================================================================

struct IlpConfig {
    std::uint32_t T = 1;
    Objective objective = Objective::Sync;
    bool stepMerging = true;
    bool allowRecompute = true;
    Weight bigM = 0; ///< 0 selects the default
    std::uint32_t slack = 2;
};

/// Variable ids of one built model; -1 marks a variable that was eliminated (fixed by the instance).
struct IlpLayout {
    std::uint32_t P = 0;
    std::uint32_t n = 0;
    std::uint32_t T = 0;
    std::vector<std::int32_t> comp, save, load; ///< [(p*n + v)*T + t], t < T
    std::vector<std::int32_t> red;              ///< [(p*n + v)*(T+1) + t], t <= T; t = 0 is fixed
    std::vector<std::int32_t> blue;             ///< [v*(T+1) + t]; sources and t = 0 are fixed
    std::vector<std::int32_t> compstep, commstep; ///< [p*T + t], merged models only
    std::vector<std::int32_t> compphase, commphase, savephase, loadphase, compends, commends;
    std::vector<std::int32_t> compuntil, saveuntil, loaduntil; ///< [p*T + t]
    std::vector<std::int32_t> compinduced, saveinduced, loadinduced, comminduced;
    std::vector<std::int32_t> finish; ///< [p*T + t]
    std::vector<std::int32_t> getsblue;
    std::int32_t makespan = -1;

    std::size_t pvt(std::uint32_t p, NodeId v, std::uint32_t t) const { return (std::size_t{p} * n + v) * T + t; }
    std::size_t pvs(std::uint32_t p, NodeId v, std::uint32_t t) const {
        return (std::size_t{p} * n + v) * (T + 1) + t;
    }
    std::size_t vs(NodeId v, std::uint32_t t) const { return std::size_t{v} * (T + 1) + t; }
    std::size_t pt(std::uint32_t p, std::uint32_t t) const { return std::size_t{p} * T + t; }
};

struct MbspIlp {
    MilpModel milp;
    MbspInstance inst;
    IlpConfig cfg;
    Weight bigM = 0;
    IlpLayout layout;
};

/// max(P * (sum omega + g * sum mu), T * largest possible step cost).
Weight default_big_m(const MbspInstance &inst, std::uint32_t T);

MbspIlp build_full_ilp(const MbspInstance &inst, const IlpConfig &cfg);

/// Adds sum_{p,t} comp_{p,v,t} <= 1 for every node.
MbspIlp forbid_recompute(MbspIlp model);

/// Drops saves of values already blue and all but the earliest-finishing save in a value's first saving superstep.
MbspSchedule normalize_schedule(const MbspInstance &inst, const MbspSchedule &schedule);

/// ILP time steps used by the encoding of `schedule` under the objective and merging mode of `cfg`.
std::uint32_t encoded_steps(const MbspInstance &inst, const MbspSchedule &schedule, const IlpConfig &cfg);

/// encoded_steps + cfg.slack, at least 1.
std::uint32_t choose_horizon(const MbspInstance &inst, const MbspSchedule &schedule, const IlpConfig &cfg);

/**
 * @brief Encodes a valid schedule (after normalize_schedule) as a full assignment.
 *
 * The assignment satisfies every constraint and its objective equals the schedule's cost.
 * Throws std::invalid_argument when the schedule is invalid or needs more than T steps.
 */
Assignment warm_start(const MbspIlp &model, const MbspSchedule &schedule);

class DecodeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Rebuilds a valid, normalized schedule from a feasible assignment. Its cost never exceeds the objective value.
MbspSchedule decode_solution(const MbspIlp &model, const Assignment &a);

} // namespace mbsp
