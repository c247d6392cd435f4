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

#include "mbsp/milp.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace mbsp {

/// CPLEX LP text: Minimize, Subject To, Bounds, Binary, End. Byte-identical for identical models.
std::string emit_lp(const MilpModel &model);

enum class SolutionDialect : std::uint8_t {
    Pairs,  ///< `name value` lines; `#` comments, `# status` and `# objective` headers
    SolXml, ///< `<variable name="..." value="..."/>` attributes
    Cbc,    ///< CBC `solu` output: status line, then `index name value [reduced cost]`
    Auto,   ///< picked from the first meaningful line
};

class SolutionParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ParsedSolution {
    Assignment values;                ///< missing variables are 0
    std::optional<std::string> status; ///< solver-reported status word, lower case
    std::optional<double> objective;
};

/// Throws SolutionParseError on an unknown variable name or a malformed value.
ParsedSolution parse_solution(const MilpModel &model, const std::string &text,
                              SolutionDialect dialect = SolutionDialect::Auto);

/// `name value` pairs for every variable, in declaration order.
std::string write_pairs(const MilpModel &model, const Assignment &a);

enum class SolverStatus : std::uint8_t { Optimal, Feasible, Infeasible, Timeout, Error };

const char *status_name(SolverStatus s);

struct SolverConfig {
    /// Placeholders {lp} {sol} {timelimit} {warmstart}; {warmstart} becomes `-` without a warm start.
    std::string command;
    double timeLimit = 60.0;
    std::optional<Assignment> warmStart;
    bool keepFiles = false;
};

/// $MBSP_SOLVER_CMD, else the build-time default; empty when neither is set.
std::string default_solver_command();

struct SolverRun {
    SolverStatus status = SolverStatus::Error;
    std::optional<Assignment> assignment; ///< model-feasible whenever present
    double objective = 0.0;
    double seconds = 0.0;
    std::string message;
};

/**
 * @brief Runs the external solver on the emitted model.
 *
 * Files go to $MBSP_TMPDIR (else the system temp directory). A returned assignment is always
 * checked by substitution; one that fails the check downgrades the run to Error. Without a solver
 * incumbent the warm start (if any) is returned with status Feasible or Timeout.
 */
SolverRun solve(const MilpModel &model, const SolverConfig &cfg);

struct IlpResult {
    SolverRun run;
    std::optional<MbspSchedule> schedule; ///< decoded, normalized, valid
    Weight cost = 0;                      ///< cost of `schedule`; equals run.objective
    bool fromWarmStart = false;           ///< no solver incumbent improved on the warm start
};

/**
 * @brief Warm-started solve plus decoding.
 *
 * The decoded schedule is re-encoded when its cost is below the solver objective, so the reported
 * objective always equals the cost of the returned schedule. The result never exceeds the warm start.
 */
IlpResult solve_mbsp(const MbspIlp &model, const SolverConfig &cfg, const std::optional<MbspSchedule> &warm);

// ============================================================================
// Exhaustive oracle
// ============================================================================

struct OracleConfig {
    Objective objective = Objective::Sync;
    std::uint32_t maxTransitions = 0; ///< per-processor bound on compute/save/load transitions; 0 = none
    bool allowRecompute = true;
    std::size_t maxStates = 5'000'000;
};

struct OracleResult {
    MbspSchedule schedule;
    Weight cost = 0;
    std::uint32_t transitions = 0; ///< largest per-processor compute/save/load count in `schedule`
    std::size_t states = 0;
};

class OracleLimitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Minimum-cost schedule by Dijkstra over configurations.
 *
 * Guard: P = 1 with n <= 12, or P = 2 with n <= 8. Throws std::invalid_argument outside the guard,
 * InfeasibleError when no schedule meets the transition bound and OracleLimitError past maxStates.
 */
OracleResult brute_force_optimum(const MbspInstance &inst, const OracleConfig &cfg);

} // namespace mbsp
