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

#include "mbsp/dnc.hpp"
#include "mbsp/gadgets.hpp"
#include "mbsp/two_stage.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbsp {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitInfeasible = 2, kExitEnvironment = 3 };

class CliError : public std::runtime_error {
  public:
    CliError(int code, const std::string &what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

  private:
    int code_;
};

enum class Method : std::uint8_t { TwoStage, Ilp, Dnc, Oracle };

const char *method_name(Method m);
Method parse_method(const std::string &s);
BaselineKind parse_baseline(const std::string &s);
EvictionPolicy parse_policy(const std::string &s);
Objective parse_objective(const std::string &s);

/// Unset machine fields fall back to the gadget's own machine, else P=4, r=3*r0, g=1, L=10.
struct RunOptions {
    Method method = Method::Ilp;
    BaselineKind baseline = BaselineKind::Greedy;
    EvictionPolicy policy = EvictionPolicy::Clairvoyant;
    Objective objective = Objective::Sync;
    bool recompute = true;
    bool stepMerging = true;
    std::optional<std::uint32_t> P;
    std::optional<double> rMult;
    std::optional<Weight> r; ///< absolute cache size; wins over rMult
    std::optional<Weight> g;
    std::optional<Weight> L;
    std::uint64_t seed = 0;
    double timeLimit = 60.0;
    std::string solverCmd; ///< empty: $MBSP_SOLVER_CMD or the build default
    std::size_t dncAbove = 100;
    std::size_t maxPart = 60;
    std::uint32_t slack = 2;
};

struct NamedInstance {
    std::string name;
    MbspInstance inst;
    Weight r0 = 0;
    bool randomMu = false; ///< memory weights were all zero and got drawn
};

/// r = ceil(k * r0); throws CliError(kExitInfeasible) when r < r0.
Weight cache_size(Weight r0, double k);

/// A DAG file path or a `gadget:family:key=value,...` spec.
NamedInstance load_instance(const std::string &source, const RunOptions &opts);

/// Directories expand to their regular files in name order; other arguments pass through.
std::vector<std::string> expand_sources(const std::vector<std::string> &args);

struct PipelineResult {
    MbspSchedule schedule;
    Method method = Method::TwoStage;
    Weight baselineCost = 0;
    Weight cost = 0;
    std::string status;
    double seconds = 0.0;
    std::string report; ///< JSON lines for divide and conquer
};

/// Runs the baseline and then the selected method; the result always passes validate_schedule.
PipelineResult run_pipeline(const MbspInstance &inst, const RunOptions &opts);

struct ExperimentRow {
    std::string instance;
    std::uint32_t P = 0;
    Weight r = 0;
    Weight g = 0;
    Weight L = 0;
    Objective objective = Objective::Sync;
    std::string method;
    std::optional<Weight> baselineCost;
    std::optional<Weight> ilpCost;
    std::string status;
    double seconds = 0.0;

    std::optional<double> reduction() const;
};

std::string csv_header();
std::string csv_row(const ExperimentRow &row);
double geomean(const std::vector<double> &xs);
/// `geomean` row over every row with a reduction factor.
std::string csv_geomean_row(const std::vector<ExperimentRow> &rows);

/// One row per source, in order; failures land in the status column. Rows stream to `sink` in order.
std::vector<ExperimentRow> run_experiment(const std::vector<std::string> &sources, const RunOptions &opts,
                                          unsigned jobs = 1, std::ostream *sink = nullptr);

/// Handcrafted schedules shipped with a gadget family, by name.
std::vector<std::pair<std::string, MbspSchedule>> gadget_schedules(const GadgetSpec &spec);

} // namespace mbsp
