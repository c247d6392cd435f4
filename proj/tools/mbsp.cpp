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

// mbsp: command-line front end.

#include "mbsp/cli.hpp"
#include "mbsp/cost.hpp"
#include "mbsp/solver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace mbsp;

namespace {

struct MachineFlags {
    std::optional<std::uint32_t> P;
    std::optional<double> rMult;
    std::optional<Weight> r;
    std::optional<Weight> g;
    std::optional<Weight> L;
    std::uint64_t seed = 0;
};

void add_machine_flags(CLI::App *cmd, MachineFlags &m) {
    cmd->add_option("--P", m.P, "processors (default 4, or the gadget's own)");
    auto *mult = cmd->add_option("--r-mult", m.rMult, "cache size r = ceil(k * r0) (default 3)");
    cmd->add_option("--r", m.r, "absolute cache size")->excludes(mult);
    cmd->add_option("--g", m.g, "I/O cost per unit of memory weight (default 1)");
    cmd->add_option("--L", m.L, "synchronisation cost per superstep (default 10)");
    cmd->add_option("--seed", m.seed, "seed for memory weights and randomized baselines");
}

void apply(const MachineFlags &m, RunOptions &o) {
    o.P = m.P;
    o.rMult = m.rMult;
    o.r = m.r;
    o.g = m.g;
    o.L = m.L;
    o.seed = m.seed;
}

struct PipelineFlags {
    std::string method = "ilp";
    std::string baseline = "greedy";
    std::string policy = "clairvoyant";
    std::string objective = "sync";
    bool noRecompute = false;
    bool noMerge = false;
    double timeLimit = 60.0;
    std::string solverCmd;
    std::size_t maxPart = 60;
    std::uint32_t slack = 2;
};

void add_pipeline_flags(CLI::App *cmd, PipelineFlags &f) {
    cmd->add_option("--method", f.method, "two-stage | ilp | dnc | oracle")->capture_default_str();
    cmd->add_option("--baseline", f.baseline, "greedy | worksteal | dfs")->capture_default_str();
    cmd->add_option("--policy", f.policy, "clairvoyant | lru")->capture_default_str();
    cmd->add_option("--objective", f.objective, "sync | async")->capture_default_str();
    cmd->add_flag("--no-recompute", f.noRecompute, "compute every node at most once");
    cmd->add_flag("--no-step-merging", f.noMerge, "one ILP step per transition kind");
    cmd->add_option("--time-limit", f.timeLimit, "solver seconds per ILP")->capture_default_str();
    cmd->add_option("--solver-cmd", f.solverCmd, "template with {lp} {sol} {timelimit} {warmstart}");
    cmd->add_option("--max-part", f.maxPart, "largest divide-and-conquer part")->capture_default_str();
    cmd->add_option("--slack", f.slack, "ILP steps beyond the warm start")->capture_default_str();
}

void apply(const PipelineFlags &f, RunOptions &o) {
    o.method = parse_method(f.method);
    o.baseline = parse_baseline(f.baseline);
    o.policy = parse_policy(f.policy);
    o.objective = parse_objective(f.objective);
    o.recompute = !f.noRecompute;
    o.stepMerging = !f.noMerge;
    o.timeLimit = f.timeLimit;
    o.solverCmd = f.solverCmd;
    o.maxPart = f.maxPart;
    o.slack = f.slack;
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw CliError(kExitEnvironment, "cannot write '" + path + "'");
}

MbspSchedule read_schedule(const std::string &path, std::uint32_t P) {
    std::ifstream in(path);
    if (!in)
        throw CliError(kExitInvalid, "cannot read '" + path + "'");
    try {
        return parse_schedule(in, P);
    } catch (const std::exception &e) {
        throw CliError(kExitInvalid, path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Multiprocessor scheduling with memory constraints and I/O costs"};
    app.require_subcommand(1);

    // schedule
    auto *sched = app.add_subcommand("schedule", "schedule one DAG file or gadget");
    std::string source, outPath, reportPath;
    MachineFlags sm;
    PipelineFlags sp;
    sched->add_option("input", source, "DAG file or gadget:<family>:k=v,...")->required();
    sched->add_option("-o,--output", outPath, "schedule file");
    sched->add_option("--report", reportPath, "divide-and-conquer JSON lines report");
    add_machine_flags(sched, sm);
    add_pipeline_flags(sched, sp);

    // experiment
    auto *exp = app.add_subcommand("experiment", "baseline versus ILP over a batch, as CSV");
    std::vector<std::string> sources;
    std::string csvPath;
    unsigned jobs = 1;
    std::size_t dncAbove = 100;
    MachineFlags em;
    PipelineFlags ep;
    exp->add_option("inputs", sources, "directories, DAG files or gadget specs")->required();
    exp->add_option("-o,--output", csvPath, "CSV file (default stdout)");
    exp->add_option("--jobs", jobs, "instances in parallel")->capture_default_str();
    exp->add_option("--dnc-above", dncAbove, "use divide and conquer above this many nodes")->capture_default_str();
    add_machine_flags(exp, em);
    add_pipeline_flags(exp, ep);

    // validate / cost
    std::string dagArg, schedArg;
    MachineFlags vm, cm;
    auto *val = app.add_subcommand("validate", "check a schedule; exit 0 iff valid");
    val->add_option("dag", dagArg, "DAG file or gadget spec")->required();
    val->add_option("schedule", schedArg, "schedule file")->required();
    add_machine_flags(val, vm);
    auto *cost = app.add_subcommand("cost", "cost breakdown CSV of a valid schedule");
    cost->add_option("dag", dagArg, "DAG file or gadget spec")->required();
    cost->add_option("schedule", schedArg, "schedule file")->required();
    add_machine_flags(cost, cm);

    // gadget
    auto *gad = app.add_subcommand("gadget", "write a gadget DAG and its handcrafted schedules");
    std::string gadgetSpec, gadgetOut, gadgetSchedule, gadgetScheduleOut;
    gad->add_option("spec", gadgetSpec, "gadget:<family>:k=v,...")->required();
    gad->add_option("-o,--output", gadgetOut, "DAG file (default stdout)");
    gad->add_option("--schedule", gadgetSchedule, "name of a handcrafted schedule to write");
    gad->add_option("--schedule-out", gadgetScheduleOut, "schedule file (default stdout)");

    // partition
    auto *part = app.add_subcommand("partition", "acyclic partition into bounded parts, as CSV");
    std::string partIn, partOut, partSolver;
    std::size_t partMax = 60;
    double partLimit = 10.0;
    bool partNoSolver = false;
    part->add_option("dag", partIn, "DAG file or gadget spec")->required();
    part->add_option("-o,--output", partOut, "CSV file (default stdout)");
    part->add_option("--max-part", partMax, "largest part")->capture_default_str();
    part->add_option("--time-limit", partLimit, "solver seconds per bipartition")->capture_default_str();
    part->add_option("--solver-cmd", partSolver, "solver command template");
    part->add_flag("--no-solver", partNoSolver, "topological prefix splits only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitEnvironment;
    }

    try {
        if (*sched) {
            RunOptions o;
            apply(sm, o);
            apply(sp, o);
            NamedInstance ni = load_instance(source, o);
            PipelineResult res = run_pipeline(ni.inst, o);
            if (!outPath.empty())
                write_file(outPath, serialize_schedule(res.schedule));
            if (!reportPath.empty())
                write_file(reportPath, res.report);
            const Architecture &a = ni.inst.arch;
            std::cout << "instance " << ni.name << "\nmachine P=" << a.P << " r=" << a.r << " g=" << a.g
                      << " L=" << a.L << " r0=" << ni.r0 << "\nmethod " << method_name(res.method) << "\nstatus "
                      << res.status << "\nbaseline_cost " << res.baselineCost << "\ncost " << res.cost
                      << "\nsync_cost " << sync_cost(ni.inst, res.schedule) << "\nasync_cost "
                      << async_cost(ni.inst, res.schedule) << "\nsupersteps " << res.schedule.size() << '\n';
            return kExitOk;
        }
        if (*exp) {
            RunOptions o;
            apply(em, o);
            apply(ep, o);
            o.dncAbove = dncAbove;
            std::ofstream file;
            std::ostream *out = &std::cout;
            if (!csvPath.empty()) {
                file.open(csvPath);
                if (!file)
                    throw CliError(kExitEnvironment, "cannot write '" + csvPath + "'");
                out = &file;
            }
            *out << csv_header() << '\n';
            auto rows = run_experiment(sources, o, jobs, out);
            *out << csv_geomean_row(rows) << '\n';
            return kExitOk;
        }
        if (*val || *cost) {
            RunOptions o;
            apply(*val ? vm : cm, o);
            NamedInstance ni = load_instance(dagArg, o);
            MbspSchedule s = read_schedule(schedArg, ni.inst.arch.P);
            auto report = validate_schedule(ni.inst, s);
            if (!report.valid()) {
                std::cout << "invalid: " << report.violation->describe() << '\n';
                return kExitInvalid;
            }
            if (*val)
                std::cout << "valid\n";
            else
                std::cout << cost_breakdown(ni.inst, s).toCsv();
            return kExitOk;
        }
        if (*gad) {
            GadgetSpec spec = parse_gadget_spec(gadgetSpec);
            GadgetInstance g = make_gadget(spec);
            const std::string dagText = serialize_dag(g.dag);
            if (gadgetOut.empty())
                std::cout << dagText;
            else
                write_file(gadgetOut, dagText);
            std::cerr << "machine P=" << g.arch.P << " r=" << g.arch.r << " g=" << g.arch.g << " L=" << g.arch.L
                      << '\n';
            if (!gadgetSchedule.empty()) {
                auto all = gadget_schedules(spec);
                auto it = std::find_if(all.begin(), all.end(), [&](auto &p) { return p.first == gadgetSchedule; });
                if (it == all.end()) {
                    std::string names;
                    for (auto &p : all)
                        names += " " + p.first;
                    throw CliError(kExitEnvironment,
                                   "no schedule '" + gadgetSchedule + "' for this gadget; known:" + names);
                }
                const std::string text = serialize_schedule(it->second);
                if (gadgetScheduleOut.empty())
                    std::cout << text;
                else
                    write_file(gadgetScheduleOut, text);
            }
            return kExitOk;
        }
        if (*part) {
            RunOptions o;
            NamedInstance ni = load_instance(partIn, o);
            std::optional<SolverConfig> solver;
            if (!partNoSolver) {
                SolverConfig sc;
                sc.command = partSolver.empty() ? default_solver_command() : partSolver;
                sc.timeLimit = partLimit;
                if (!sc.command.empty())
                    solver = sc;
            }
            AcyclicPartition p = recursive_partition(ni.inst.dag, partMax, solver);
            std::ostringstream text;
            write_partition_csv(text, p);
            if (partOut.empty())
                std::cout << text.str();
            else
                write_file(partOut, text.str());
            return kExitOk;
        }
    } catch (const CliError &e) {
        std::cerr << "mbsp: " << e.what() << '\n';
        return e.code();
    } catch (const InfeasibleError &e) {
        std::cerr << "mbsp: infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::invalid_argument &e) {
        std::cerr << "mbsp: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception &e) {
        std::cerr << "mbsp: " << e.what() << '\n';
        return kExitEnvironment;
    }
    return kExitOk;
}
