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

// Pipelines and experiment batches behind the mbsp command-line tool.

#include "mbsp/cli.hpp"
#include "mbsp/cost.hpp"
#include "mbsp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace mbsp {

namespace fs = std::filesystem;

const char *method_name(Method m) {
    switch (m) {
    case Method::TwoStage:
        return "two-stage";
    case Method::Ilp:
        return "ilp";
    case Method::Dnc:
        return "dnc";
    case Method::Oracle:
        return "oracle";
    }
    return "?";
}

namespace {

template <class E>
E lookup(const std::map<std::string, E> &table, const std::string &s, const char *what) {
    auto it = table.find(s);
    if (it == table.end())
        throw CliError(kExitEnvironment, std::string("unknown ") + what + " '" + s + "'");
    return it->second;
}

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fixed3(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' || c == '\r' ? ' ' : c;
    }
    return out + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

Method parse_method(const std::string &s) {
    static const std::map<std::string, Method> t{
        {"two-stage", Method::TwoStage}, {"ilp", Method::Ilp}, {"dnc", Method::Dnc}, {"oracle", Method::Oracle}};
    return lookup(t, s, "method");
}

BaselineKind parse_baseline(const std::string &s) {
    static const std::map<std::string, BaselineKind> t{
        {"greedy", BaselineKind::Greedy}, {"worksteal", BaselineKind::WorkStealing}, {"dfs", BaselineKind::Dfs}};
    return lookup(t, s, "baseline");
}

EvictionPolicy parse_policy(const std::string &s) {
    static const std::map<std::string, EvictionPolicy> t{{"clairvoyant", EvictionPolicy::Clairvoyant},
                                                        {"lru", EvictionPolicy::Lru}};
    return lookup(t, s, "policy");
}

Objective parse_objective(const std::string &s) {
    static const std::map<std::string, Objective> t{{"sync", Objective::Sync}, {"async", Objective::Async}};
    return lookup(t, s, "objective");
}

Weight cache_size(Weight r0, double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw CliError(kExitInfeasible, "cache multiplier must be positive");
    // The epsilon keeps k * r0 that is integral up to rounding from jumping one unit.
    const auto r = static_cast<Weight>(std::ceil(k * static_cast<double>(r0) - 1e-9));
    if (r < r0)
        throw CliError(kExitInfeasible, "cache size " + std::to_string(r) + " is below the minimum " +
                                            std::to_string(r0));
    return r;
}

NamedInstance load_instance(const std::string &source, const RunOptions &opts) {
    NamedInstance out;
    WeightedDag dag;
    std::optional<Architecture> own;
    if (is_gadget_spec(source)) {
        GadgetInstance g;
        try {
            g = make_gadget(parse_gadget_spec(source));
        } catch (const std::invalid_argument &e) {
            throw CliError(kExitInvalid, e.what());
        }
        dag = std::move(g.dag);
        own = g.arch;
        out.name = source;
    } else {
        try {
            dag = read_dag_file(source);
        } catch (const DagError &e) {
            throw CliError(kExitInvalid, source + ": " + e.what());
        }
        out.name = fs::path(source).filename().string();
    }
    if (dag.size() > 0 && dag.totalMu() == 0) {
        dag = assign_random_memory_weights(dag, opts.seed ^ fnv1a(out.name));
        out.randomMu = true;
    }
    out.r0 = min_feasible_cache(dag);

    Architecture arch = own.value_or(Architecture{4, 0, 1, 10});
    if (opts.P)
        arch.P = *opts.P;
    if (opts.g)
        arch.g = *opts.g;
    if (opts.L)
        arch.L = *opts.L;
    if (opts.r) {
        arch.r = *opts.r;
        if (arch.r < out.r0)
            throw CliError(kExitInfeasible, "cache size " + std::to_string(arch.r) + " is below the minimum " +
                                                std::to_string(out.r0));
    } else if (opts.rMult) {
        arch.r = cache_size(out.r0, *opts.rMult);
    } else if (!own) {
        arch.r = cache_size(out.r0, 3.0);
    }
    try {
        arch.check();
    } catch (const std::invalid_argument &e) {
        throw CliError(kExitInvalid, e.what());
    }
    out.inst = MbspInstance(std::move(dag), arch);
    return out;
}

std::vector<std::string> expand_sources(const std::vector<std::string> &args) {
    std::vector<std::string> out;
    for (const auto &a : args) {
        std::error_code ec;
        if (!is_gadget_spec(a) && fs::is_directory(a, ec)) {
            std::vector<std::string> files;
            for (const auto &e : fs::directory_iterator(a))
                if (e.is_regular_file())
                    files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            if (files.empty())
                throw CliError(kExitInvalid, "directory '" + a + "' holds no files");
            out.insert(out.end(), files.begin(), files.end());
        } else {
            out.push_back(a);
        }
    }
    return out;
}

PipelineResult run_pipeline(const MbspInstance &inst, const RunOptions &opts) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineResult res;
    res.method = opts.method;

    TwoStageConfig ts;
    ts.baseline = opts.baseline;
    ts.policy = opts.policy;
    ts.seed = opts.seed;
    MbspSchedule baseline;
    try {
        baseline = two_stage_schedule(inst, ts);
    } catch (const InfeasibleError &e) {
        throw CliError(kExitInfeasible, e.what());
    }
    res.baselineCost = schedule_cost(inst, baseline, opts.objective);

    SolverConfig solver;
    solver.command = opts.solverCmd.empty() ? default_solver_command() : opts.solverCmd;
    solver.timeLimit = opts.timeLimit;
    const bool needsSolver = opts.method == Method::Ilp || opts.method == Method::Dnc;
    if (needsSolver && solver.command.empty())
        throw CliError(kExitEnvironment, "no MILP solver configured (set --solver-cmd or MBSP_SOLVER_CMD)");

    IlpConfig ilp;
    ilp.objective = opts.objective;
    ilp.stepMerging = opts.stepMerging;
    ilp.allowRecompute = opts.recompute;
    ilp.slack = opts.slack;

    switch (opts.method) {
    case Method::TwoStage:
        res.schedule = baseline;
        res.status = "baseline";
        break;
    case Method::Ilp: {
        ilp.T = choose_horizon(inst, normalize_schedule(inst, baseline), ilp);
        MbspIlp model = build_full_ilp(inst, ilp);
        if (!opts.recompute)
            model = forbid_recompute(std::move(model));
        IlpResult r = solve_mbsp(model, solver, baseline);
        if (r.run.status == SolverStatus::Error && !r.schedule)
            throw CliError(kExitEnvironment, "solver failed: " + r.run.message);
        res.status = status_name(r.run.status);
        res.schedule = r.schedule ? *r.schedule : baseline;
        break;
    }
    case Method::Dnc: {
        DncConfig cfg;
        cfg.maxPart = opts.maxPart;
        cfg.solver = solver;
        cfg.ilp = ilp;
        DncResult r = divide_and_conquer(inst, cfg);
        res.status = "optimal";
        for (const auto &s : r.subs)
            if (s.status != "optimal") {
                res.status = s.status.substr(0, s.status.find(':'));
                break;
            }
        std::ostringstream rep;
        write_dnc_report(rep, inst, r);
        res.report = rep.str();
        res.schedule = std::move(r.schedule);
        break;
    }
    case Method::Oracle: {
        OracleConfig oc;
        oc.objective = opts.objective;
        oc.allowRecompute = opts.recompute;
        try {
            res.schedule = brute_force_optimum(inst, oc).schedule;
        } catch (const std::invalid_argument &e) {
            throw CliError(kExitEnvironment, std::string("oracle: ") + e.what());
        } catch (const OracleLimitError &e) {
            throw CliError(kExitEnvironment, std::string("oracle: ") + e.what());
        } catch (const InfeasibleError &e) {
            throw CliError(kExitInfeasible, e.what());
        }
        res.status = "optimal";
        break;
    }
    }

    const auto report = validate_schedule(inst, res.schedule);
    if (!report.valid())
        throw std::logic_error("pipeline produced an invalid schedule: " + report.violation->describe());
    res.cost = schedule_cost(inst, res.schedule, opts.objective);
    res.seconds = seconds_since(t0);
    return res;
}

std::optional<double> ExperimentRow::reduction() const {
    if (!baselineCost || !ilpCost)
        return std::nullopt;
    if (*baselineCost == 0)
        return *ilpCost == 0 ? std::optional<double>(1.0) : std::nullopt;
    return static_cast<double>(*ilpCost) / static_cast<double>(*baselineCost);
}

std::string csv_header() { return "instance,P,r,g,L,objective,method,baseline_cost,ilp_cost,reduction,status,seconds"; }

std::string csv_row(const ExperimentRow &row) {
    auto opt = [](const std::optional<Weight> &w) { return w ? std::to_string(*w) : std::string(); };
    const auto red = row.reduction();
    std::ostringstream o;
    o << csv_field(row.instance) << ',' << row.P << ',' << row.r << ',' << row.g << ',' << row.L << ','
      << objective_name(row.objective) << ',' << row.method << ',' << opt(row.baselineCost) << ','
      << opt(row.ilpCost) << ',' << (red ? fixed3(*red) : std::string()) << ',' << csv_field(row.status) << ','
      << fixed3(row.seconds);
    return o.str();
}

double geomean(const std::vector<double> &xs) {
    if (xs.empty())
        return std::nan("");
    double s = 0.0;
    for (double x : xs)
        s += std::log(x);
    return std::exp(s / static_cast<double>(xs.size()));
}

std::string csv_geomean_row(const std::vector<ExperimentRow> &rows) {
    std::vector<double> xs;
    for (const auto &r : rows)
        if (auto f = r.reduction())
            xs.push_back(*f);
    return "geomean,,,,,,,,," + (xs.empty() ? std::string() : fixed3(geomean(xs))) + "," +
           std::to_string(xs.size()) + " instances,";
}

namespace {

ExperimentRow run_one(const std::string &source, const RunOptions &base) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.instance = is_gadget_spec(source) ? source : fs::path(source).filename().string();
    row.objective = base.objective;
    RunOptions opts = base;
    try {
        NamedInstance ni = load_instance(source, opts);
        row.instance = ni.name;
        const Architecture &a = ni.inst.arch;
        row.P = a.P;
        row.r = a.r;
        row.g = a.g;
        row.L = a.L;
        if (opts.method == Method::Ilp && ni.inst.dag.size() > opts.dncAbove)
            opts.method = Method::Dnc;
        row.method = method_name(opts.method);
        PipelineResult res = run_pipeline(ni.inst, opts);
        row.baselineCost = res.baselineCost;
        row.ilpCost = res.cost;
        row.status = res.status;
    } catch (const CliError &e) {
        row.method = method_name(opts.method);
        row.status = std::string(e.code() == kExitInfeasible ? "infeasible: " : "error: ") + e.what();
    } catch (const std::exception &e) {
        row.method = method_name(opts.method);
        row.status = std::string("error: ") + e.what();
    }
    row.seconds = seconds_since(t0);
    return row;
}

} // namespace

std::vector<ExperimentRow> run_experiment(const std::vector<std::string> &sources, const RunOptions &opts,
                                          unsigned jobs, std::ostream *sink) {
    const auto files = expand_sources(sources);
    std::vector<std::optional<ExperimentRow>> rows(files.size());
    std::mutex mu;
    std::size_t next = 0;    // next source to claim
    std::size_t flushed = 0; // rows [0, flushed) are written to the sink

    // Rows reach the sink in source order regardless of completion order.
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lk(mu);
                if (next == files.size())
                    return;
                i = next++;
            }
            ExperimentRow row = run_one(files[i], opts);
            std::lock_guard lk(mu);
            rows[i] = std::move(row);
            while (flushed < rows.size() && rows[flushed]) {
                if (sink)
                    *sink << csv_row(*rows[flushed]) << '\n' << std::flush;
                ++flushed;
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();

    std::vector<ExperimentRow> out;
    out.reserve(rows.size());
    for (auto &r : rows)
        out.push_back(std::move(*r));
    return out;
}

std::vector<std::pair<std::string, MbspSchedule>> gadget_schedules(const GadgetSpec &spec) {
    std::vector<std::pair<std::string, MbspSchedule>> out;
    if (spec.family == "zipper") {
        const GadgetInstance g = make_gadget(spec);
        const auto d = static_cast<std::uint32_t>(spec.get("d", 4));
        const auto m = static_cast<std::uint32_t>(spec.get("m", 21));
        out.emplace_back("two-stage", zipper_two_stage_schedule(d, m, g.arch));
        out.emplace_back("optimal", zipper_optimal_schedule(d, m, g.arch));
    } else if (spec.family == "async_gap") {
        auto gg = async_gap_gadget(static_cast<std::uint32_t>(spec.get("P", 4)), spec.get("Z", 1000));
        out.emplace_back("diagonal", std::move(gg.first));
        out.emplace_back("aligned", std::move(gg.second));
    } else if (spec.family == "sync_gap") {
        auto gg = sync_gap_gadget(spec.get("Z", 100));
        out.emplace_back("sync-style", std::move(gg.first));
        out.emplace_back("alternative", std::move(gg.second));
    }
    return out;
}

} // namespace mbsp
