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

#include "mbsp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace mbsp {

namespace {

std::string number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{} || !std::isfinite(x))
        throw std::invalid_argument("unserializable coefficient");
    return std::string(buf, end);
}

// Appends tokens to `out`, starting a continuation line once a line passes 80 characters.
class Wrapper {
  public:
    explicit Wrapper(std::string &out) : out_(out) {}
    void put(const std::string &token) {
        if (col_ > 80) {
            out_ += "\n   ";
            col_ = 3;
        }
        out_ += token;
        col_ += token.size();
    }
    void end() {
        out_ += '\n';
        col_ = 0;
    }

  private:
    std::string &out_;
    std::size_t col_ = 0;
};

void terms(Wrapper &w, const MilpModel &m, const std::vector<LinTerm> &ts) {
    if (ts.empty()) {
        w.put(" 0 " + m.variables().front().name);
        return;
    }
    bool first = true;
    for (const LinTerm &t : ts) {
        const double a = std::abs(t.coef);
        std::string tok = t.coef < 0 ? " - " : (first ? " " : " + ");
        if (a != 1.0)
            tok += number(a) + " ";
        w.put(tok + m.variables()[static_cast<std::size_t>(t.var)].name);
        first = false;
    }
}

std::string lower(std::string s) {
    for (char &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_value(const std::string &tok, const std::string &context) {
    double x = 0;
    const char *b = tok.data();
    const char *e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc{} || p != e || !std::isfinite(x))
        throw SolutionParseError("malformed value '" + tok + "' for " + context);
    return x;
}

void set_value(const MilpModel &model, ParsedSolution &out, const std::string &name, const std::string &value) {
    const std::int32_t id = model.find(name);
    if (id < 0)
        throw SolutionParseError("unknown variable '" + name + "'");
    out.values[static_cast<std::size_t>(id)] = parse_value(value, name);
}

void parse_pairs(const MilpModel &model, std::istream &in, ParsedSolution &out) {
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string a;
        std::string b;
        std::string extra;
        if (!(ls >> a))
            continue;
        if (a[0] == '#') {
            std::string key = a.size() > 1 ? a.substr(1) : "";
            if (key.empty())
                ls >> key;
            std::string val;
            ls >> val;
            if (key == "status")
                out.status = lower(val);
            else if (key == "objective")
                out.objective = parse_value(val, "objective");
            continue;
        }
        if (!(ls >> b) || (ls >> extra))
            throw SolutionParseError("malformed pair line '" + line + "'");
        set_value(model, out, a, b);
    }
}

std::optional<std::string> attribute(const std::string &element, const std::string &key) {
    const std::string needle = key + "=\"";
    std::size_t at = 0;
    while ((at = element.find(needle, at)) != std::string::npos) {
        // Require a word boundary so `name=` does not match `varname=`.
        if (at == 0 || std::isspace(static_cast<unsigned char>(element[at - 1]))) {
            const std::size_t b = at + needle.size();
            const std::size_t e = element.find('"', b);
            if (e == std::string::npos)
                throw SolutionParseError("unterminated attribute " + key);
            return element.substr(b, e - b);
        }
        at += needle.size();
    }
    return std::nullopt;
}

void parse_xml(const MilpModel &model, const std::string &text, ParsedSolution &out) {
    std::size_t at = 0;
    while ((at = text.find('<', at)) != std::string::npos) {
        const std::size_t end = text.find('>', at);
        if (end == std::string::npos)
            throw SolutionParseError("unterminated XML element");
        const std::string el = text.substr(at, end - at + 1);
        at = end;
        if (el.rfind("<variable", 0) == 0 && (el.size() > 9 && std::isspace(static_cast<unsigned char>(el[9])))) {
            auto name = attribute(el, "name");
            auto value = attribute(el, "value");
            if (!name || !value)
                throw SolutionParseError("variable element without name or value: " + el);
            set_value(model, out, *name, *value);
        } else if (el.rfind("<header", 0) == 0) {
            if (auto v = attribute(el, "objectiveValue"))
                out.objective = parse_value(*v, "objectiveValue");
            if (auto s = attribute(el, "solutionStatusString"))
                out.status = lower(*s);
        }
    }
}

void parse_cbc(const MilpModel &model, std::istream &in, ParsedSolution &out) {
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first))
            continue;
        if (header) {
            header = false;
            out.status = lower(first);
            const std::size_t at = line.find("objective value");
            if (at != std::string::npos) {
                std::istringstream os(line.substr(at + 15));
                std::string v;
                if (os >> v)
                    out.objective = parse_value(v, "objective");
            }
            continue;
        }
        // `[**] index name value [reduced cost]`; `**` flags an infeasible row in CBC output.
        if (first == "**" && !(ls >> first))
            throw SolutionParseError("malformed CBC line '" + line + "'");
        std::string name;
        std::string value;
        if (!(ls >> name >> value))
            throw SolutionParseError("malformed CBC line '" + line + "'");
        set_value(model, out, name, value);
    }
}

// XML opens with `<`; CBC with a status word that is not followed by a lone number; the rest is pairs.
SolutionDialect sniff(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string a;
        std::string b;
        std::string extra;
        if (!(ls >> a))
            continue;
        if (a[0] == '<')
            return SolutionDialect::SolXml;
        if (a[0] == '#')
            return SolutionDialect::Pairs;
        double x = 0;
        const bool pair = (ls >> b) && !(ls >> extra) &&
                          std::from_chars(b.data(), b.data() + b.size(), x).ptr == b.data() + b.size();
        static const char *const cbcWords[] = {"optimal", "infeasible", "stopped", "integer", "unbounded"};
        const bool status = std::any_of(std::begin(cbcWords), std::end(cbcWords),
                                        [&](const char *w) { return lower(a) == w; });
        return status && !pair ? SolutionDialect::Cbc : SolutionDialect::Pairs;
    }
    return SolutionDialect::Pairs;
}

std::string shell_quote(const std::string &s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'')
            q += "'\\''";
        else
            q += c;
    }
    return q + "'";
}

std::string substitute(std::string cmd, const std::string &key, const std::string &value) {
    const std::string needle = "{" + key + "}";
    for (std::size_t at = 0; (at = cmd.find(needle, at)) != std::string::npos; at += value.size())
        cmd.replace(at, needle.size(), value);
    return cmd;
}

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p);
    if (!in)
        return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_base() {
    static std::atomic<std::uint64_t> counter{0};
    std::filesystem::path dir;
    if (const char *env = std::getenv("MBSP_TMPDIR"); env != nullptr && *env != '\0')
        dir = env;
    else
        dir = std::filesystem::temp_directory_path();
    std::filesystem::create_directories(dir);
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    return dir / ("mbsp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                  std::to_string(stamp % 1000000));
}

bool same_objective(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

} // namespace

std::string emit_lp(const MilpModel &m) {
    if (m.numVariables() == 0)
        throw std::invalid_argument("cannot emit a model without variables");
    std::string out = "\\ mbsp model\nMinimize\n";
    Wrapper w(out);
    w.put(" obj:");
    terms(w, m, m.objective());
    if (m.objectiveConstant() != 0.0)
        w.put((m.objectiveConstant() < 0 ? " - " : " + ") + number(std::abs(m.objectiveConstant())));
    w.end();
    out += "Subject To\n";
    std::size_t k = 0;
    for (const MilpConstraint &c : m.constraints()) {
        w.put(" c" + std::to_string(k++) + ":");
        terms(w, m, c.terms);
        w.put(c.sense == Sense::Le ? " <= " : c.sense == Sense::Ge ? " >= " : " = ");
        w.put(number(c.rhs == 0.0 ? 0.0 : c.rhs));
        w.end();
    }
    out += "Bounds\n";
    for (const MilpVariable &v : m.variables()) {
        const double lb = v.type == VarType::Binary ? 0.0 : v.lb;
        const double ub = v.type == VarType::Binary ? 1.0 : v.ub;
        if (std::isinf(lb) && std::isinf(ub))
            out += " " + v.name + " free\n";
        else if (std::isinf(ub))
            out += " " + v.name + " >= " + number(lb) + "\n";
        else
            out += " " + (std::isinf(lb) ? std::string("-inf") : number(lb)) + " <= " + v.name + " <= " + number(ub) + "\n";
    }
    out += "Binary\n";
    for (const MilpVariable &v : m.variables())
        if (v.type == VarType::Binary)
            w.put(" " + v.name);
    if (m.numBinaries() > 0)
        w.end();
    out += "End\n";
    return out;
}

ParsedSolution parse_solution(const MilpModel &model, const std::string &text, SolutionDialect dialect) {
    ParsedSolution out;
    out.values.assign(model.numVariables(), 0.0);
    if (dialect == SolutionDialect::Auto)
        dialect = sniff(text);
    std::istringstream in(text);
    switch (dialect) {
    case SolutionDialect::SolXml:
        parse_xml(model, text, out);
        break;
    case SolutionDialect::Cbc:
        parse_cbc(model, in, out);
        break;
    default:
        parse_pairs(model, in, out);
        break;
    }
    return out;
}

std::string write_pairs(const MilpModel &model, const Assignment &a) {
    if (a.size() != model.numVariables())
        throw std::invalid_argument("assignment size differs from the model");
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i)
        out += model.variables()[i].name + " " + number(a[i] == 0.0 ? 0.0 : a[i]) + "\n";
    return out;
}

const char *status_name(SolverStatus s) {
    switch (s) {
    case SolverStatus::Optimal:
        return "optimal";
    case SolverStatus::Feasible:
        return "feasible";
    case SolverStatus::Infeasible:
        return "infeasible";
    case SolverStatus::Timeout:
        return "timeout";
    default:
        return "error";
    }
}

std::string default_solver_command() {
    if (const char *env = std::getenv("MBSP_SOLVER_CMD"); env != nullptr && *env != '\0')
        return env;
    return MBSP_DEFAULT_SOLVER_CMD;
}

SolverRun solve(const MilpModel &model, const SolverConfig &cfg) {
    SolverRun run;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string command = cfg.command.empty() ? default_solver_command() : cfg.command;
    if (command.empty()) {
        run.message = "no solver command configured (set MBSP_SOLVER_CMD)";
        return run;
    }
    const auto base = temp_base();
    const auto lp = base.string() + ".lp";
    const auto sol = base.string() + ".sol";
    const auto warm = base.string() + ".warm";
    const auto log = base.string() + ".log";
    {
        std::ofstream f(lp);
        f << emit_lp(model);
    }
    if (cfg.warmStart) {
        std::ofstream f(warm);
        f << write_pairs(model, *cfg.warmStart);
    }
    std::string cmd = substitute(command, "lp", shell_quote(lp));
    cmd = substitute(cmd, "sol", shell_quote(sol));
    cmd = substitute(cmd, "timelimit", number(cfg.timeLimit));
    cmd = substitute(cmd, "warmstart", cfg.warmStart ? shell_quote(warm) : std::string("-"));
    const int rc = std::system((cmd + " > " + shell_quote(log) + " 2>&1").c_str());
    const std::string text = read_file(sol);
    const std::string logText = read_file(log);
    if (!cfg.keepFiles)
        for (const auto &p : {lp, sol, warm, log})
            std::filesystem::remove(p);

    std::optional<ParsedSolution> parsed;
    if (!text.empty()) {
        try {
            parsed = parse_solution(model, text);
        } catch (const SolutionParseError &e) {
            run.message = std::string("solution parse failed: ") + e.what();
        }
    } else {
        run.message = "solver exited with status " + std::to_string(rc) + " and no solution file";
        if (!logText.empty())
            run.message += ": " + logText.substr(logText.size() > 400 ? logText.size() - 400 : 0);
    }

    const std::string word = parsed && parsed->status ? *parsed->status : "";
    bool hasValues = false;
    if (parsed) {
        if (word == "optimal")
            run.status = SolverStatus::Optimal;
        else if (word == "infeasible" || word == "integer infeasible")
            run.status = SolverStatus::Infeasible;
        else if (word == "timeout")
            run.status = SolverStatus::Timeout;
        else if (word == "stopped")
            run.status = SolverStatus::Feasible; // CBC time limit; checked below
        else if (word == "feasible" || word.empty())
            run.status = SolverStatus::Feasible;
        else
            run.status = SolverStatus::Error;
        hasValues = run.status == SolverStatus::Optimal || run.status == SolverStatus::Feasible;
    }
    if (hasValues) {
        if (auto bad = check_assignment(model, parsed->values)) {
            // CBC reports "Stopped" both with and without an incumbent.
            run.status = word == "stopped" ? SolverStatus::Timeout : SolverStatus::Error;
            run.message = "solver assignment fails substitution: " + *bad;
        } else {
            run.objective = model.objectiveValue(parsed->values);
            if (parsed->objective && !same_objective(*parsed->objective, run.objective)) {
                run.status = SolverStatus::Error;
                run.message = "reported objective " + number(*parsed->objective) + " differs from substituted " +
                              number(run.objective);
            } else {
                run.assignment = std::move(parsed->values);
            }
        }
    }
    if (cfg.warmStart && !check_assignment(model, *cfg.warmStart)) {
        const double warmObj = model.objectiveValue(*cfg.warmStart);
        if (run.status == SolverStatus::Infeasible) {
            run.status = SolverStatus::Error;
            run.message = "solver claims infeasible but the warm start is feasible";
        }
        if (!run.assignment || warmObj < run.objective) {
            run.assignment = *cfg.warmStart;
            run.objective = warmObj;
            if (run.status != SolverStatus::Timeout && run.status != SolverStatus::Optimal)
                run.status = SolverStatus::Feasible;
        }
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

IlpResult solve_mbsp(const MbspIlp &model, const SolverConfig &cfg, const std::optional<MbspSchedule> &warm) {
    IlpResult out;
    SolverConfig c = cfg;
    std::optional<Weight> warmCost;
    std::optional<MbspSchedule> warmSchedule;
    if (warm) {
        warmSchedule = normalize_schedule(model.inst, *warm);
        c.warmStart = warm_start(model, *warmSchedule);
        warmCost = schedule_cost(model.inst, *warmSchedule, model.cfg.objective);
    }
    out.run = solve(model.milp, c);
    if (!out.run.assignment)
        return out;
    MbspSchedule decoded = decode_solution(model, *out.run.assignment);
    Weight cost = schedule_cost(model.inst, decoded, model.cfg.objective);
    if (warmCost && cost >= *warmCost) {
        decoded = *warmSchedule;
        cost = *warmCost;
        out.fromWarmStart = true;
    }
    if (!same_objective(static_cast<double>(cost), out.run.objective)) {
        // Decoding dropped redundant work; report the tighter encoding of what it kept.
        try {
            out.run.assignment = warm_start(model, decoded);
            out.run.objective = model.milp.objectiveValue(*out.run.assignment);
        } catch (const std::invalid_argument &) {
            out.run.objective = static_cast<double>(cost);
            out.run.message += (out.run.message.empty() ? "" : "; ") +
                               std::string("decoded schedule needs more steps than the horizon");
        }
    }
    out.schedule = std::move(decoded);
    out.cost = cost;
    return out;
}

} // namespace mbsp
