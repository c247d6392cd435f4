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

#include "mbsp/cost.hpp"
#include "mbsp/gadgets.hpp"
#include "mbsp/solver.hpp"
#include "mbsp/two_stage.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mbsp;
using mbsp::test::chain;
using mbsp::test::random_instance;

namespace {

MilpModel toy(double lower) {
    MilpModel m;
    const auto x = m.addBinary("x");
    m.addConstraint(LinExpr{}.add(x), Sense::Ge, lower);
    m.setObjective(LinExpr{}.add(x));
    return m;
}

bool have_solver() { return !default_solver_command().empty(); }

SolverConfig quick() {
    SolverConfig c;
    c.timeLimit = 30;
    return c;
}

} // namespace

TEST(EmitLp, OneVariableModel) {
    const std::string lp = emit_lp(toy(1));
    EXPECT_EQ(lp, "\\ mbsp model\nMinimize\n obj: x\nSubject To\n c0: x >= 1\nBounds\n 0 <= x <= 1\nBinary\n x\nEnd\n");
}

TEST(EmitLp, DeterministicAndWrapped) {
    MbspInstance inst(chain(4), Architecture{2, 2, 3, 1});
    IlpConfig cfg;
    cfg.T = 6;
    const std::string a = emit_lp(build_full_ilp(inst, cfg).milp);
    const std::string b = emit_lp(build_full_ilp(inst, cfg).milp);
    EXPECT_EQ(a, b);
    std::size_t start = 0;
    for (std::size_t nl; (nl = a.find('\n', start)) != std::string::npos; start = nl + 1)
        EXPECT_LT(nl - start, 200U);
}

TEST(EmitLp, NegativeCoefficientsAndFreeBounds) {
    MilpModel m;
    const auto x = m.addContinuous("x", -std::numeric_limits<double>::infinity());
    const auto y = m.addContinuous("y", 0, 4);
    m.addConstraint(LinExpr{}.add(x, 2.5).add(y, -1), Sense::Eq, 3);
    m.setObjective(LinExpr{}.add(y).addConstant(-2));
    const std::string lp = emit_lp(m);
    EXPECT_NE(lp.find(" obj: y - 2\n"), std::string::npos);
    EXPECT_NE(lp.find(" c0: 2.5 x - y = 3\n"), std::string::npos);
    EXPECT_NE(lp.find(" x free\n"), std::string::npos);
    EXPECT_NE(lp.find(" 0 <= y <= 4\n"), std::string::npos);
}

TEST(ParseSolution, Dialects) {
    MbspInstance inst(chain(2), Architecture{1, 2, 1, 0});
    IlpConfig cfg;
    cfg.T = 3;
    const auto model = build_full_ilp(inst, cfg);
    const auto id = static_cast<std::size_t>(model.milp.find("comp_p0_v1_t0"));

    const auto pairs = parse_solution(model.milp, "# status optimal\n# objective 3\ncomp_p0_v1_t0 1\n");
    EXPECT_EQ(pairs.values[id], 1.0);
    EXPECT_EQ(pairs.status, "optimal");
    EXPECT_EQ(pairs.objective, 3.0);
    EXPECT_EQ(pairs.values.size(), model.milp.numVariables());
    EXPECT_EQ(pairs.values[0], 0.0);

    const auto xml = parse_solution(
        model.milp, "<?xml version=\"1.0\"?>\n<CPLEXSolution>\n<header objectiveValue=\"3\" solutionStatusString=\"Optimal\"/>\n"
                    "<variables>\n<variable name=\"comp_p0_v1_t0\" index=\"7\" value=\"1\"/>\n</variables>\n</CPLEXSolution>\n");
    EXPECT_EQ(xml.values[id], 1.0);
    EXPECT_EQ(xml.status, "optimal");

    const auto cbc = parse_solution(model.milp, "Optimal - objective value 3.00000000\n"
                                                "      4 comp_p0_v1_t0              1                       0\n");
    EXPECT_EQ(cbc.values[id], 1.0);
    EXPECT_EQ(cbc.status, "optimal");
    EXPECT_EQ(cbc.objective, 3.0);
}

TEST(ParseSolution, Errors) {
    const MilpModel m = toy(1);
    try {
        parse_solution(m, "y 1\n");
        FAIL() << "unknown name accepted";
    } catch (const SolutionParseError &e) {
        EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
    }
    EXPECT_THROW(parse_solution(m, "x one\n"), SolutionParseError);
    EXPECT_THROW(parse_solution(m, "x 1 2\n", SolutionDialect::Pairs), SolutionParseError);
    EXPECT_THROW(parse_solution(m, "<variable name=\"x\"/>"), SolutionParseError);
}

TEST(ParseSolution, PairsRoundTripWarmStarts) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = random_instance(rng, 12);
        const auto base = two_stage_schedule(inst);
        IlpConfig cfg;
        cfg.objective = trial % 2 == 0 ? Objective::Sync : Objective::Async;
        cfg.T = choose_horizon(inst, base, cfg);
        const auto model = build_full_ilp(inst, cfg);
        const Assignment a = warm_start(model, normalize_schedule(inst, base));
        EXPECT_EQ(parse_solution(model.milp, write_pairs(model.milp, a)).values, a);
    }
}

TEST(Solve, MissingCommandIsError) {
    SolverConfig c;
    c.command = "false";
    const auto run = solve(toy(1), c);
    EXPECT_EQ(run.status, SolverStatus::Error);
    EXPECT_FALSE(run.assignment);
}

TEST(Solve, WarmStartSurvivesSolverFailure) {
    SolverConfig c;
    c.command = "false";
    c.warmStart = Assignment{1.0};
    const auto run = solve(toy(1), c);
    EXPECT_EQ(run.status, SolverStatus::Feasible);
    ASSERT_TRUE(run.assignment);
    EXPECT_EQ(run.objective, 1.0);
}

TEST(Solve, CommandTemplateSubstitution) {
    // A fake solver that writes a fixed pairs file to {sol}.
    SolverConfig c;
    c.command = "printf '# status optimal\\nx 1\\n' > {sol}; test {warmstart} = - && test {timelimit} = 7";
    c.timeLimit = 7;
    const auto run = solve(toy(1), c);
    EXPECT_EQ(run.status, SolverStatus::Optimal);
    EXPECT_EQ(run.objective, 1.0);
}

TEST(Solve, SubstitutionCheckOverridesClaims) {
    SolverConfig c;
    c.command = "printf '# status optimal\\nx 0\\n' > {sol}";
    const auto run = solve(toy(1), c);
    EXPECT_EQ(run.status, SolverStatus::Error);
    EXPECT_FALSE(run.assignment);
}

TEST(SolveExternal, InfeasibleToy) {
    if (!have_solver())
        GTEST_SKIP() << "no MILP solver configured";
    const auto run = solve(toy(2), quick());
    EXPECT_EQ(run.status, SolverStatus::Infeasible);
}

TEST(SolveExternal, FeasibleToy) {
    if (!have_solver())
        GTEST_SKIP() << "no MILP solver configured";
    const auto run = solve(toy(1), quick());
    EXPECT_EQ(run.status, SolverStatus::Optimal);
    EXPECT_EQ(run.objective, 1.0);
}

TEST(SolveExternal, ThreeChainMatchesOracle) {
    if (!have_solver())
        GTEST_SKIP() << "no MILP solver configured";
    MbspInstance inst(chain(3), Architecture{1, 2, 2, 1});
    for (Objective o : {Objective::Sync, Objective::Async})
        for (bool merged : {false, true}) {
            SCOPED_TRACE(std::string(objective_name(o)) + (merged ? " merged" : " unmerged"));
            OracleConfig oc;
            oc.objective = o;
            const auto best = brute_force_optimum(inst, oc);
            IlpConfig cfg;
            cfg.objective = o;
            cfg.stepMerging = merged;
            const auto base = two_stage_schedule(inst);
            cfg.T = std::max(encoded_steps(inst, best.schedule, cfg), encoded_steps(inst, base, cfg));
            const auto res = solve_mbsp(build_full_ilp(inst, cfg), quick(), base);
            ASSERT_EQ(res.run.status, SolverStatus::Optimal) << res.run.message;
            ASSERT_TRUE(res.schedule);
            EXPECT_EQ(res.cost, best.cost);
            EXPECT_NEAR(res.run.objective, static_cast<double>(res.cost), 1e-6 * std::max<double>(1, res.cost));
        }
}

TEST(SolveExternal, RandomSuiteNeverWorseThanWarmStart) {
    if (!have_solver())
        GTEST_SKIP() << "no MILP solver configured";
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        const auto inst = random_instance(rng, 8);
        const auto base = two_stage_schedule(inst);
        IlpConfig cfg;
        cfg.objective = trial % 2 == 0 ? Objective::Sync : Objective::Async;
        cfg.stepMerging = trial % 3 != 0;
        cfg.T = choose_horizon(inst, base, cfg);
        SolverConfig sc = quick();
        sc.timeLimit = 10;
        const auto res = solve_mbsp(build_full_ilp(inst, cfg), sc, base);
        ASSERT_TRUE(res.schedule) << res.run.message;
        EXPECT_TRUE(validate_schedule(inst, *res.schedule).valid());
        EXPECT_LE(res.cost, schedule_cost(inst, base, cfg.objective));
        EXPECT_NEAR(res.run.objective, static_cast<double>(res.cost), 1e-6 * std::max<double>(1, res.cost));
    }
}
