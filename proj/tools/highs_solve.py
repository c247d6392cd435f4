#!/usr/bin/env python3
# Copyright 2026 The mbsp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Solve an LP-format MILP with HiGHS and write `name value` pairs.

usage: highs_solve.py MODEL.lp SOLUTION.txt TIME_LIMIT WARMSTART|-

The solution file starts with `# status <word>` and, when a solution exists,
`# objective <value>`; status is one of optimal, feasible, infeasible,
timeout, error. Exit code 0 whenever the solution file was written.
"""

import sys

import highspy


def read_pairs(path):
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, value = line.split()
            values[name] = float(value)
    return values


def main(argv):
    if len(argv) != 5:
        sys.stderr.write(__doc__)
        return 2
    lp_path, sol_path, time_limit, warm_path = argv[1:]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", float(time_limit))
    # Integer data: an absolute gap below 1 still proves optimality, but stay exact.
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-6)
    if h.readModel(lp_path) == highspy.HighsStatus.kError:
        sys.stderr.write("highs: cannot read %s\n" % lp_path)
        return 1
    lp = h.getLp()
    names = list(lp.col_names_)
    if warm_path != "-":
        warm = read_pairs(warm_path)
        sol = highspy.HighsSolution()
        sol.col_value = [warm.get(n, 0.0) for n in names]
        sol.value_valid = True
        h.setSolution(sol)
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    has_solution = info.primal_solution_status == 2  # kSolutionStatusFeasible
    S = highspy.HighsModelStatus
    if status == S.kOptimal:
        word = "optimal"
    elif status in (S.kInfeasible, S.kUnboundedOrInfeasible):
        word = "infeasible"
    elif status in (S.kTimeLimit, S.kInterrupt, S.kIterationLimit, S.kSolutionLimit):
        word = "feasible" if has_solution else "timeout"
    else:
        word = "error"
    with open(sol_path, "w") as out:
        out.write("# status %s\n" % word)
        if has_solution and word != "infeasible":
            out.write("# objective %.17g\n" % info.objective_function_value)
            for name, value in zip(names, h.getSolution().col_value):
                out.write("%s %.17g\n" % (name, value))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
