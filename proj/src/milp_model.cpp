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

#include "mbsp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mbsp {

LinExpr &LinExpr::add(std::int32_t var, double coef) {
    if (var >= 0 && coef != 0.0)
        terms.push_back({var, coef});
    return *this;
}

LinExpr &LinExpr::addConstant(double c) {
    constant += c;
    return *this;
}

std::int32_t MilpModel::add(MilpVariable v) {
    if (index_.count(v.name))
        throw std::logic_error("duplicate MILP variable " + v.name);
    auto id = static_cast<std::int32_t>(vars_.size());
    index_.emplace(v.name, id);
    vars_.push_back(std::move(v));
    return id;
}

std::int32_t MilpModel::addBinary(const std::string &name) { return add({name, VarType::Binary, 0.0, 1.0}); }

std::int32_t MilpModel::addContinuous(const std::string &name, double lb, double ub) {
    return add({name, VarType::Continuous, lb, ub});
}

namespace {

std::vector<LinTerm> merged(std::vector<LinTerm> t) {
    std::sort(t.begin(), t.end(), [](const LinTerm &a, const LinTerm &b) { return a.var < b.var; });
    std::vector<LinTerm> out;
    for (const LinTerm &x : t) {
        if (!out.empty() && out.back().var == x.var)
            out.back().coef += x.coef;
        else
            out.push_back(x);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const LinTerm &x) { return x.coef == 0.0; }), out.end());
    return out;
}

} // namespace

void MilpModel::addConstraint(const LinExpr &lhs, Sense sense, const LinExpr &rhs) {
    std::vector<LinTerm> t = lhs.terms;
    for (const LinTerm &x : rhs.terms)
        t.push_back({x.var, -x.coef});
    for (const LinTerm &x : t)
        if (x.var < 0 || static_cast<std::size_t>(x.var) >= vars_.size())
            throw std::logic_error("constraint references undeclared variable");
    cons_.push_back({merged(std::move(t)), sense, rhs.constant - lhs.constant});
}

void MilpModel::addConstraint(const LinExpr &lhs, Sense sense, double rhs) {
    addConstraint(lhs, sense, LinExpr{{}, rhs});
}

void MilpModel::setObjective(const LinExpr &objective) {
    obj_ = merged(objective.terms);
    objConst_ = objective.constant;
}

std::int32_t MilpModel::find(const std::string &name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::size_t MilpModel::numBinaries() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const MilpVariable &v) { return v.type == VarType::Binary; }));
}

double MilpModel::objectiveValue(const Assignment &a) const {
    double s = objConst_;
    for (const LinTerm &t : obj_)
        s += t.coef * a.at(static_cast<std::size_t>(t.var));
    return s;
}

std::optional<std::string> check_assignment(const MilpModel &model, const Assignment &a,
                                            const AssignmentTolerance &tol) {
    const auto &vars = model.variables();
    if (a.size() != vars.size())
        return "assignment has " + std::to_string(a.size()) + " values for " + std::to_string(vars.size()) +
               " variables";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double x = a[i];
        if (!std::isfinite(x))
            return vars[i].name + " is not finite";
        if (x < vars[i].lb - tol.continuous || x > vars[i].ub + tol.continuous)
            return vars[i].name + " = " + std::to_string(x) + " outside its bounds";
        if (vars[i].type == VarType::Binary && std::abs(x - std::round(x)) > tol.integrality)
            return vars[i].name + " = " + std::to_string(x) + " is not integral";
    }
    const auto &cons = model.constraints();
    for (std::size_t c = 0; c < cons.size(); ++c) {
        double lhs = 0.0;
        double scale = 1.0;
        for (const LinTerm &t : cons[c].terms) {
            lhs += t.coef * a[static_cast<std::size_t>(t.var)];
            scale = std::max(scale, std::abs(t.coef));
        }
        // Big-M rows carry large coefficients; the residual tolerance scales with them.
        const double eps = tol.continuous * scale + tol.integrality * (scale > 1.0 ? scale : 0.0);
        const double diff = lhs - cons[c].rhs;
        bool bad = false;
        switch (cons[c].sense) {
        case Sense::Le:
            bad = diff > eps;
            break;
        case Sense::Ge:
            bad = diff < -eps;
            break;
        case Sense::Eq:
            bad = std::abs(diff) > eps;
            break;
        }
        if (bad) {
            std::ostringstream out;
            out << "constraint c" << c << " violated by " << diff;
            if (!cons[c].terms.empty())
                out << " (first term " << vars[static_cast<std::size_t>(cons[c].terms.front().var)].name << ")";
            return out.str();
        }
    }
    return std::nullopt;
}

} // namespace mbsp
