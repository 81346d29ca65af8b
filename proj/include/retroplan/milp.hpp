#pragma once
// Best-first branch and bound over the LP relaxation. Nodes carry cumulative
// bound overrides for the integer columns; each node is solved cold, which is
// fine at the unit-count scale this model produces (a handful of retire,
// retrofit and build counters). A rounding heuristic at the root seeds the
// incumbent so pruning starts early. After the search the integers are fixed
// at the incumbent and one more LP polishes the continuous part, so the
// returned point is an optimal completion of the integer assignment and the
// duals belong to that fixed-integer LP.

#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "retroplan/model.hpp"
#include "retroplan/simplex.hpp"

namespace retroplan {

enum class MilpStatus { optimal, infeasible, unbounded, limit };

struct MilpOptions {
    LpOptions lp;
    double int_tol = 1e-6;
    double gap_tol = 1e-6;
    long max_nodes = 100000;
};

struct MilpResult {
    MilpStatus status = MilpStatus::limit;
    double objective = 0;
    std::vector<double> x;
    std::vector<double> duals;  // from the LP with integers fixed at the incumbent
    long nodes = 0;
    long lp_iterations = 0;
};

namespace detail {

struct BbNode {
    double bound;
    std::vector<std::pair<int, std::pair<double, double>>> fixes;  // col -> (lo, up)
    bool operator>(const BbNode& o) const { return bound > o.bound; }
};

inline LpResult solve_with_fixes(MilpModel model, const BbNode& node, const LpOptions& opt) {
    for (const auto& [col, lu] : node.fixes) {
        model.vars[col].lower = std::max(model.vars[col].lower, lu.first);
        model.vars[col].upper = std::min(model.vars[col].upper, lu.second);
    }
    return solve_lp(model, opt);
}

}  // namespace detail

inline MilpResult solve_milp(const MilpModel& model, const MilpOptions& opt = {}) {
    std::vector<int> int_cols;
    for (int j = 0; j < static_cast<int>(model.vars.size()); ++j)
        if (model.vars[j].kind == VarKind::integer) int_cols.push_back(j);

    MilpResult res;
    auto lp_to_milp = [](LpStatus s) {
        switch (s) {
            case LpStatus::optimal: return MilpStatus::optimal;
            case LpStatus::infeasible: return MilpStatus::infeasible;
            case LpStatus::unbounded: return MilpStatus::unbounded;
            default: return MilpStatus::limit;
        }
    };

    LpResult root = solve_lp(model, opt.lp);
    res.nodes = 1;
    res.lp_iterations = root.iterations;
    if (root.status != LpStatus::optimal) {
        res.status = lp_to_milp(root.status);
        return res;
    }

    auto fractional = [&](const std::vector<double>& x) {
        int col = -1;
        double best = opt.int_tol;
        for (int j : int_cols) {
            double f = x[j] - std::floor(x[j]);
            double dist = std::min(f, 1.0 - f);
            if (dist > best) {
                best = dist;
                col = j;
            }
        }
        return col;
    };

    if (int_cols.empty() || fractional(root.x) < 0) {
        res.status = MilpStatus::optimal;
        res.objective = root.objective;
        res.x = std::move(root.x);
        res.duals = std::move(root.duals);
        return res;
    }

    double incumbent = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;

    // root rounding heuristic: fix every integer to the nearest unit and polish
    {
        detail::BbNode h{root.objective, {}};
        for (int j : int_cols) {
            double v = std::clamp(std::round(root.x[j]), model.vars[j].lower, model.vars[j].upper);
            h.fixes.push_back({j, {v, v}});
        }
        LpResult hr = detail::solve_with_fixes(model, h, opt.lp);
        ++res.nodes;
        res.lp_iterations += hr.iterations;
        if (hr.status == LpStatus::optimal) {
            incumbent = hr.objective;
            best_x = std::move(hr.x);
        }
    }

    std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, std::greater<detail::BbNode>> open;
    open.push({root.objective, {}});
    double best_bound = root.objective;

    auto gap_ok = [&] {
        return std::isfinite(incumbent) &&
               (incumbent - best_bound) <= opt.gap_tol * std::max(1.0, std::abs(incumbent));
    };

    bool limit_hit = false;
    while (!open.empty()) {
        detail::BbNode node = open.top();
        open.pop();
        best_bound = node.bound;
        if (gap_ok()) break;
        if (node.bound >= incumbent - opt.gap_tol * std::max(1.0, std::abs(incumbent))) break;
        if (res.nodes >= opt.max_nodes) {
            limit_hit = true;
            break;
        }

        LpResult lp = detail::solve_with_fixes(model, node, opt.lp);
        ++res.nodes;
        res.lp_iterations += lp.iterations;
        if (lp.status == LpStatus::iteration_limit) {
            limit_hit = true;
            break;
        }
        if (lp.status != LpStatus::optimal) continue;  // infeasible subtree
        if (lp.objective >= incumbent - opt.gap_tol * std::max(1.0, std::abs(incumbent))) continue;

        int col = fractional(lp.x);
        if (col < 0) {
            incumbent = lp.objective;
            best_x = std::move(lp.x);
            continue;
        }
        double v = lp.x[col];
        detail::BbNode down{lp.objective, node.fixes};
        down.fixes.push_back({col, {-kInf, std::floor(v)}});
        detail::BbNode up{lp.objective, std::move(node.fixes)};
        up.fixes.push_back({col, {std::ceil(v), kInf}});
        open.push(std::move(down));
        open.push(std::move(up));
    }

    if (!std::isfinite(incumbent)) {
        res.status = limit_hit ? MilpStatus::limit : MilpStatus::infeasible;
        return res;
    }

    // polish: fix integers at the incumbent and re-solve for clean continuous
    // values and duals
    detail::BbNode fixed{incumbent, {}};
    for (int j : int_cols) {
        double v = std::round(best_x[j]);
        fixed.fixes.push_back({j, {v, v}});
    }
    LpResult final_lp = detail::solve_with_fixes(model, fixed, opt.lp);
    ++res.nodes;
    res.lp_iterations += final_lp.iterations;
    if (final_lp.status != LpStatus::optimal) throw NumericalBreakdown("incumbent polish failed");
    for (int j : int_cols) final_lp.x[j] = std::round(final_lp.x[j]);

    res.status = limit_hit ? MilpStatus::limit : MilpStatus::optimal;
    res.objective = final_lp.objective;
    res.x = std::move(final_lp.x);
    res.duals = std::move(final_lp.duals);
    return res;
}

}  // namespace retroplan
