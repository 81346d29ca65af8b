#pragma once
// End-to-end pipeline: ingest -> reduce -> finance -> model -> solve ->
// verify -> artifacts. The CLI is a thin shell over these calls and the
// acceptance tests drive them directly.
//
// The per-MW data-center cost is the scenario objective minus the objective
// of the same system with every DC removed, divided by total DC load. The
// baseline shares the scenario's storage menu; the carbon policy is irrelevant
// without DCs because all matching rows hang off a DC.

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "retroplan/domain.hpp"
#include "retroplan/finance.hpp"
#include "retroplan/ingest.hpp"
#include "retroplan/milp.hpp"
#include "retroplan/model.hpp"
#include "retroplan/mps.hpp"
#include "retroplan/tsreduce.hpp"
#include "retroplan/verify.hpp"

namespace retroplan {

struct PreparedCase {
    SystemData data;  // retrofit costs annualized
    ReducedSeries reduced;
    ScenarioConfig config;
};

inline PreparedCase prepare_case(const SystemData& raw, ScenarioConfig config, int k_override,
                                 int seed) {
    if (k_override > 0) config.representative_weeks = k_override;
    validate_scenario(config);
    PreparedCase pc{apply_retrofit_costs(raw, config.interest_rate), ReducedSeries{}, config};
    pc.reduced = reduce(pc.data.series, default_feature_ids(pc.data), config.representative_weeks,
                        seed);
    return pc;
}

struct SolveOutcome {
    MilpStatus status = MilpStatus::limit;
    Solution solution;  // meaningful only when status == optimal
    int vars = 0, rows = 0, integers = 0;
    long nodes = 0, lp_iterations = 0;
};

inline Solution make_solution(const MilpModel& model, const MilpResult& r, const PreparedCase& pc) {
    Solution sol;
    sol.objective_usd_per_yr = r.objective;
    for (size_t j = 0; j < model.vars.size(); ++j) sol.values[model.vars[j].name] = r.x[j];
    for (size_t i = 0; i < model.rows.size() && i < r.duals.size(); ++i)
        sol.duals[model.rows[i].name] = r.duals[i];
    sol.breakdown = cost_breakdown(pc.data, pc.reduced, pc.config, sol);
    sol.annual_emissions_tco2 = carbon_account(pc.data, pc.reduced, sol);
    return sol;
}

inline SolveOutcome solve_case(const PreparedCase& pc, const MilpOptions& opt = {}) {
    MilpModel model = build_model(pc.data, pc.reduced, pc.config);
    SolveOutcome out;
    out.vars = static_cast<int>(model.vars.size());
    out.rows = static_cast<int>(model.rows.size());
    out.integers = model.num_integer_vars();
    MilpResult r = solve_milp(model, opt);
    out.status = r.status;
    out.nodes = r.nodes;
    out.lp_iterations = r.lp_iterations;
    if (r.status == MilpStatus::optimal) out.solution = make_solution(model, r, pc);
    return out;
}

// objective of the same system with the DC loads removed; nullopt when that
// run is not optimal
inline std::optional<double> no_dc_baseline_objective(const SystemData& raw,
                                                      const ScenarioConfig& config, int k_override,
                                                      int seed, const MilpOptions& opt = {}) {
    SystemData stripped = raw;
    stripped.dcs.clear();
    PreparedCase pc = prepare_case(stripped, config, k_override, seed);
    SolveOutcome out = solve_case(pc, opt);
    if (out.status != MilpStatus::optimal) return std::nullopt;
    return out.solution.objective_usd_per_yr;
}

struct PlanFlags {
    int k_override = 0;  // 0 keeps the scenario's representative_weeks
    int seed = 0;
    std::optional<SolverChoice> solver_override;
    bool compute_baseline = true;
    std::filesystem::path out_dir;  // empty: no artifacts written
    MilpOptions milp;
};

struct PlanResult {
    MilpStatus status = MilpStatus::limit;
    bool exported_only = false;  // mps_export mode stops before solving
    Solution solution;
    std::vector<Violation> violations;  // independent post-solve audit
    double cost_per_mw_dc = std::numeric_limits<double>::quiet_NaN();
    int vars = 0, rows = 0, integers = 0;
    long nodes = 0, lp_iterations = 0;
};

inline void write_manifest(const PlanResult& res, const ScenarioConfig& config, int k, int seed,
                           const std::filesystem::path& dir) {
    nlohmann::json j;
    j["k"] = k;
    j["seed"] = seed;
    j["vars"] = res.vars;
    j["rows"] = res.rows;
    j["integers"] = res.integers;
    j["status"] = res.exported_only          ? "exported"
                  : res.status == MilpStatus::optimal    ? "optimal"
                  : res.status == MilpStatus::infeasible ? "infeasible"
                  : res.status == MilpStatus::unbounded  ? "unbounded"
                                                         : "limit";
    j["storage_menu"] = nlohmann::json::array();
    if (config.has_lib()) j["storage_menu"].push_back("lib");
    if (config.has_tes()) j["storage_menu"].push_back("tes");
    j["carbon_policy"] = to_string(config.carbon_policy);
    j["flexibility_fraction"] = config.flexibility_fraction;
    if (res.status == MilpStatus::optimal && !res.exported_only) {
        j["objective_usd_per_yr"] = res.solution.objective_usd_per_yr;
        j["violations"] = res.violations.size();
        if (std::isfinite(res.cost_per_mw_dc)) j["cost_per_mw_dc_usd"] = res.cost_per_mw_dc;
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << j.dump(2) << '\n';
}

inline PlanResult run_plan(const SystemData& raw, ScenarioConfig config, const PlanFlags& flags) {
    if (flags.solver_override) config.solver = *flags.solver_override;
    PreparedCase pc = prepare_case(raw, config, flags.k_override, flags.seed);
    int k = pc.config.representative_weeks;

    PlanResult res;
    if (pc.config.solver == SolverChoice::mps_export) {
        MilpModel model = build_model(pc.data, pc.reduced, pc.config);
        res.vars = static_cast<int>(model.vars.size());
        res.rows = static_cast<int>(model.rows.size());
        res.integers = model.num_integer_vars();
        res.exported_only = true;
        res.status = MilpStatus::limit;
        if (!flags.out_dir.empty()) {
            std::filesystem::create_directories(flags.out_dir);
            write_mps(model, (flags.out_dir / "model.mps").string(),
                      (flags.out_dir / "names.map").string());
            write_manifest(res, pc.config, k, flags.seed, flags.out_dir);
        }
        return res;
    }

    SolveOutcome out = solve_case(pc, flags.milp);
    res.status = out.status;
    res.vars = out.vars;
    res.rows = out.rows;
    res.integers = out.integers;
    res.nodes = out.nodes;
    res.lp_iterations = out.lp_iterations;
    if (out.status != MilpStatus::optimal) {
        if (!flags.out_dir.empty()) {
            std::filesystem::create_directories(flags.out_dir);
            write_manifest(res, pc.config, k, flags.seed, flags.out_dir);
        }
        return res;
    }
    res.solution = std::move(out.solution);
    res.violations = check_feasibility(pc.data, pc.reduced, pc.config, res.solution);

    double dc_mw = 0;
    for (const auto& dc : raw.dcs) dc_mw += dc.load_mw;
    if (flags.compute_baseline && dc_mw > 0) {
        auto base = no_dc_baseline_objective(raw, pc.config, flags.k_override, flags.seed,
                                             flags.milp);
        if (base) res.cost_per_mw_dc = (res.solution.objective_usd_per_yr - *base) / dc_mw;
    }

    if (!flags.out_dir.empty()) {
        std::filesystem::create_directories(flags.out_dir);
        write_solution(res.solution, flags.out_dir);
        write_manifest(res, pc.config, k, flags.seed, flags.out_dir);
    }
    return res;
}

// ---- scenario sweep ----

struct SweepRow {
    std::string scenario_id;
    std::string storage_menu;  // none|lib|tes|lib+tes
    CarbonPolicy policy = CarbonPolicy::unconstrained;
    double flex = 0;
    std::string status;  // optimal|infeasible|limit|error
    double objective = std::numeric_limits<double>::quiet_NaN();
    double cost_per_mw_dc = std::numeric_limits<double>::quiet_NaN();
    double tco2 = std::numeric_limits<double>::quiet_NaN();
    double reduction_pct = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<SweepRow> run_sweep(const SystemData& raw, ScenarioConfig base, int k_override,
                                       int seed, const std::filesystem::path& out_root,
                                       const MilpOptions& opt = {}) {
    const std::vector<std::pair<std::string, std::set<StorageKind>>> menus = {
        {"none", {}},
        {"lib", {StorageKind::lib}},
        {"tes", {StorageKind::tes}},
        {"lib+tes", {StorageKind::lib, StorageKind::tes}}};
    const std::vector<CarbonPolicy> policies = {CarbonPolicy::zero_carbon_hourly,
                                                CarbonPolicy::unconstrained};
    const std::vector<double> flexes = {0.0, 0.2};

    double dc_mw = 0;
    for (const auto& dc : raw.dcs) dc_mw += dc.load_mw;

    // one no-DC baseline per menu; policy and flexibility are no-ops without DCs
    std::map<std::string, std::optional<double>> baseline;
    for (const auto& [mname, menu] : menus) {
        ScenarioConfig c = base;
        c.storage_menu = menu;
        c.carbon_policy = CarbonPolicy::unconstrained;
        c.flexibility_fraction = 0;
        baseline[mname] = dc_mw > 0
                              ? no_dc_baseline_objective(raw, c, k_override, seed, opt)
                              : std::nullopt;
    }

    std::vector<SweepRow> rows;
    for (const auto& [mname, menu] : menus)
        for (CarbonPolicy policy : policies)
            for (double flex : flexes) {
                SweepRow row;
                row.storage_menu = mname;
                row.policy = policy;
                row.flex = flex;
                row.scenario_id = mname + "-" +
                                  (policy == CarbonPolicy::zero_carbon_hourly ? "zc" : "uc") +
                                  "-flex" + csv::format_sig10(flex);
                ScenarioConfig c = base;
                c.storage_menu = menu;
                c.carbon_policy = policy;
                c.flexibility_fraction = flex;
                c.solver = SolverChoice::builtin;
                try {
                    PlanFlags flags;
                    flags.k_override = k_override;
                    flags.seed = seed;
                    flags.compute_baseline = false;
                    flags.milp = opt;
                    if (!out_root.empty()) flags.out_dir = out_root / row.scenario_id;
                    PlanResult r = run_plan(raw, c, flags);
                    if (r.status == MilpStatus::optimal) {
                        row.status = r.violations.empty() ? "optimal" : "verification_failed";
                        row.objective = r.solution.objective_usd_per_yr;
                        row.tco2 = r.solution.annual_emissions_tco2;
                        if (baseline[mname] && dc_mw > 0)
                            row.cost_per_mw_dc = (row.objective - *baseline[mname]) / dc_mw;
                    } else {
                        row.status = r.status == MilpStatus::infeasible ? "infeasible"
                                     : r.status == MilpStatus::unbounded ? "unbounded"
                                                                         : "limit";
                    }
                    if (!out_root.empty() && r.status == MilpStatus::optimal)
                        save_scenario(c, out_root / row.scenario_id / "scenario.json");
                } catch (const Error&) {
                    row.status = "error";
                }
                rows.push_back(std::move(row));
            }

    // carbon reduction of each ZC cell against the UC cell with the same menu
    // and flexibility
    for (auto& row : rows) {
        if (row.policy != CarbonPolicy::zero_carbon_hourly || row.status != "optimal") continue;
        for (const auto& uc : rows) {
            if (uc.policy != CarbonPolicy::unconstrained || uc.storage_menu != row.storage_menu ||
                uc.flex != row.flex || uc.status != "optimal")
                continue;
            if (uc.tco2 > 0) row.reduction_pct = 100.0 * (uc.tco2 - row.tco2) / uc.tco2;
        }
    }
    for (auto& row : rows)
        if (row.policy == CarbonPolicy::unconstrained && row.status == "optimal")
            row.reduction_pct = 0;

    if (!out_root.empty()) {
        std::filesystem::create_directories(out_root);
        csv::Writer w(out_root / "summary.csv");
        w.row({"scenario_id", "storage_menu", "policy", "flex", "objective_usd",
               "cost_per_mw_dc_usd", "tco2", "reduction_pct", "status"});
        auto cell = [](double v) { return std::isfinite(v) ? csv::format_sig10(v) : std::string(); };
        for (const auto& row : rows)
            w.row({row.scenario_id, row.storage_menu, to_string(row.policy),
                   csv::format_sig10(row.flex), cell(row.objective), cell(row.cost_per_mw_dc),
                   cell(row.tco2), cell(row.reduction_pct), row.status});
        w.close();
    }
    return rows;
}

}  // namespace retroplan
