// Command line front end: plan, sweep, reduce-ts, verify.
// Exit codes for plan: 0 ok, 2 bad input, 3 no optimal solution, 4 solved but
// the independent verifier found violations. verify exits 1 on violations.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "retroplan/retroplan.hpp"

namespace fs = std::filesystem;
using namespace retroplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitNoSolution = 3;
constexpr int kExitVerification = 4;

bool is_input_error(const Error& e) {
    return dynamic_cast<const MissingFile*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
           dynamic_cast<const DanglingReference*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
           dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DomainError*>(&e);
}

void print_breakdown(const CostBreakdown& b) {
    auto line = [](const char* label, double v) {
        std::printf("  %-22s %18.2f\n", label, v);
    };
    std::printf("cost breakdown [$/yr]\n");
    line("thermal capacity", b.thermal_capacity);
    line("renewable capacity", b.renewable_capacity);
    line("lib capacity", b.lib_capacity);
    line("tes capacity", b.tes_capacity);
    line("thermal variable", b.thermal_variable);
    line("tes variable", b.tes_variable);
    line("load shedding", b.load_shedding);
    line("total", b.total());
}

void print_capacity_changes(const SystemData& data, const Solution& sol) {
    std::printf("capacity decisions\n");
    for (const auto& p : data.plants) {
        double retire = sol.value_or(keys::cap("retire", p.id), 0);
        double retro = sol.value_or(keys::cap("retrofit", p.id), 0);
        double build = sol.value_or(keys::cap("gas_build", p.id), 0);
        if (retire > 1e-9 || retro > 1e-9 || build > 1e-9)
            std::printf("  %-16s retire %.0f  retrofit %.0f  build %.0f (units of %.0f MW)\n",
                        p.id.c_str(), retire, retro, build, p.unit_size_mw);
    }
    for (const auto& r : data.renewables) {
        double inv = sol.value_or(keys::cap("ren_invest", r.id), 0);
        if (inv > 1e-6) std::printf("  %-16s invest %.1f MW\n", r.id.c_str(), inv);
    }
    for (const auto& s : data.libs) {
        double power = sol.value_or(keys::cap("lib_power", s.id), 0);
        if (power > 1e-6)
            std::printf("  %-16s power %.1f MW, energy %.1f MWh\n", s.id.c_str(), power,
                        sol.value_or(keys::cap("lib_energy", s.id), 0));
    }
    for (const auto& s : data.tes_units) {
        double dis = sol.value_or(keys::cap("tes_dis_cap", s.id), 0);
        if (dis > 1e-6)
            std::printf("  %-16s discharge %.1f MW, charge %.1f MW, energy %.1f MWh_th\n",
                        s.id.c_str(), dis, sol.value_or(keys::cap("tes_charge_cap", s.id), 0),
                        sol.value_or(keys::cap("tes_energy", s.id), 0));
    }
}

struct PlanArgs {
    std::string data, scenario, out, solver;
    int k = 0, seed = 0;
    bool skip_baseline = false;
};

int cmd_plan(const PlanArgs& a) {
    SystemData data;
    ScenarioConfig config;
    try {
        data = load_system(a.data);
        config = load_scenario(a.scenario);
        if (a.solver == "builtin") config.solver = SolverChoice::builtin;
        else if (a.solver == "mps-export") config.solver = SolverChoice::mps_export;
        else if (!a.solver.empty()) throw ConfigError("unknown solver '" + a.solver + "'");
    } catch (const Error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    }

    PlanFlags flags;
    flags.k_override = a.k;
    flags.seed = a.seed;
    flags.compute_baseline = !a.skip_baseline;
    flags.out_dir = a.out;

    PlanResult res;
    try {
        res = run_plan(data, config, flags);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s error: %s\n", is_input_error(e) ? "input" : "solver", e.what());
        return is_input_error(e) ? kExitInput : kExitInternal;
    }

    std::printf("model: %d vars (%d integer), %d rows\n", res.vars, res.integers, res.rows);
    if (res.exported_only) {
        std::printf("wrote %s and %s (no solve)\n", (fs::path(a.out) / "model.mps").c_str(),
                    (fs::path(a.out) / "names.map").c_str());
        return kExitOk;
    }
    if (res.status != MilpStatus::optimal) {
        std::fprintf(stderr, "no optimal solution: %s\n",
                     res.status == MilpStatus::infeasible ? "infeasible"
                     : res.status == MilpStatus::unbounded ? "unbounded"
                                                           : "node/iteration limit");
        return kExitNoSolution;
    }

    std::printf("objective: %.2f $/yr   (%ld nodes, %ld LP iterations)\n",
                res.solution.objective_usd_per_yr, res.nodes, res.lp_iterations);
    print_breakdown(res.solution.breakdown);
    print_capacity_changes(data, res.solution);
    std::printf("annual emissions: %.1f tCO2\n", res.solution.annual_emissions_tco2);
    if (std::isfinite(res.cost_per_mw_dc))
        std::printf("cost per MW of DC load: %.2f $/MW-yr\n", res.cost_per_mw_dc);

    if (!res.violations.empty()) {
        std::fprintf(stderr, "verification failed: %zu violations\n", res.violations.size());
        for (size_t i = 0; i < res.violations.size() && i < 20; ++i)
            std::fprintf(stderr, "  [%s] %s: %s\n", res.violations[i].code.c_str(),
                         res.violations[i].subject.c_str(), res.violations[i].message.c_str());
        return kExitVerification;
    }
    std::printf("verification: clean\n");
    return kExitOk;
}

int cmd_sweep(const std::string& data_dir, const std::string& out_dir,
              const std::string& scenario_path, int k, int seed) {
    SystemData data;
    ScenarioConfig base;
    try {
        data = load_system(data_dir);
        if (!scenario_path.empty()) base = load_scenario(scenario_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    }
    try {
        auto rows = run_sweep(data, base, k, seed, out_dir);
        for (const auto& r : rows)
            std::printf("%-18s %-12s %s\n", r.scenario_id.c_str(), r.status.c_str(),
                        std::isfinite(r.objective) ? csv::format_sig10(r.objective).c_str() : "-");
        std::printf("summary: %s\n", (fs::path(out_dir) / "summary.csv").c_str());
        return kExitOk;
    } catch (const Error& e) {
        std::fprintf(stderr, "sweep error: %s\n", e.what());
        return is_input_error(e) ? kExitInput : kExitInternal;
    }
}

int cmd_reduce(const std::string& data_dir, const std::string& out_dir, int k, int seed) {
    try {
        SystemData data = load_system(data_dir);
        ReducedSeries red = reduce(data.series, default_feature_ids(data), k, seed);
        fs::create_directories(out_dir);
        csv::Writer w(fs::path(out_dir) / "rep_weeks.csv");
        w.row({"week_index", "cluster", "weight"});
        std::vector<int> cluster_of(kWeeksPerYear, -1);
        for (size_t p = 0; p < red.periods.size(); ++p)
            for (int wk : red.periods[p].member_weeks) cluster_of[wk] = static_cast<int>(p);
        for (int wk = 0; wk < kWeeksPerYear; ++wk)
            w.row({std::to_string(wk), std::to_string(cluster_of[wk]),
                   csv::format_sig10(red.weight(cluster_of[wk]))});
        w.close();
        for (size_t p = 0; p < red.periods.size(); ++p)
            std::printf("cluster %zu: medoid week %d, %zu weeks, weight %s\n", p,
                        red.periods[p].medoid_week, red.periods[p].member_weeks.size(),
                        csv::format_sig10(red.weight(static_cast<int>(p))).c_str());
        return kExitOk;
    } catch (const Error& e) {
        std::fprintf(stderr, "reduce error: %s\n", e.what());
        return is_input_error(e) ? kExitInput : kExitInternal;
    }
}

int cmd_verify(const std::string& data_dir, const std::string& scenario_path,
               const std::string& results_dir, int k, int seed) {
    try {
        SystemData data = load_system(data_dir);
        ScenarioConfig config = load_scenario(scenario_path);
        // the run manifest pins k and seed unless overridden
        fs::path manifest = fs::path(results_dir) / "manifest.json";
        if (fs::exists(manifest)) {
            std::ifstream in(manifest);
            nlohmann::json j;
            in >> j;
            if (k == 0 && j.contains("k")) k = j["k"].get<int>();
            if (j.contains("seed")) seed = j["seed"].get<int>();
        }
        Solution sol = read_solution(results_dir);
        PreparedCase pc = prepare_case(data, config, k, seed);
        auto violations = check_feasibility(pc.data, pc.reduced, pc.config, sol);
        CostBreakdown b = cost_breakdown(pc.data, pc.reduced, pc.config, sol);
        double drift = std::abs(b.total() - sol.objective_usd_per_yr);
        if (drift > 1e-6 * (1 + std::abs(sol.objective_usd_per_yr)))
            violations.push_back({"objective_mismatch", "costs.json",
                                  "recomputed " + std::to_string(b.total()) + " vs reported " +
                                      std::to_string(sol.objective_usd_per_yr)});
        if (violations.empty()) {
            std::printf("verification: clean (%d dispatch hours at k=%d)\n",
                        pc.reduced.total_hours(), pc.config.representative_weeks);
            return kExitOk;
        }
        std::fprintf(stderr, "verification failed: %zu violations\n", violations.size());
        for (size_t i = 0; i < violations.size() && i < 50; ++i)
            std::fprintf(stderr, "  [%s] %s: %s\n", violations[i].code.c_str(),
                         violations[i].subject.c_str(), violations[i].message.c_str());
        return kExitInternal;
    } catch (const Error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity planning with coal-to-storage retrofits"};
    app.require_subcommand(1);

    PlanArgs plan;
    auto* p = app.add_subcommand("plan", "solve one scenario end to end");
    p->add_option("--data", plan.data, "system data directory")->required();
    p->add_option("--scenario", plan.scenario, "scenario.json path")->required();
    p->add_option("--out", plan.out, "results directory")->required();
    p->add_option("--k", plan.k, "override representative week count");
    p->add_option("--seed", plan.seed, "clustering seed");
    p->add_option("--solver", plan.solver, "builtin|mps-export");
    p->add_flag("--skip-baseline", plan.skip_baseline, "skip the no-DC baseline solve");

    std::string s_data, s_out, s_scenario;
    int s_k = 0, s_seed = 0;
    auto* s = app.add_subcommand("sweep", "run the 16-cell scenario matrix");
    s->add_option("--data", s_data, "system data directory")->required();
    s->add_option("--out", s_out, "output directory")->required();
    s->add_option("--scenario", s_scenario, "base scenario.json (defaults used when absent)");
    s->add_option("--k", s_k, "override representative week count");
    s->add_option("--seed", s_seed, "clustering seed");

    std::string r_data, r_out = ".";
    int r_k = 0, r_seed = 0;
    auto* r = app.add_subcommand("reduce-ts", "cluster the year into representative weeks");
    r->add_option("--data", r_data, "system data directory")->required();
    r->add_option("--k", r_k, "number of representative weeks")->required();
    r->add_option("--seed", r_seed, "clustering seed")->required();
    r->add_option("--out", r_out, "output directory for rep_weeks.csv");

    std::string v_data, v_scenario, v_results;
    int v_k = 0, v_seed = 0;
    auto* v = app.add_subcommand("verify", "re-check a results directory independently");
    v->add_option("--data", v_data, "system data directory")->required();
    v->add_option("--scenario", v_scenario, "scenario.json path")->required();
    v->add_option("--results", v_results, "results directory to audit")->required();
    v->add_option("--k", v_k, "override representative week count");
    v->add_option("--seed", v_seed, "clustering seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (p->parsed()) return cmd_plan(plan);
        if (s->parsed()) return cmd_sweep(s_data, s_out, s_scenario, s_k, s_seed);
        if (r->parsed()) return cmd_reduce(r_data, r_out, r_k, r_seed);
        if (v->parsed()) return cmd_verify(v_data, v_scenario, v_results, v_k, v_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fatal: %s\n", e.what());
        return kExitInternal;
    }
    return kExitInternal;
}
