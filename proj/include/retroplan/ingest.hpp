#pragma once
// File formats. A system lives in a directory:
//   zones.csv, plants.csv, renewables.csv, storage.csv, dcs.csv,
//   series/<id>.csv (single `value` column, 8760 rows), scenario.json
// storage.csv mixes battery and retrofit rows behind a `kind` column; cells
// that do not apply to a row's kind must stay empty and required ones must be
// filled, so a row cannot silently carry a value the loader ignores.
// scenario.json is a flat object with exactly the ScenarioConfig fields --
// unknown or missing keys are configuration errors, catching typos before a
// long solve.
//
// Solved results are written as capacities.csv (variable,value), dispatch.csv
// (hour,variable,value ordered by variable then hour), costs.json and
// emissions.json, all with 10-significant-digit numerics.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retroplan/csv.hpp"
#include "retroplan/domain.hpp"
#include "retroplan/errors.hpp"

namespace retroplan {

namespace detail {

inline std::optional<double> optional_double(const csv::Table& t, size_t row,
                                             const std::string& column) {
    if (csv::cell_empty(t.rows[row][t.col(column)])) return std::nullopt;
    return csv::parse_double(t, row, column);
}

inline void require_empty(const csv::Table& t, size_t row, const std::string& column,
                          const std::string& kind) {
    if (!csv::cell_empty(t.rows[row][t.col(column)]))
        throw schema_error(t.path, static_cast<long>(row + 2), column,
                           "must be empty for kind=" + kind);
}

inline std::string fmt(double v) { return csv::format_sig10(v); }

}  // namespace detail

inline SystemData load_system(const std::filesystem::path& dir) {
    SystemData data;

    {
        auto t = csv::read_table(dir / "zones.csv");
        csv::require_columns(t, {"id", "kind", "demand_series"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            Zone z;
            z.id = csv::parse_string(t, i, "id");
            const std::string& kind = csv::parse_string(t, i, "kind");
            if (kind == "main_system") z.kind = ZoneKind::main_system;
            else if (kind == "dc_colocation") z.kind = ZoneKind::dc_colocation;
            else throw schema_error(t.path, static_cast<long>(i + 2), "kind",
                                    "expected main_system|dc_colocation, got '" + kind + "'");
            z.demand_series_ref = csv::parse_string(t, i, "demand_series");
            data.zones.push_back(std::move(z));
        }
    }
    {
        auto t = csv::read_table(dir / "plants.csv");
        csv::require_columns(
            t, {"id", "zone", "fuel", "unit_size_mw", "existing_units", "min_stable_fraction",
                "ramp_up_fraction", "ramp_down_fraction", "heat_rate_mmbtu_per_mwh",
                "fuel_cost_per_mmbtu", "vom_per_mwh", "inv_cost_annualized_per_mw", "fom_per_mw",
                "co2_per_mmbtu", "remaining_life_yr", "retrofittable"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            ThermalPlant p;
            p.id = csv::parse_string(t, i, "id");
            p.zone = csv::parse_string(t, i, "zone");
            const std::string& fuel = csv::parse_string(t, i, "fuel");
            if (fuel == "coal") p.fuel = Fuel::coal;
            else if (fuel == "gas") p.fuel = Fuel::gas;
            else throw schema_error(t.path, static_cast<long>(i + 2), "fuel",
                                    "expected coal|gas, got '" + fuel + "'");
            p.unit_size_mw = csv::parse_double(t, i, "unit_size_mw");
            p.existing_units = static_cast<int>(csv::parse_int(t, i, "existing_units"));
            p.min_stable_fraction = csv::parse_double(t, i, "min_stable_fraction");
            p.ramp_up_fraction = csv::parse_double(t, i, "ramp_up_fraction");
            p.ramp_down_fraction = csv::parse_double(t, i, "ramp_down_fraction");
            p.heat_rate_mmbtu_per_mwh = csv::parse_double(t, i, "heat_rate_mmbtu_per_mwh");
            p.fuel_cost_per_mmbtu = csv::parse_double(t, i, "fuel_cost_per_mmbtu");
            p.vom_per_mwh = csv::parse_double(t, i, "vom_per_mwh");
            p.inv_cost_annualized_per_mw = detail::optional_double(t, i, "inv_cost_annualized_per_mw");
            p.fom_per_mw = csv::parse_double(t, i, "fom_per_mw");
            p.co2_per_mmbtu = csv::parse_double(t, i, "co2_per_mmbtu");
            p.remaining_life_yr = static_cast<int>(csv::parse_int(t, i, "remaining_life_yr"));
            p.retrofittable = csv::parse_bool(t, i, "retrofittable");
            data.plants.push_back(std::move(p));
        }
    }
    {
        auto t = csv::read_table(dir / "renewables.csv");
        csv::require_columns(t, {"id", "zone", "tech", "capacity_factor_series",
                                 "inv_cost_annualized_per_mw", "fom_per_mw", "existing_mw",
                                 "max_buildable_mw"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            RenewableResource r;
            r.id = csv::parse_string(t, i, "id");
            r.zone = csv::parse_string(t, i, "zone");
            const std::string& tech = csv::parse_string(t, i, "tech");
            if (tech == "solar") r.tech = RenewableTech::solar;
            else if (tech == "wind") r.tech = RenewableTech::wind;
            else throw schema_error(t.path, static_cast<long>(i + 2), "tech",
                                    "expected solar|wind, got '" + tech + "'");
            r.capacity_factor_series_ref = csv::parse_string(t, i, "capacity_factor_series");
            r.inv_cost_annualized_per_mw = csv::parse_double(t, i, "inv_cost_annualized_per_mw");
            r.fom_per_mw = csv::parse_double(t, i, "fom_per_mw");
            r.existing_mw = csv::parse_double(t, i, "existing_mw");
            r.max_buildable_mw = csv::parse_double(t, i, "max_buildable_mw");
            data.renewables.push_back(std::move(r));
        }
    }
    {
        auto t = csv::read_table(dir / "storage.csv");
        csv::require_columns(
            t, {"id", "kind", "zone", "source_plant", "inv_power_per_mw", "inv_energy_per_mwh",
                "fom_per_mw", "duration_h", "charge_efficiency", "discharge_efficiency",
                "existing_power_mw", "overnight_energy_per_kwhth", "overnight_charge_per_kw",
                "overnight_retrofit_per_kw", "self_discharge_per_h", "d_min_h", "d_max_h",
                "vom_discharge_per_mwh"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            const std::string& kind = csv::parse_string(t, i, "kind");
            if (kind == "lib") {
                for (const char* col : {"source_plant", "overnight_energy_per_kwhth",
                                        "overnight_charge_per_kw", "overnight_retrofit_per_kw",
                                        "self_discharge_per_h", "d_min_h", "d_max_h",
                                        "vom_discharge_per_mwh"})
                    detail::require_empty(t, i, col, kind);
                LibSpec s;
                s.id = csv::parse_string(t, i, "id");
                s.zone = csv::parse_string(t, i, "zone");
                s.inv_power_per_mw = csv::parse_double(t, i, "inv_power_per_mw");
                s.inv_energy_per_mwh = csv::parse_double(t, i, "inv_energy_per_mwh");
                s.fom_per_mw = csv::parse_double(t, i, "fom_per_mw");
                s.duration_h = csv::parse_double(t, i, "duration_h");
                s.charge_efficiency = csv::parse_double(t, i, "charge_efficiency");
                s.discharge_efficiency = csv::parse_double(t, i, "discharge_efficiency");
                s.existing_power_mw = csv::parse_double(t, i, "existing_power_mw");
                data.libs.push_back(std::move(s));
            } else if (kind == "tes") {
                for (const char* col : {"zone", "inv_power_per_mw", "inv_energy_per_mwh",
                                        "duration_h", "existing_power_mw"})
                    detail::require_empty(t, i, col, kind);
                TesSpec s;
                s.id = csv::parse_string(t, i, "id");
                s.source_plant = csv::parse_string(t, i, "source_plant");
                s.overnight_energy_per_kwhth = csv::parse_double(t, i, "overnight_energy_per_kwhth");
                s.overnight_charge_per_kw = csv::parse_double(t, i, "overnight_charge_per_kw");
                s.overnight_retrofit_per_kw = csv::parse_double(t, i, "overnight_retrofit_per_kw");
                s.fom_per_mw = csv::parse_double(t, i, "fom_per_mw");
                s.charge_efficiency = csv::parse_double(t, i, "charge_efficiency");
                s.discharge_efficiency = csv::parse_double(t, i, "discharge_efficiency");
                s.self_discharge_per_h = csv::parse_double(t, i, "self_discharge_per_h");
                s.d_min_h = csv::parse_double(t, i, "d_min_h");
                s.d_max_h = csv::parse_double(t, i, "d_max_h");
                s.vom_discharge_per_mwh = csv::parse_double(t, i, "vom_discharge_per_mwh");
                data.tes_units.push_back(std::move(s));
            } else {
                throw schema_error(t.path, static_cast<long>(i + 2), "kind",
                                   "expected lib|tes, got '" + kind + "'");
            }
        }
    }
    {
        auto t = csv::read_table(dir / "dcs.csv");
        csv::require_columns(t, {"id", "zone", "load_mw", "inflexible_fraction",
                                 "flexibility_window_h"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            DataCenter dc;
            dc.id = csv::parse_string(t, i, "id");
            dc.zone = csv::parse_string(t, i, "zone");
            dc.load_mw = csv::parse_double(t, i, "load_mw");
            dc.inflexible_fraction = csv::parse_double(t, i, "inflexible_fraction");
            dc.flexibility_window_h = static_cast<int>(csv::parse_int(t, i, "flexibility_window_h"));
            data.dcs.push_back(std::move(dc));
        }
    }
    {
        std::filesystem::path sdir = dir / "series";
        if (!std::filesystem::is_directory(sdir))
            throw MissingFile("missing directory: " + sdir.string());
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(sdir))
            if (e.path().extension() == ".csv") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto t = csv::read_table(f);
            csv::require_columns(t, {"value"});
            std::vector<double> values;
            values.reserve(t.rows.size());
            for (size_t i = 0; i < t.rows.size(); ++i)
                values.push_back(csv::parse_double(t, i, "value"));
            if (static_cast<int>(values.size()) != kHoursPerYear)
                throw SchemaError(f.string() + ": series has " + std::to_string(values.size()) +
                                  " rows, expected " + std::to_string(kHoursPerYear));
            data.series.emplace(f.stem().string(), std::move(values));
        }
    }

    auto violations = validate_system(data);
    if (!violations.empty()) {
        for (const auto& v : violations)
            if (v.code == "dangling_zone" || v.code == "dangling_plant" || v.code == "dangling_series")
                throw DanglingReference(v.subject + ": " + v.message);
        throw SchemaError(dir.string() + ": " + violations.front().subject + ": " +
                          violations.front().message +
                          (violations.size() > 1
                               ? " (and " + std::to_string(violations.size() - 1) + " more)"
                               : ""));
    }
    return data;
}

inline void write_system(const SystemData& data, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "series");
    {
        csv::Writer w(dir / "zones.csv");
        w.row({"id", "kind", "demand_series"});
        for (const auto& z : data.zones)
            w.row({z.id, z.kind == ZoneKind::main_system ? "main_system" : "dc_colocation",
                   z.demand_series_ref});
        w.close();
    }
    {
        csv::Writer w(dir / "plants.csv");
        w.row({"id", "zone", "fuel", "unit_size_mw", "existing_units", "min_stable_fraction",
               "ramp_up_fraction", "ramp_down_fraction", "heat_rate_mmbtu_per_mwh",
               "fuel_cost_per_mmbtu", "vom_per_mwh", "inv_cost_annualized_per_mw", "fom_per_mw",
               "co2_per_mmbtu", "remaining_life_yr", "retrofittable"});
        for (const auto& p : data.plants)
            w.row({p.id, p.zone, p.fuel == Fuel::coal ? "coal" : "gas",
                   detail::fmt(p.unit_size_mw), std::to_string(p.existing_units),
                   detail::fmt(p.min_stable_fraction), detail::fmt(p.ramp_up_fraction),
                   detail::fmt(p.ramp_down_fraction), detail::fmt(p.heat_rate_mmbtu_per_mwh),
                   detail::fmt(p.fuel_cost_per_mmbtu), detail::fmt(p.vom_per_mwh),
                   p.inv_cost_annualized_per_mw ? detail::fmt(*p.inv_cost_annualized_per_mw) : "",
                   detail::fmt(p.fom_per_mw), detail::fmt(p.co2_per_mmbtu),
                   std::to_string(p.remaining_life_yr), p.retrofittable ? "true" : "false"});
        w.close();
    }
    {
        csv::Writer w(dir / "renewables.csv");
        w.row({"id", "zone", "tech", "capacity_factor_series", "inv_cost_annualized_per_mw",
               "fom_per_mw", "existing_mw", "max_buildable_mw"});
        for (const auto& r : data.renewables)
            w.row({r.id, r.zone, r.tech == RenewableTech::solar ? "solar" : "wind",
                   r.capacity_factor_series_ref, detail::fmt(r.inv_cost_annualized_per_mw),
                   detail::fmt(r.fom_per_mw), detail::fmt(r.existing_mw),
                   detail::fmt(r.max_buildable_mw)});
        w.close();
    }
    {
        csv::Writer w(dir / "storage.csv");
        w.row({"id", "kind", "zone", "source_plant", "inv_power_per_mw", "inv_energy_per_mwh",
               "fom_per_mw", "duration_h", "charge_efficiency", "discharge_efficiency",
               "existing_power_mw", "overnight_energy_per_kwhth", "overnight_charge_per_kw",
               "overnight_retrofit_per_kw", "self_discharge_per_h", "d_min_h", "d_max_h",
               "vom_discharge_per_mwh"});
        for (const auto& s : data.libs)
            w.row({s.id, "lib", s.zone, "", detail::fmt(s.inv_power_per_mw),
                   detail::fmt(s.inv_energy_per_mwh), detail::fmt(s.fom_per_mw),
                   detail::fmt(s.duration_h), detail::fmt(s.charge_efficiency),
                   detail::fmt(s.discharge_efficiency), detail::fmt(s.existing_power_mw), "", "",
                   "", "", "", "", ""});
        for (const auto& s : data.tes_units)
            w.row({s.id, "tes", "", s.source_plant, "", "", detail::fmt(s.fom_per_mw), "",
                   detail::fmt(s.charge_efficiency), detail::fmt(s.discharge_efficiency), "",
                   detail::fmt(s.overnight_energy_per_kwhth), detail::fmt(s.overnight_charge_per_kw),
                   detail::fmt(s.overnight_retrofit_per_kw), detail::fmt(s.self_discharge_per_h),
                   detail::fmt(s.d_min_h), detail::fmt(s.d_max_h),
                   detail::fmt(s.vom_discharge_per_mwh)});
        w.close();
    }
    {
        csv::Writer w(dir / "dcs.csv");
        w.row({"id", "zone", "load_mw", "inflexible_fraction", "flexibility_window_h"});
        for (const auto& dc : data.dcs)
            w.row({dc.id, dc.zone, detail::fmt(dc.load_mw), detail::fmt(dc.inflexible_fraction),
                   std::to_string(dc.flexibility_window_h)});
        w.close();
    }
    for (const auto& [id, values] : data.series) {
        csv::Writer w(dir / "series" / (id + ".csv"));
        w.row({"value"});
        for (double v : values) w.row({detail::fmt(v)});
        w.close();
    }
}

// ---- scenario.json ----

inline std::string to_string(CarbonPolicy p) {
    return p == CarbonPolicy::zero_carbon_hourly ? "zero_carbon_hourly" : "unconstrained";
}
inline std::string to_string(SolverChoice s) {
    return s == SolverChoice::builtin ? "builtin" : "mps_export";
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("missing file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a flat JSON object");

    const std::set<std::string> known = {"storage_menu",    "carbon_policy",
                                         "flexibility_fraction", "voll_per_mwh",
                                         "interest_rate",   "representative_weeks",
                                         "solver",          "relax_integrality"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");
    for (const auto& key : known)
        if (!j.contains(key)) throw ConfigError(path.string() + ": missing key '" + key + "'");

    ScenarioConfig c;
    try {
        for (const auto& m : j.at("storage_menu")) {
            std::string s = m.get<std::string>();
            if (s == "lib") c.storage_menu.insert(StorageKind::lib);
            else if (s == "tes") c.storage_menu.insert(StorageKind::tes);
            else throw ConfigError(path.string() + ": storage_menu entry '" + s + "'");
        }
        std::string policy = j.at("carbon_policy").get<std::string>();
        if (policy == "zero_carbon_hourly") c.carbon_policy = CarbonPolicy::zero_carbon_hourly;
        else if (policy == "unconstrained") c.carbon_policy = CarbonPolicy::unconstrained;
        else throw ConfigError(path.string() + ": carbon_policy '" + policy + "'");
        c.flexibility_fraction = j.at("flexibility_fraction").get<double>();
        c.voll_per_mwh = j.at("voll_per_mwh").get<double>();
        c.interest_rate = j.at("interest_rate").get<double>();
        c.representative_weeks = j.at("representative_weeks").get<int>();
        std::string solver = j.at("solver").get<std::string>();
        if (solver == "builtin") c.solver = SolverChoice::builtin;
        else if (solver == "mps_export") c.solver = SolverChoice::mps_export;
        else throw ConfigError(path.string() + ": solver '" + solver + "'");
        c.relax_integrality = j.at("relax_integrality").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    validate_scenario(c);
    return c;
}

inline void save_scenario(const ScenarioConfig& c, const std::filesystem::path& path) {
    nlohmann::json j;
    j["storage_menu"] = nlohmann::json::array();
    if (c.has_lib()) j["storage_menu"].push_back("lib");
    if (c.has_tes()) j["storage_menu"].push_back("tes");
    j["carbon_policy"] = to_string(c.carbon_policy);
    j["flexibility_fraction"] = c.flexibility_fraction;
    j["voll_per_mwh"] = c.voll_per_mwh;
    j["interest_rate"] = c.interest_rate;
    j["representative_weeks"] = c.representative_weeks;
    j["solver"] = to_string(c.solver);
    j["relax_integrality"] = c.relax_integrality;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

// ---- solution artifacts ----

namespace detail {

// "dispatch[coal1,t=17]" -> ("dispatch[coal1]", 17); "unmet[t=3]" -> ("unmet", 3)
inline bool split_hourly_key(const std::string& key, std::string& base, int& hour) {
    auto pos = key.find(",t=");
    if (pos != std::string::npos) {
        base = key.substr(0, pos) + "]";
        hour = std::stoi(key.substr(pos + 3));
        return true;
    }
    pos = key.find("[t=");
    if (pos != std::string::npos) {
        base = key.substr(0, pos);
        hour = std::stoi(key.substr(pos + 3));
        return true;
    }
    return false;
}

inline std::string join_hourly_key(const std::string& base, int hour) {
    if (base.back() == ']')
        return base.substr(0, base.size() - 1) + ",t=" + std::to_string(hour) + "]";
    return base + "[t=" + std::to_string(hour) + "]";
}

}  // namespace detail

inline void write_solution(const Solution& sol, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        csv::Writer w(dir / "capacities.csv");
        w.row({"variable", "value"});
        for (const auto& [key, value] : sol.values) {
            std::string base;
            int hour;
            if (!detail::split_hourly_key(key, base, hour)) w.row({key, detail::fmt(value)});
        }
        w.close();
    }
    {
        // values is ordered by key, so rows come out sorted by variable then hour
        std::map<std::string, std::map<int, double>> hourly;
        for (const auto& [key, value] : sol.values) {
            std::string base;
            int hour;
            if (detail::split_hourly_key(key, base, hour)) hourly[base][hour] = value;
        }
        csv::Writer w(dir / "dispatch.csv");
        w.row({"hour", "variable", "value"});
        for (const auto& [base, rows] : hourly)
            for (const auto& [hour, value] : rows)
                w.row({std::to_string(hour), base, detail::fmt(value)});
        w.close();
    }
    {
        nlohmann::json j;
        j["objective_usd_per_yr"] = sol.objective_usd_per_yr;
        j["thermal_capacity"] = sol.breakdown.thermal_capacity;
        j["renewable_capacity"] = sol.breakdown.renewable_capacity;
        j["lib_capacity"] = sol.breakdown.lib_capacity;
        j["tes_capacity"] = sol.breakdown.tes_capacity;
        j["thermal_variable"] = sol.breakdown.thermal_variable;
        j["tes_variable"] = sol.breakdown.tes_variable;
        j["load_shedding"] = sol.breakdown.load_shedding;
        std::ofstream out(dir / "costs.json");
        out << j.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + (dir / "costs.json").string());
    }
    {
        nlohmann::json j;
        j["annual_emissions_tco2"] = sol.annual_emissions_tco2;
        std::ofstream out(dir / "emissions.json");
        out << j.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + (dir / "emissions.json").string());
    }
}

inline Solution read_solution(const std::filesystem::path& dir) {
    Solution sol;
    {
        auto t = csv::read_table(dir / "capacities.csv");
        csv::require_columns(t, {"variable", "value"});
        for (size_t i = 0; i < t.rows.size(); ++i)
            sol.values[csv::parse_string(t, i, "variable")] = csv::parse_double(t, i, "value");
    }
    {
        auto t = csv::read_table(dir / "dispatch.csv");
        csv::require_columns(t, {"hour", "variable", "value"});
        for (size_t i = 0; i < t.rows.size(); ++i) {
            int hour = static_cast<int>(csv::parse_int(t, i, "hour"));
            sol.values[detail::join_hourly_key(csv::parse_string(t, i, "variable"), hour)] =
                csv::parse_double(t, i, "value");
        }
    }
    {
        std::ifstream in(dir / "costs.json");
        if (!in) throw MissingFile("missing file: " + (dir / "costs.json").string());
        nlohmann::json j;
        try {
            in >> j;
            sol.objective_usd_per_yr = j.at("objective_usd_per_yr").get<double>();
            sol.breakdown.thermal_capacity = j.at("thermal_capacity").get<double>();
            sol.breakdown.renewable_capacity = j.at("renewable_capacity").get<double>();
            sol.breakdown.lib_capacity = j.at("lib_capacity").get<double>();
            sol.breakdown.tes_capacity = j.at("tes_capacity").get<double>();
            sol.breakdown.thermal_variable = j.at("thermal_variable").get<double>();
            sol.breakdown.tes_variable = j.at("tes_variable").get<double>();
            sol.breakdown.load_shedding = j.at("load_shedding").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError((dir / "costs.json").string() + ": " + e.what());
        }
    }
    {
        std::ifstream in(dir / "emissions.json");
        if (!in) throw MissingFile("missing file: " + (dir / "emissions.json").string());
        nlohmann::json j;
        try {
            in >> j;
            sol.annual_emissions_tco2 = j.at("annual_emissions_tco2").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError((dir / "emissions.json").string() + ": " + e.what());
        }
    }
    return sol;
}

}  // namespace retroplan
