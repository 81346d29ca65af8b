#pragma once
// Core data types shared by every module. Units are fixed globally:
// MW, MWh (electric), MWh_th (TES energy), hours, $/yr for annualized
// costs. The hourly step is 1 h, so power and per-step energy coincide
// numerically. All types are immutable after validation.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retroplan/errors.hpp"

namespace retroplan {

constexpr int kHoursPerYear = 8760;
constexpr int kHoursPerWeek = 168;
constexpr int kWeeksPerYear = 52;  // trailing 24 h of the year fold into week 52's weight

// series id -> 8760 hourly values
using SeriesTable = std::map<std::string, std::vector<double>>;

enum class ZoneKind { main_system, dc_colocation };

struct Zone {
    std::string id;
    ZoneKind kind = ZoneKind::main_system;
    std::string demand_series_ref;  // may be empty for dc_colocation zones
};

enum class Fuel { coal, gas };

struct ThermalPlant {
    std::string id;
    std::string zone;
    Fuel fuel = Fuel::coal;
    double unit_size_mw = 0;
    int existing_units = 0;
    double min_stable_fraction = 0;   // lowest output fraction of a committed unit
    double ramp_up_fraction = 1;      // per-hour fraction of unit size
    double ramp_down_fraction = 1;
    double heat_rate_mmbtu_per_mwh = 0;
    double fuel_cost_per_mmbtu = 0;
    double vom_per_mwh = 0;
    std::optional<double> inv_cost_annualized_per_mw;  // gas only; no new coal builds
    double fom_per_mw = 0;
    double co2_per_mmbtu = 0;
    int remaining_life_yr = 0;
    bool retrofittable = false;

    double fuel_price_per_mwh() const { return heat_rate_mmbtu_per_mwh * fuel_cost_per_mmbtu; }
    double emission_t_per_mwh() const { return heat_rate_mmbtu_per_mwh * co2_per_mmbtu; }
};

enum class RenewableTech { solar, wind };

struct RenewableResource {
    std::string id;
    std::string zone;
    RenewableTech tech = RenewableTech::solar;
    std::string capacity_factor_series_ref;
    double inv_cost_annualized_per_mw = 0;
    double fom_per_mw = 0;
    double existing_mw = 0;
    double max_buildable_mw = 0;
};

struct LibSpec {
    std::string id;
    std::string zone;
    double inv_power_per_mw = 0;   // annualized, symmetric charge/discharge power
    double inv_energy_per_mwh = 0;
    double fom_per_mw = 0;
    double duration_h = 4;         // energy-to-power ratio, fixed
    double charge_efficiency = 0.95;
    double discharge_efficiency = 0.95;
    double existing_power_mw = 0;
};

// Retrofitted molten-salt storage built from a coal plant's power block.
// Overnight component costs are data; the annualized figures are filled in
// by finance::annualize_retrofit over the host plant's remaining life.
struct TesSpec {
    std::string id;
    std::string source_plant;  // must be a retrofittable coal plant
    double overnight_energy_per_kwhth = 0;  // molten-salt tank
    double overnight_charge_per_kw = 0;     // electric heater
    double overnight_retrofit_per_kw = 0;   // turbine refurbishment
    double inv_energy_per_mwhth = 0;        // annualized $/MWh_th-yr
    double inv_charge_per_mw = 0;           // annualized $/MW-yr
    double inv_retrofit_per_mw = 0;         // annualized $/MW-yr
    double fom_per_mw = 0;                  // same as the retrofitted coal plant
    double charge_efficiency = 0.35;
    double discharge_efficiency = 0.95;
    double self_discharge_per_h = 0.001;    // fraction of energy capacity per hour
    double d_min_h = 4;
    double d_max_h = 100;
    double vom_discharge_per_mwh = 0;
};

struct DataCenter {
    std::string id;
    std::string zone;
    double load_mw = 0;              // flat hourly load
    double inflexible_fraction = 1;  // share that must be matched every hour
    int flexibility_window_h = 24;   // daily shifting window
};

enum class CarbonPolicy { zero_carbon_hourly, unconstrained };
enum class SolverChoice { builtin, mps_export };
enum class StorageKind { lib, tes };

struct ScenarioConfig {
    std::set<StorageKind> storage_menu;
    CarbonPolicy carbon_policy = CarbonPolicy::unconstrained;
    double flexibility_fraction = 0;  // 1 - lambda, applied to all data centers
    double voll_per_mwh = 9000;
    double interest_rate = 0.04;
    int representative_weeks = 2;
    SolverChoice solver = SolverChoice::builtin;
    bool relax_integrality = false;

    bool has_lib() const { return storage_menu.count(StorageKind::lib) > 0; }
    bool has_tes() const { return storage_menu.count(StorageKind::tes) > 0; }
};

struct SystemData {
    std::vector<Zone> zones;
    std::vector<ThermalPlant> plants;
    std::vector<RenewableResource> renewables;
    std::vector<LibSpec> libs;
    std::vector<TesSpec> tes_units;
    std::vector<DataCenter> dcs;
    SeriesTable series;

    const Zone* find_zone(const std::string& id) const {
        for (const auto& z : zones)
            if (z.id == id) return &z;
        return nullptr;
    }
    const ThermalPlant* find_plant(const std::string& id) const {
        for (const auto& p : plants)
            if (p.id == id) return &p;
        return nullptr;
    }
    const std::vector<double>* find_series(const std::string& id) const {
        auto it = series.find(id);
        return it == series.end() ? nullptr : &it->second;
    }
    // TES units sit at their host plant's site.
    std::string tes_zone(const TesSpec& s) const {
        const ThermalPlant* p = find_plant(s.source_plant);
        return p ? p->zone : std::string();
    }
};

// Cost blocks mirroring the objective's seven terms.
struct CostBreakdown {
    double thermal_capacity = 0;    // investment, retirement and retrofitting of thermal plants
    double renewable_capacity = 0;  // planning renewable resources
    double lib_capacity = 0;        // sizing batteries
    double tes_capacity = 0;        // sizing retrofitted storage
    double thermal_variable = 0;    // vom + fuel of thermal plants
    double tes_variable = 0;        // vom of retrofitted storage discharge
    double load_shedding = 0;

    double total() const {
        return thermal_capacity + renewable_capacity + lib_capacity + tes_capacity +
               thermal_variable + tes_variable + load_shedding;
    }
};

struct Solution {
    double objective_usd_per_yr = 0;
    CostBreakdown breakdown;
    // registry key -> value, capacity decisions and hourly dispatch together
    std::map<std::string, double> values;
    // constraint name -> dual value, populated when the relaxation was solved
    std::map<std::string, double> duals;
    double annual_emissions_tco2 = 0;

    double value_or(const std::string& key, double fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    double at(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw MissingVariable("solution has no value for '" + key + "'");
        return it->second;
    }
};

// Registry key helpers. Capacity keys look like "retrofit[coal1]",
// hourly keys like "dispatch[coal1,t=17]".
namespace keys {
inline std::string cap(const std::string& family, const std::string& id) {
    return family + "[" + id + "]";
}
inline std::string hourly(const std::string& family, const std::string& id, int t) {
    return family + "[" + id + ",t=" + std::to_string(t) + "]";
}
inline std::string hourly(const std::string& family, int t) {
    return family + "[t=" + std::to_string(t) + "]";
}
}  // namespace keys

struct Violation {
    std::string code;     // short machine-readable tag
    std::string subject;  // offending record id
    std::string message;

    bool operator<(const Violation& o) const {
        if (code != o.code) return code < o.code;
        if (subject != o.subject) return subject < o.subject;
        return message < o.message;
    }
};

// Checks every type invariant and that all series references resolve to
// full-length hourly data. Returns violations as values, sorted, so the
// result is independent of record order.
inline std::vector<Violation> validate_system(const SystemData& d) {
    std::vector<Violation> out;
    auto flag = [&](const std::string& code, const std::string& subject, const std::string& msg) {
        out.push_back({code, subject, msg});
    };

    // series table
    for (const auto& [id, values] : d.series) {
        if (static_cast<int>(values.size()) != kHoursPerYear)
            flag("series_length", id,
                 "series has " + std::to_string(values.size()) + " rows, expected 8760");
        for (double v : values)
            if (!std::isfinite(v)) {
                flag("series_not_finite", id, "series contains a non-finite value");
                break;
            }
    }
    auto series_ok = [&](const std::string& ref) {
        const auto* s = d.find_series(ref);
        return s && static_cast<int>(s->size()) == kHoursPerYear;
    };

    // zones
    int main_count = 0;
    std::set<std::string> zone_ids;
    for (const auto& z : d.zones) {
        if (!zone_ids.insert(z.id).second) flag("duplicate_id", z.id, "duplicate zone id");
        if (z.kind == ZoneKind::main_system) {
            ++main_count;
            if (z.demand_series_ref.empty() || !series_ok(z.demand_series_ref))
                flag("no_main_system_demand", z.id, "main system zone has no resolvable demand series");
        } else if (!z.demand_series_ref.empty() && !series_ok(z.demand_series_ref)) {
            // a d.c. co-location zone may carry no demand of its own
            flag("dangling_series", z.id, "zone demand series does not resolve");
        }
    }
    if (main_count != 1)
        flag("no_main_system_demand", "-",
             main_count == 0 ? "no main_system zone defined" : "more than one main_system zone");

    auto zone_exists = [&](const std::string& id) { return zone_ids.count(id) > 0; };

    // thermal plants
    std::set<std::string> plant_ids;
    for (const auto& p : d.plants) {
        if (!plant_ids.insert(p.id).second) flag("duplicate_id", p.id, "duplicate plant id");
        if (!zone_exists(p.zone)) flag("dangling_zone", p.id, "plant zone '" + p.zone + "' not defined");
        if (!(p.unit_size_mw > 0)) flag("unit_size", p.id, "unit_size_mw must be > 0");
        if (p.existing_units < 0) flag("existing_units", p.id, "existing_units must be >= 0");
        if (p.min_stable_fraction < 0 || p.min_stable_fraction > 1)
            flag("min_stable_fraction", p.id, "min_stable_fraction outside [0,1]");
        if (p.ramp_up_fraction < 0 || p.ramp_down_fraction < 0)
            flag("ramp_fraction", p.id, "ramp fractions must be >= 0");
        if (p.fuel == Fuel::coal && p.inv_cost_annualized_per_mw.has_value())
            flag("coal_inv_cost", p.id, "coal plants cannot carry a new-build investment cost");
        if (p.fuel == Fuel::gas && !p.inv_cost_annualized_per_mw.has_value())
            flag("gas_inv_cost", p.id, "gas plants need inv_cost_annualized_per_mw");
        if (p.retrofittable && p.fuel != Fuel::coal)
            flag("retrofittable_implies_coal", p.id, "retrofittable => fuel = coal");
        if (p.remaining_life_yr < 0) flag("remaining_life", p.id, "remaining_life_yr must be >= 0");
    }

    // renewables
    std::set<std::string> res_ids;
    for (const auto& r : d.renewables) {
        if (!res_ids.insert(r.id).second) flag("duplicate_id", r.id, "duplicate renewable id");
        if (!zone_exists(r.zone)) flag("dangling_zone", r.id, "renewable zone '" + r.zone + "' not defined");
        if (r.existing_mw < 0) flag("existing_mw", r.id, "existing_mw must be >= 0");
        if (r.max_buildable_mw < 0) flag("max_buildable_mw", r.id, "max_buildable_mw must be >= 0");
        const auto* cf = d.find_series(r.capacity_factor_series_ref);
        if (!cf || cf->size() != kHoursPerYear) {
            flag("dangling_series", r.id, "capacity factor series does not resolve");
        } else {
            for (double v : *cf)
                if (v < 0 || v > 1) {
                    flag("capacity_factor_range", r.id, "capacity factor outside [0,1]");
                    break;
                }
        }
    }

    // batteries
    std::set<std::string> storage_ids;
    for (const auto& s : d.libs) {
        if (!storage_ids.insert(s.id).second) flag("duplicate_id", s.id, "duplicate storage id");
        if (!zone_exists(s.zone)) flag("dangling_zone", s.id, "storage zone '" + s.zone + "' not defined");
        if (!(s.duration_h > 0)) flag("duration", s.id, "duration_h must be > 0");
        if (!(s.charge_efficiency > 0 && s.charge_efficiency <= 1))
            flag("efficiency", s.id, "charge_efficiency outside (0,1]");
        if (!(s.discharge_efficiency > 0 && s.discharge_efficiency <= 1))
            flag("efficiency", s.id, "discharge_efficiency outside (0,1]");
        if (s.existing_power_mw < 0) flag("existing_mw", s.id, "existing_power_mw must be >= 0");
    }

    // retrofitted storage
    for (const auto& s : d.tes_units) {
        if (!storage_ids.insert(s.id).second) flag("duplicate_id", s.id, "duplicate storage id");
        const ThermalPlant* host = d.find_plant(s.source_plant);
        if (!host) {
            flag("dangling_plant", s.id, "source plant '" + s.source_plant + "' not defined");
        } else if (!host->retrofittable || host->fuel != Fuel::coal) {
            flag("retrofittable_implies_coal", s.id,
                 "source plant '" + s.source_plant + "' is not a retrofittable coal plant");
        }
        if (!(s.charge_efficiency > 0 && s.charge_efficiency <= 1))
            flag("efficiency", s.id, "charge_efficiency outside (0,1]");
        if (!(s.discharge_efficiency > 0 && s.discharge_efficiency <= 1))
            flag("efficiency", s.id, "discharge_efficiency outside (0,1]");
        if (s.self_discharge_per_h < 0 || s.self_discharge_per_h >= 1)
            flag("self_discharge", s.id, "self_discharge_per_h outside [0,1)");
        if (!(s.d_min_h > 0 && s.d_min_h <= s.d_max_h))
            flag("duration_window", s.id, "need 0 < d_min_h <= d_max_h");
        if (s.overnight_energy_per_kwhth < 0 || s.overnight_charge_per_kw < 0 ||
            s.overnight_retrofit_per_kw < 0)
            flag("overnight_cost", s.id, "overnight costs must be >= 0");
    }

    // data centers
    std::set<std::string> dc_ids;
    for (const auto& dc : d.dcs) {
        if (!dc_ids.insert(dc.id).second) flag("duplicate_id", dc.id, "duplicate DC id");
        const Zone* z = d.find_zone(dc.zone);
        if (!z)
            flag("dangling_zone", dc.id, "DC zone '" + dc.zone + "' not defined");
        else if (z->kind != ZoneKind::dc_colocation)
            flag("dc_zone_kind", dc.id, "DC must sit in a dc_colocation zone");
        if (dc.load_mw < 0) flag("dc_load", dc.id, "load_mw must be >= 0");
        if (dc.inflexible_fraction < 0 || dc.inflexible_fraction > 1)
            flag("inflexible_fraction", dc.id, "inflexible_fraction outside [0,1]");
        if (dc.flexibility_window_h < 1) flag("flex_window", dc.id, "flexibility_window_h must be >= 1");
    }

    std::sort(out.begin(), out.end());
    return out;
}

inline void validate_scenario(const ScenarioConfig& c) {
    if (c.representative_weeks < 1) throw ConfigError("representative_weeks must be >= 1");
    if (!(c.voll_per_mwh > 0)) throw ConfigError("voll_per_mwh must be > 0");
    if (c.interest_rate < 0) throw ConfigError("interest_rate must be >= 0");
    if (c.flexibility_fraction < 0 || c.flexibility_fraction > 1)
        throw ConfigError("flexibility_fraction outside [0,1]");
}

}  // namespace retroplan
