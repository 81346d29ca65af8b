#pragma once
// Shared builders for the test suite: small deterministic systems, synthetic
// series, hand reductions that avoid the 8760-hour pipeline, and a seeded
// random-system generator for property tests.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "retroplan/retroplan.hpp"

namespace testsup {

using namespace retroplan;

inline std::vector<double> flat_series(double v) {
    return std::vector<double>(kHoursPerYear, v);
}

// day/night pattern: `day` from 6:00 to 18:00, `night` otherwise
inline std::vector<double> day_night_series(double day, double night) {
    std::vector<double> v(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h) {
        int hod = h % 24;
        v[h] = (hod >= 6 && hod < 18) ? day : night;
    }
    return v;
}

// one representative day taken from the start of the year, weighted so that
// annual totals are conserved: 24 h * 2555/7 = 8760
inline ReducedSeries one_day(const SeriesTable& table) {
    return make_reduction(table, 24, {0}, {2555});
}

// two 24 h periods with weights summing to 2555 sevenths
inline ReducedSeries two_days(const SeriesTable& table) {
    return make_reduction(table, 24, {0, 24}, {1278, 1277});
}

// Single-zone system: one retrofittable coal plant, solar, one battery, one
// TES candidate and a data center co-located in a second zone with its own
// assets. Small but exercises every constraint family.
inline SystemData small_system() {
    SystemData d;
    d.zones = {{"main", ZoneKind::main_system, "demand"},
               {"site", ZoneKind::dc_colocation, ""}};

    ThermalPlant coal;
    coal.id = "coal1";
    coal.zone = "site";
    coal.fuel = Fuel::coal;
    coal.unit_size_mw = 100;
    coal.existing_units = 2;
    coal.min_stable_fraction = 0.3;
    coal.ramp_up_fraction = 0.5;
    coal.ramp_down_fraction = 0.5;
    coal.heat_rate_mmbtu_per_mwh = 10.1;
    coal.fuel_cost_per_mmbtu = 2.0;
    coal.vom_per_mwh = 4.0;
    coal.fom_per_mw = 50000;
    coal.co2_per_mmbtu = 0.0953;
    coal.remaining_life_yr = 10;
    coal.retrofittable = true;
    d.plants.push_back(coal);

    ThermalPlant gas;
    gas.id = "gas1";
    gas.zone = "main";
    gas.fuel = Fuel::gas;
    gas.unit_size_mw = 50;
    gas.existing_units = 1;
    gas.ramp_up_fraction = 1;
    gas.ramp_down_fraction = 1;
    gas.heat_rate_mmbtu_per_mwh = 7.0;
    gas.fuel_cost_per_mmbtu = 3.5;
    gas.vom_per_mwh = 2.0;
    gas.inv_cost_annualized_per_mw = 70000;
    gas.fom_per_mw = 18000;
    gas.co2_per_mmbtu = 0.0531;
    gas.remaining_life_yr = 20;
    d.plants.push_back(gas);

    RenewableResource sol;
    sol.id = "solar1";
    sol.zone = "site";
    sol.tech = RenewableTech::solar;
    sol.capacity_factor_series_ref = "cf_solar";
    sol.inv_cost_annualized_per_mw = 65000;
    sol.fom_per_mw = 14000;
    sol.existing_mw = 0;
    sol.max_buildable_mw = 500;
    d.renewables.push_back(sol);

    LibSpec lib;
    lib.id = "lib1";
    lib.zone = "site";
    lib.inv_power_per_mw = 27000;
    lib.inv_energy_per_mwh = 13500;
    lib.fom_per_mw = 5000;
    lib.duration_h = 4;
    d.libs.push_back(lib);

    TesSpec tes;
    tes.id = "tes1";
    tes.source_plant = "coal1";
    tes.overnight_energy_per_kwhth = 28.7;
    tes.overnight_charge_per_kw = 2.0;
    tes.overnight_retrofit_per_kw = 799.0;
    tes.fom_per_mw = 50000;
    tes.vom_discharge_per_mwh = 3.0;
    d.tes_units.push_back(tes);

    DataCenter dc;
    dc.id = "dc1";
    dc.zone = "site";
    dc.load_mw = 20;
    dc.inflexible_fraction = 1.0;
    dc.flexibility_window_h = 24;
    d.dcs.push_back(dc);

    d.series["demand"] = day_night_series(80, 50);
    d.series["cf_solar"] = day_night_series(0.6, 0.0);
    return d;
}

inline ScenarioConfig small_scenario() {
    ScenarioConfig c;
    c.storage_menu = {StorageKind::lib, StorageKind::tes};
    c.carbon_policy = CarbonPolicy::zero_carbon_hourly;
    c.flexibility_fraction = 0;
    c.voll_per_mwh = 9000;
    c.interest_rate = 0.04;
    c.representative_weeks = 1;
    c.solver = SolverChoice::builtin;
    c.relax_integrality = false;
    return c;
}

// a prepared case over a single 24 h representative day, so model-level tests
// stay quick while still touching SoC wrap and daily windows
inline PreparedCase small_case(SystemData d, ScenarioConfig c) {
    PreparedCase pc{apply_retrofit_costs(d, c.interest_rate), ReducedSeries{}, c};
    pc.reduced = one_day(pc.data.series);
    return pc;
}

// Random small-but-valid system for property tests. Always keeps a gas plant
// large enough (plus the unmet variable) that the model stays feasible.
inline SystemData random_system(std::uint64_t seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    auto u = [&](double a, double b) { return a + (b - a) * (rng() / 4294967296.0); };
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };

    SystemData d;
    d.zones = {{"main", ZoneKind::main_system, "demand"}};
    int nsites = 1 + pick(2);
    for (int i = 0; i < nsites; ++i)
        d.zones.push_back({"site" + std::to_string(i), ZoneKind::dc_colocation, ""});

    double base = u(40, 120);
    std::vector<double> dem(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h)
        dem[h] = base + u(0, 0.2 * base) + 0.3 * base * std::sin(2 * 3.14159265 * (h % 24) / 24.0);
    d.series["demand"] = dem;

    int ncoal = 1 + pick(2);
    for (int i = 0; i < ncoal; ++i) {
        ThermalPlant p;
        p.id = "coal" + std::to_string(i);
        p.zone = d.zones[pick(static_cast<int>(d.zones.size()))].id;
        p.fuel = Fuel::coal;
        p.unit_size_mw = u(30, 120);
        p.existing_units = 1 + pick(3);
        p.min_stable_fraction = pick(2) ? u(0.2, 0.5) : 0.0;
        p.ramp_up_fraction = pick(2) ? 1.0 : u(0.3, 0.9);
        p.ramp_down_fraction = p.ramp_up_fraction;
        p.heat_rate_mmbtu_per_mwh = u(9, 11);
        p.fuel_cost_per_mmbtu = u(1.5, 3);
        p.vom_per_mwh = u(2, 6);
        p.fom_per_mw = u(30000, 60000);
        p.co2_per_mmbtu = 0.0953;
        p.remaining_life_yr = 2 + pick(30);
        p.retrofittable = pick(2) == 0;
        d.plants.push_back(p);
    }
    {
        ThermalPlant p;
        p.id = "gas_backstop";
        p.zone = "main";
        p.fuel = Fuel::gas;
        p.unit_size_mw = 2 * base;
        p.existing_units = 2;
        p.ramp_up_fraction = 1;
        p.ramp_down_fraction = 1;
        p.heat_rate_mmbtu_per_mwh = 7;
        p.fuel_cost_per_mmbtu = u(2.5, 4);
        p.vom_per_mwh = 2;
        p.inv_cost_annualized_per_mw = u(60000, 90000);
        p.fom_per_mw = u(15000, 25000);
        p.co2_per_mmbtu = 0.0531;
        p.remaining_life_yr = 20;
        d.plants.push_back(p);
    }

    int nren = 1 + pick(2);
    for (int i = 0; i < nren; ++i) {
        RenewableResource r;
        r.id = "ren" + std::to_string(i);
        r.zone = d.zones[pick(static_cast<int>(d.zones.size()))].id;
        r.tech = pick(2) ? RenewableTech::wind : RenewableTech::solar;
        r.capacity_factor_series_ref = "cf" + std::to_string(i);
        r.inv_cost_annualized_per_mw = u(55000, 95000);
        r.fom_per_mw = u(10000, 26000);
        r.existing_mw = pick(2) ? u(0, 30) : 0;
        r.max_buildable_mw = u(200, 600);
        d.renewables.push_back(r);
        std::vector<double> cf(kHoursPerYear);
        if (r.tech == RenewableTech::solar) {
            for (int h = 0; h < kHoursPerYear; ++h) {
                int hod = h % 24;
                cf[h] = hod >= 6 && hod < 18 ? u(0.3, 0.9) : 0.0;
            }
        } else {
            for (int h = 0; h < kHoursPerYear; ++h) cf[h] = u(0.05, 0.8);
        }
        d.series["cf" + std::to_string(i)] = cf;
    }

    if (pick(2)) {
        LibSpec s;
        s.id = "lib0";
        s.zone = d.zones[pick(static_cast<int>(d.zones.size()))].id;
        s.inv_power_per_mw = u(20000, 35000);
        s.inv_energy_per_mwh = u(9000, 16000);
        s.fom_per_mw = u(3000, 8000);
        s.duration_h = 2 + pick(5);
        d.libs.push_back(s);
    }
    for (const auto& p : d.plants) {
        if (!p.retrofittable || pick(2)) continue;
        TesSpec s;
        s.id = "tes_" + p.id;
        s.source_plant = p.id;
        s.overnight_energy_per_kwhth = u(20, 40);
        s.overnight_charge_per_kw = u(1, 4);
        s.overnight_retrofit_per_kw = u(600, 1000);
        s.fom_per_mw = p.fom_per_mw;
        s.vom_discharge_per_mwh = u(2, 5);
        d.tes_units.push_back(s);
    }

    // at most one DC, placed in a co-location zone; give the zone a renewable
    // so hourly matching has something to work with under the ZC policy. The
    // load stays well below what the zone's resources can cover.
    if (nsites > 0 && pick(2)) {
        DataCenter dc;
        dc.id = "dc0";
        dc.zone = "site0";
        dc.load_mw = u(5, 12);
        dc.inflexible_fraction = 1.0;
        dc.flexibility_window_h = 24;
        d.dcs.push_back(dc);
        bool covered = false;
        for (const auto& r : d.renewables) covered |= r.zone == "site0";
        if (!covered) {
            RenewableResource r = d.renewables[0];
            r.id = "ren_site0";
            r.zone = "site0";
            d.renewables.push_back(r);
        }
    }
    return d;
}

inline ScenarioConfig random_scenario(std::uint64_t seed, const SystemData& d) {
    std::mt19937 rng(static_cast<unsigned>(seed * 2654435761u + 17));
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };
    ScenarioConfig c;
    switch (pick(4)) {
        case 0: break;
        case 1: c.storage_menu = {StorageKind::lib}; break;
        case 2: c.storage_menu = {StorageKind::tes}; break;
        default: c.storage_menu = {StorageKind::lib, StorageKind::tes}; break;
    }
    // The ZC policy is only drawn when every loaded DC can actually be
    // matched around the clock: wind never dies overnight, while solar alone
    // needs co-located storage to carry the night hours.
    bool dc_ok = true;
    for (const auto& dc : d.dcs) {
        bool wind = false, ren = false, stor = false;
        for (const auto& r : d.renewables)
            if (r.zone == dc.zone) {
                ren = true;
                wind |= r.tech == RenewableTech::wind;
            }
        if (c.has_lib())
            for (const auto& s : d.libs) stor |= s.zone == dc.zone;
        if (c.has_tes())
            for (const auto& s : d.tes_units) stor |= d.tes_zone(s) == dc.zone;
        dc_ok &= wind || (ren && stor) || dc.load_mw == 0;
    }
    c.carbon_policy = (dc_ok && pick(2)) ? CarbonPolicy::zero_carbon_hourly
                                         : CarbonPolicy::unconstrained;
    c.flexibility_fraction = pick(2) ? 0.0 : 0.2;
    c.voll_per_mwh = 9000;
    c.interest_rate = 0.04;
    c.representative_weeks = 1;
    c.relax_integrality = pick(2) == 0;
    return c;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("retroplan_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace testsup
