// Generates the two bundled fixtures. All series are synthetic (daily,
// weekly and seasonal shapes plus deterministic noise) and quantized to four
// decimals so every value survives the 10-significant-digit CSV round trip.
//
//   toy3      : 3 zones, 2 coal + 1 gas, solar + wind, 1 battery, 1 retrofit
//               candidate, one 50 MW data center; small enough for exact MILP.
//   ercot-mini: 12 retrofittable coal plants with remaining lives 2..33 yr,
//               two gas plants, three 1000 MW flat data-center loads in their
//               own co-location zones; sized for LP studies (the bundled
//               scenario relaxes integrality).
//
// Each fixture directory gets scenario.json plus manifest.json recording the
// model shape at k=1 so tests can pin the structure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "retroplan/retroplan.hpp"

using namespace retroplan;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

double q4(double v) { return std::round(v * 1e4) / 1e4; }

// deterministic uniform in [0,1) from a fixed-seed engine
double unif(std::mt19937& rng) { return rng() * (1.0 / 4294967296.0); }

std::vector<double> demand_series(double base, double daily, double seasonal, double noise,
                                  unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<double> v(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h) {
        int hod = h % 24;
        int day = h / 24;
        double weekday = (day % 7 < 5) ? 1.0 : 0.93;
        double x = base;
        x += daily * std::sin(2 * kPi * (hod - 9) / 24.0);
        x += seasonal * std::sin(2 * kPi * (day - 20) / 365.0);
        x *= weekday;
        x += noise * (unif(rng) - 0.5);
        v[h] = q4(std::max(x, 0.2 * base));
    }
    return v;
}

std::vector<double> solar_series(double scale, double season_amp, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<double> v(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h) {
        int hod = h % 24;
        int day = h / 24;
        double bell = hod >= 6 && hod <= 18 ? std::sin(kPi * (hod - 6) / 12.0) : 0.0;
        double season = 1.0 + season_amp * std::sin(2 * kPi * (day - 80) / 365.0);
        double cloud = 1.0 - 0.25 * unif(rng);
        v[h] = q4(std::clamp(scale * bell * season * cloud, 0.0, 1.0));
    }
    return v;
}

std::vector<double> wind_series(double mean, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<double> v(kHoursPerYear);
    double weather = mean;
    for (int h = 0; h < kHoursPerYear; ++h) {
        // slow mean-reverting weather band plus fast jitter
        weather += 0.04 * (mean - weather) + 0.05 * (unif(rng) - 0.5);
        double x = weather + 0.18 * std::sin(2 * kPi * h / 37.0) +
                   0.12 * std::sin(2 * kPi * h / 171.0 + 1.3) + 0.08 * (unif(rng) - 0.5);
        v[h] = q4(std::clamp(x, 0.01, 0.98));
    }
    return v;
}

ThermalPlant coal(const std::string& id, const std::string& zone, double size_mw, int units,
                  double min_stable, double ramp, double fom, int life, bool retrofittable) {
    ThermalPlant p;
    p.id = id;
    p.zone = zone;
    p.fuel = Fuel::coal;
    p.unit_size_mw = size_mw;
    p.existing_units = units;
    p.min_stable_fraction = min_stable;
    p.ramp_up_fraction = ramp;
    p.ramp_down_fraction = ramp;
    p.heat_rate_mmbtu_per_mwh = 10.1;
    p.fuel_cost_per_mmbtu = 2.1;
    p.vom_per_mwh = 4.4;
    p.fom_per_mw = fom;
    p.co2_per_mmbtu = 0.0953;
    p.remaining_life_yr = life;
    p.retrofittable = retrofittable;
    return p;
}

ThermalPlant gas(const std::string& id, const std::string& zone, double size_mw, int units,
                 double inv_annualized, double fom, int life) {
    ThermalPlant p;
    p.id = id;
    p.zone = zone;
    p.fuel = Fuel::gas;
    p.unit_size_mw = size_mw;
    p.existing_units = units;
    p.min_stable_fraction = 0;
    p.ramp_up_fraction = 1.0;
    p.ramp_down_fraction = 1.0;
    p.heat_rate_mmbtu_per_mwh = 7.2;
    p.fuel_cost_per_mmbtu = 3.6;
    p.vom_per_mwh = 2.2;
    p.inv_cost_annualized_per_mw = inv_annualized;
    p.fom_per_mw = fom;
    p.co2_per_mmbtu = 0.0531;
    p.remaining_life_yr = life;
    return p;
}

RenewableResource renewable(const std::string& id, const std::string& zone, RenewableTech tech,
                            const std::string& series, double inv, double fom, double existing,
                            double max_build) {
    RenewableResource r;
    r.id = id;
    r.zone = zone;
    r.tech = tech;
    r.capacity_factor_series_ref = series;
    r.inv_cost_annualized_per_mw = inv;
    r.fom_per_mw = fom;
    r.existing_mw = existing;
    r.max_buildable_mw = max_build;
    return r;
}

LibSpec lib(const std::string& id, const std::string& zone) {
    LibSpec s;
    s.id = id;
    s.zone = zone;
    s.inv_power_per_mw = 27000;
    s.inv_energy_per_mwh = 13500;
    s.fom_per_mw = 5000;
    s.duration_h = 4;
    s.charge_efficiency = 0.95;
    s.discharge_efficiency = 0.95;
    return s;
}

// molten-salt retrofit package with the reference cost set: tank 28.7 $/kWh_th,
// heater 2 $/kW, turbine refurbishment 799 $/kW (half a 1597 $/kW replacement)
TesSpec tes(const std::string& id, const std::string& source_plant, double fom) {
    TesSpec s;
    s.id = id;
    s.source_plant = source_plant;
    s.overnight_energy_per_kwhth = 28.7;
    s.overnight_charge_per_kw = 2.0;
    s.overnight_retrofit_per_kw = 799.0;
    s.fom_per_mw = fom;
    s.charge_efficiency = 0.35;
    s.discharge_efficiency = 0.95;
    s.self_discharge_per_h = 0.001;
    s.d_min_h = 4;
    s.d_max_h = 100;
    s.vom_discharge_per_mwh = 3.1;
    return s;
}

DataCenter datacenter(const std::string& id, const std::string& zone, double load_mw) {
    DataCenter dc;
    dc.id = id;
    dc.zone = zone;
    dc.load_mw = load_mw;
    dc.inflexible_fraction = 1.0;  // flexibility comes from the scenario knob
    dc.flexibility_window_h = 24;
    return dc;
}

SystemData make_toy3() {
    SystemData d;
    d.zones = {{"main", ZoneKind::main_system, "main_demand"},
               {"site_a", ZoneKind::dc_colocation, ""},
               {"site_b", ZoneKind::dc_colocation, ""}};
    d.plants = {coal("coal_a", "site_a", 80, 2, 0.35, 0.4, 58000, 10, true),
                coal("coal_main", "main", 120, 1, 0.4, 0.35, 52000, 6, false),
                gas("gas_main", "main", 100, 1, 71000, 19000, 20)};
    d.renewables = {
        renewable("solar_a", "site_a", RenewableTech::solar, "cf_solar_a", 64000, 14000, 0, 600),
        renewable("wind_b", "site_b", RenewableTech::wind, "cf_wind_b", 88000, 26000, 25, 400)};
    d.libs = {lib("lib_a", "site_a")};
    d.tes_units = {tes("tes_coal_a", "coal_a", 58000)};
    d.dcs = {datacenter("dc_a", "site_a", 50)};
    d.series["main_demand"] = demand_series(260, 55, 25, 12, 101);
    d.series["cf_solar_a"] = solar_series(0.92, 0.25, 202);
    d.series["cf_wind_b"] = wind_series(0.38, 303);
    return d;
}

ScenarioConfig toy3_scenario() {
    ScenarioConfig c;
    c.storage_menu = {StorageKind::lib, StorageKind::tes};
    c.carbon_policy = CarbonPolicy::zero_carbon_hourly;
    c.flexibility_fraction = 0;
    c.voll_per_mwh = 9000;
    c.interest_rate = 0.04;
    c.representative_weeks = 2;
    c.solver = SolverChoice::builtin;
    c.relax_integrality = false;
    return c;
}

SystemData make_ercot_mini() {
    SystemData d;
    d.zones = {{"main", ZoneKind::main_system, "main_demand"},
               {"dc1", ZoneKind::dc_colocation, ""},
               {"dc2", ZoneKind::dc_colocation, ""},
               {"dc3", ZoneKind::dc_colocation, ""}};

    // remaining lives echo a 2..33 yr ladder; the three youngest plants host
    // the DCs, where a long-lived power block keeps the retrofit annuity low
    const int lives[12] = {2, 4, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33};
    const double sizes[12] = {620, 480, 750, 530, 680, 440, 800, 560, 710, 490, 640, 580};
    for (int i = 0; i < 12; ++i) {
        std::string id = "coal" + std::to_string(i + 1);
        std::string zone = i >= 9 ? "dc" + std::to_string(i - 8) : "main";
        double min_stable = i % 4 == 0 ? 0.3 : 0.0;  // a few units keep commitment floors
        double ramp = i < 2 ? 0.5 : 1.0;
        d.plants.push_back(coal(id, zone, sizes[i], 1, min_stable, ramp, 56000, lives[i], true));
        d.tes_units.push_back(tes("tes_" + id, id, 56000));
    }
    d.plants.push_back(gas("gas1", "main", 500, 2, 69000, 18000, 25));
    d.plants.push_back(gas("gas2", "main", 420, 2, 74000, 17500, 25));

    d.renewables = {
        renewable("solar_dc1", "dc1", RenewableTech::solar, "cf_solar_dc1", 29000, 7000, 0, 12000),
        renewable("solar_dc2", "dc2", RenewableTech::solar, "cf_solar_dc2", 30000, 7000, 0, 12000),
        renewable("solar_dc3", "dc3", RenewableTech::solar, "cf_solar_dc3", 31000, 7000, 0, 12000),
        renewable("solar_main", "main", RenewableTech::solar, "cf_solar_main", 61000, 12500, 150,
                  6000),
        renewable("wind_main", "main", RenewableTech::wind, "cf_wind_main", 86000, 24000, 400,
                  6000)};
    d.libs = {lib("lib_dc1", "dc1"), lib("lib_dc2", "dc2"), lib("lib_dc3", "dc3")};
    d.dcs = {datacenter("dcload1", "dc1", 1000), datacenter("dcload2", "dc2", 1000),
             datacenter("dcload3", "dc3", 1000)};

    d.series["main_demand"] = demand_series(5600, 1400, 700, 180, 11);
    d.series["cf_solar_dc1"] = solar_series(0.90, 0.22, 21);
    d.series["cf_solar_dc2"] = solar_series(0.93, 0.20, 22);
    d.series["cf_solar_dc3"] = solar_series(0.88, 0.24, 23);
    d.series["cf_solar_main"] = solar_series(0.91, 0.23, 24);
    d.series["cf_wind_main"] = wind_series(0.41, 25);
    return d;
}

ScenarioConfig ercot_scenario() {
    ScenarioConfig c;
    c.storage_menu = {StorageKind::lib, StorageKind::tes};
    c.carbon_policy = CarbonPolicy::zero_carbon_hourly;
    c.flexibility_fraction = 0;
    c.voll_per_mwh = 9000;
    c.interest_rate = 0.04;
    c.representative_weeks = 1;
    c.solver = SolverChoice::builtin;
    c.relax_integrality = true;  // LP studies; unit counts are few and near-integral
    return c;
}

void write_fixture(const SystemData& data, const ScenarioConfig& scenario, const fs::path& dir) {
    write_system(data, dir);
    save_scenario(scenario, dir / "scenario.json");

    // pin the k=1 model shape
    PreparedCase pc = prepare_case(data, scenario, 1, 0);
    MilpModel model = build_model(pc.data, pc.reduced, pc.config);
    nlohmann::json j;
    j["k"] = 1;
    j["hours"] = pc.reduced.total_hours();
    j["vars"] = model.vars.size();
    j["rows"] = model.rows.size();
    j["integers"] = model.num_integer_vars();
    j["nonzeros"] = model.num_nonzeros();
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
    std::printf("%s: %zu vars (%d integer), %zu rows, %zu nonzeros at k=1\n", dir.c_str(),
                model.vars.size(), model.num_integer_vars(), model.rows.size(),
                model.num_nonzeros());
}

}  // namespace

int main(int argc, char** argv) {
    fs::path root = argc > 1 ? argv[1] : "data";
    try {
        write_fixture(make_toy3(), toy3_scenario(), root / "toy3");
        write_fixture(make_ercot_mini(), ercot_scenario(), root / "ercot-mini");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fixture generation failed: %s\n", e.what());
        return 1;
    }
    return 0;
}
