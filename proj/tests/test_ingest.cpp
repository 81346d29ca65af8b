#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "support.hpp"

using namespace retroplan;

namespace {

bool same_system(const SystemData& a, const SystemData& b) {
    if (a.zones.size() != b.zones.size() || a.plants.size() != b.plants.size() ||
        a.renewables.size() != b.renewables.size() || a.libs.size() != b.libs.size() ||
        a.tes_units.size() != b.tes_units.size() || a.dcs.size() != b.dcs.size())
        return false;
    for (size_t i = 0; i < a.plants.size(); ++i) {
        const auto &p = a.plants[i], &q = b.plants[i];
        if (p.id != q.id || p.zone != q.zone || p.fuel != q.fuel ||
            p.unit_size_mw != q.unit_size_mw || p.existing_units != q.existing_units ||
            p.min_stable_fraction != q.min_stable_fraction ||
            p.heat_rate_mmbtu_per_mwh != q.heat_rate_mmbtu_per_mwh ||
            p.inv_cost_annualized_per_mw != q.inv_cost_annualized_per_mw ||
            p.retrofittable != q.retrofittable || p.remaining_life_yr != q.remaining_life_yr)
            return false;
    }
    for (size_t i = 0; i < a.tes_units.size(); ++i) {
        const auto &s = a.tes_units[i], &u = b.tes_units[i];
        if (s.id != u.id || s.source_plant != u.source_plant ||
            s.overnight_energy_per_kwhth != u.overnight_energy_per_kwhth ||
            s.d_max_h != u.d_max_h || s.vom_discharge_per_mwh != u.vom_discharge_per_mwh)
            return false;
    }
    if (a.series.size() != b.series.size()) return false;
    for (const auto& [id, v] : a.series) {
        auto it = b.series.find(id);
        if (it == b.series.end() || it->second != v) return false;
    }
    return true;
}

void corrupt(const std::filesystem::path& file, const std::string& from, const std::string& to) {
    std::ifstream in(file);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = body.find(from);
    REQUIRE(pos != std::string::npos);
    body.replace(pos, from.size(), to);
    std::ofstream(file) << body;
}

}  // namespace

TEST_CASE("system directory round trip", "[ingest]") {
    testsup::TempDir dir("ing1");
    auto d = testsup::small_system();
    write_system(d, dir.path);
    auto back = load_system(dir.path);
    CHECK(same_system(d, back));
}

TEST_CASE("loader reports dangling references", "[ingest]") {
    testsup::TempDir dir("ing2");
    auto d = testsup::small_system();
    d.plants[0].zone = "ghost_zone";
    write_system(d, dir.path);
    CHECK_THROWS_AS(load_system(dir.path), DanglingReference);
}

TEST_CASE("loader rejects schema problems with file and line", "[ingest]") {
    testsup::TempDir dir("ing3");
    write_system(testsup::small_system(), dir.path);

    SECTION("bad fuel enum") {
        corrupt(dir.path / "plants.csv", "coal1,site,coal", "coal1,site,oil");
        CHECK_THROWS_WITH(load_system(dir.path), Catch::Matchers::ContainsSubstring("plants.csv"));
    }
    SECTION("unknown column") {
        corrupt(dir.path / "zones.csv", "id,kind", "id,color,kind");
        CHECK_THROWS_AS(load_system(dir.path), SchemaError);
    }
    SECTION("non-numeric value") {
        corrupt(dir.path / "dcs.csv", "20", "twenty");
        CHECK_THROWS_AS(load_system(dir.path), SchemaError);
    }
    SECTION("missing file") {
        std::filesystem::remove(dir.path / "dcs.csv");
        CHECK_THROWS_AS(load_system(dir.path), MissingFile);
    }
    SECTION("short series") {
        auto f = dir.path / "series" / "demand.csv";
        std::ofstream(f) << "value\n1\n2\n";
        CHECK_THROWS_AS(load_system(dir.path), SchemaError);
    }
}

TEST_CASE("storage rows enforce per-kind emptiness", "[ingest]") {
    testsup::TempDir dir("ing4");
    write_system(testsup::small_system(), dir.path);
    // lib1 row gains a source_plant entry, which belongs to tes rows only
    corrupt(dir.path / "storage.csv", "lib1,lib,site,", "lib1,lib,site,coal1");
    CHECK_THROWS_WITH(load_system(dir.path), Catch::Matchers::ContainsSubstring("source_plant"));
}

TEST_CASE("scenario json round trip", "[ingest]") {
    testsup::TempDir dir("ing5");
    auto c = testsup::small_scenario();
    c.flexibility_fraction = 0.2;
    c.relax_integrality = true;
    c.solver = SolverChoice::mps_export;
    save_scenario(c, dir.path / "scenario.json");
    auto back = load_scenario(dir.path / "scenario.json");
    CHECK(back.storage_menu == c.storage_menu);
    CHECK(back.carbon_policy == c.carbon_policy);
    CHECK(back.flexibility_fraction == c.flexibility_fraction);
    CHECK(back.voll_per_mwh == c.voll_per_mwh);
    CHECK(back.interest_rate == c.interest_rate);
    CHECK(back.representative_weeks == c.representative_weeks);
    CHECK(back.solver == c.solver);
    CHECK(back.relax_integrality == c.relax_integrality);
}

TEST_CASE("scenario json is strict about its keys", "[ingest]") {
    testsup::TempDir dir("ing6");
    auto path = dir.path / "scenario.json";

    SECTION("unknown key") {
        std::ofstream(path) << R"({"storage_menu":[],"carbon_policy":"unconstrained",
            "flexibility_fraction":0,"voll_per_mwh":9000,"interest_rate":0.04,
            "representative_weeks":2,"solver":"builtin","relax_integrality":false,
            "extra_knob":1})";
        CHECK_THROWS_WITH(load_scenario(path), Catch::Matchers::ContainsSubstring("extra_knob"));
    }
    SECTION("missing key") {
        std::ofstream(path) << R"({"storage_menu":[],"carbon_policy":"unconstrained",
            "flexibility_fraction":0,"voll_per_mwh":9000,"interest_rate":0.04,
            "representative_weeks":2,"solver":"builtin"})";
        CHECK_THROWS_WITH(load_scenario(path),
                          Catch::Matchers::ContainsSubstring("relax_integrality"));
    }
    SECTION("bad enum value") {
        std::ofstream(path) << R"({"storage_menu":["flywheel"],"carbon_policy":"unconstrained",
            "flexibility_fraction":0,"voll_per_mwh":9000,"interest_rate":0.04,
            "representative_weeks":2,"solver":"builtin","relax_integrality":false})";
        CHECK_THROWS_AS(load_scenario(path), ConfigError);
    }
    SECTION("not json") {
        std::ofstream(path) << "solver=builtin";
        CHECK_THROWS_AS(load_scenario(path), ConfigError);
    }
    SECTION("missing file") { CHECK_THROWS_AS(load_scenario(dir.path / "nope.json"), MissingFile); }
}

TEST_CASE("hourly key split and join", "[ingest]") {
    std::string base;
    int hour = -1;
    REQUIRE(detail::split_hourly_key("dispatch[coal1,t=17]", base, hour));
    CHECK(base == "dispatch[coal1]");
    CHECK(hour == 17);
    CHECK(detail::join_hourly_key(base, hour) == "dispatch[coal1,t=17]");

    REQUIRE(detail::split_hourly_key("unmet[t=3]", base, hour));
    CHECK(base == "unmet");
    CHECK(hour == 3);
    CHECK(detail::join_hourly_key(base, hour) == "unmet[t=3]");

    CHECK_FALSE(detail::split_hourly_key("retire[coal1]", base, hour));
}

TEST_CASE("solution artifacts round trip", "[ingest]") {
    testsup::TempDir dir("ing7");
    Solution sol;
    sol.objective_usd_per_yr = 123456.75;
    sol.breakdown.thermal_capacity = 100000;
    sol.breakdown.renewable_capacity = 20000;
    sol.breakdown.thermal_variable = 3456.75;
    sol.annual_emissions_tco2 = 999.5;
    sol.values["retire[coal1]"] = 1;
    sol.values["ren_invest[solar1]"] = 55.25;
    sol.values["dispatch[coal1,t=0]"] = 80.5;
    sol.values["dispatch[coal1,t=1]"] = 81.5;
    sol.values["unmet[t=0]"] = 0;
    write_solution(sol, dir.path);

    for (const char* f : {"capacities.csv", "dispatch.csv", "costs.json", "emissions.json"})
        CHECK(std::filesystem::exists(dir.path / f));

    auto back = read_solution(dir.path);
    CHECK(back.objective_usd_per_yr == sol.objective_usd_per_yr);
    CHECK(back.breakdown.thermal_variable == sol.breakdown.thermal_variable);
    CHECK(back.annual_emissions_tco2 == sol.annual_emissions_tco2);
    CHECK(back.values == sol.values);

    // capacities.csv holds only non-hourly keys
    auto caps = csv::read_table(dir.path / "capacities.csv");
    CHECK(caps.rows.size() == 2);
    // dispatch.csv rows are ordered by variable then hour
    auto disp = csv::read_table(dir.path / "dispatch.csv");
    REQUIRE(disp.rows.size() == 3);
    CHECK(disp.cell(0, 1) == "dispatch[coal1]");
    CHECK(disp.cell(0, 0) == "0");
    CHECK(disp.cell(1, 0) == "1");
    CHECK(disp.cell(2, 1) == "unmet");
}
