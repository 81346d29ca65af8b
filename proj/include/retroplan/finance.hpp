#pragma once
// Capital recovery factor and per-plant retrofit cost schedules.
// Overnight component costs are annualized over the host plant's
// remaining life; other technologies arrive already annualized.

#include <cmath>

#include "retroplan/domain.hpp"
#include "retroplan/errors.hpp"

namespace retroplan {

// Equivalent annual payment per unit of overnight capital at interest
// rate `rate` over `years`. rate = 0 degenerates to straight-line 1/n.
inline double crf(double rate, int years) {
    if (years < 1) throw DomainError("crf: years must be >= 1");
    if (rate < 0) throw DomainError("crf: rate must be >= 0");
    if (rate == 0) return 1.0 / years;
    double growth = std::pow(1.0 + rate, years);
    return rate * growth / (growth - 1.0);
}

struct RetrofitCosts {
    double inv_charge_per_mw = 0;    // $/MW-yr, electric heater
    double inv_retrofit_per_mw = 0;  // $/MW-yr, turbine refurbishment
    double inv_energy_per_mwhth = 0; // $/MWh_th-yr, molten-salt tank
};

// $/kW and $/kWh_th overnight costs -> annualized $/MW-yr and $/MWh_th-yr.
inline RetrofitCosts annualize_retrofit(const TesSpec& tes, const ThermalPlant& plant, double rate) {
    if (plant.remaining_life_yr < 1)
        throw DomainError("annualize_retrofit: plant '" + plant.id + "' has no remaining life");
    double f = crf(rate, plant.remaining_life_yr);
    RetrofitCosts out;
    out.inv_charge_per_mw = tes.overnight_charge_per_kw * f * 1000.0;
    out.inv_retrofit_per_mw = tes.overnight_retrofit_per_kw * f * 1000.0;
    out.inv_energy_per_mwhth = tes.overnight_energy_per_kwhth * f * 1000.0;
    return out;
}

// Returns a copy of the system with every TES unit's annualized
// investment fields filled in from its overnight costs.
inline SystemData apply_retrofit_costs(const SystemData& data, double rate) {
    SystemData out = data;
    for (auto& tes : out.tes_units) {
        const ThermalPlant* host = out.find_plant(tes.source_plant);
        if (!host) throw DanglingReference("TES '" + tes.id + "' references unknown plant");
        RetrofitCosts c = annualize_retrofit(tes, *host, rate);
        tes.inv_charge_per_mw = c.inv_charge_per_mw;
        tes.inv_retrofit_per_mw = c.inv_retrofit_per_mw;
        tes.inv_energy_per_mwhth = c.inv_energy_per_mwhth;
    }
    return out;
}

}  // namespace retroplan
