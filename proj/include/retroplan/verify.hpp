#pragma once
// Post-solve audit. Walks the raw system data and a solution and re-derives
// every constraint from scratch — deliberately not reusing the model builder,
// so a bug there cannot hide from the checker. Also settles the annual carbon
// account and splits the objective into its cost blocks; the blocks sum back
// to the reported objective, which the tests lean on.

#include <cmath>
#include <string>
#include <vector>

#include "retroplan/domain.hpp"
#include "retroplan/tsreduce.hpp"

namespace retroplan {

namespace detail {

class FeasibilityAudit {
public:
    FeasibilityAudit(const SystemData& data, const ReducedSeries& reduced,
                     const ScenarioConfig& config, const Solution& sol, double tol)
        : data_(data), reduced_(reduced), config_(config), sol_(sol), tol_(tol) {
        T_ = reduced_.total_hours();
        hpp_ = reduced_.hours_per_period;
    }

    std::vector<Violation> run() {
        check_thermal();
        check_tes();
        check_lib();
        check_renewables();
        check_balance();
        check_dc();
        std::sort(out_.begin(), out_.end());
        return std::move(out_);
    }

private:
    double val(const std::string& key) const { return sol_.value_or(key, 0.0); }
    double slack_tol(double rhs) const { return tol_ * (1.0 + std::abs(rhs)); }
    int prev_hour(int t) const {
        int p = t / hpp_, h = t % hpp_;
        return p * hpp_ + (h == 0 ? hpp_ - 1 : h - 1);
    }

    void flag(const std::string& code, const std::string& subject, double lhs, double rhs,
              char sense) {
        bool bad = sense == '<' ? lhs > rhs + slack_tol(rhs)
                   : sense == '>' ? lhs < rhs - slack_tol(rhs)
                                  : std::abs(lhs - rhs) > slack_tol(rhs);
        if (bad)
            out_.push_back({code, subject,
                            "lhs=" + std::to_string(lhs) + " rhs=" + std::to_string(rhs) +
                                " sense=" + std::string(1, sense)});
    }

    void check_integral(const std::string& key) {
        if (config_.relax_integrality || !sol_.values.count(key)) return;
        double v = val(key);
        if (std::abs(v - std::round(v)) > 1e-6) out_.push_back({"integrality", key, "value=" + std::to_string(v)});
    }

    void check_thermal() {
        for (const auto& p : data_.plants) {
            double build = p.fuel == Fuel::gas ? val(keys::cap("gas_build", p.id)) : 0.0;
            double retire = val(keys::cap("retire", p.id));
            double retro = val(keys::cap("retrofit", p.id));
            if (p.fuel == Fuel::gas) check_integral(keys::cap("gas_build", p.id));
            check_integral(keys::cap("retire", p.id));
            check_integral(keys::cap("retrofit", p.id));
            flag("retire_limit", keys::cap("retire_limit", p.id), retire + retro,
                 p.existing_units + build, '<');
            flag("bound", keys::cap("retire", p.id), retire, 0, '>');
            flag("bound", keys::cap("retrofit", p.id), retro, 0, '>');
            flag("bound", keys::cap("gas_build", p.id), build, 0, '>');
            double net = p.existing_units + build - retire - retro;
            double cap = p.unit_size_mw * net;
            for (int t = 0; t < T_; ++t) {
                double d = val(keys::hourly("dispatch", p.id, t));
                flag("max_output", keys::hourly("max_output", p.id, t), d, cap, '<');
                flag("min_stable", keys::hourly("min_stable", p.id, t), d,
                     p.min_stable_fraction * cap, '>');
                double dprev = val(keys::hourly("dispatch", p.id, prev_hour(t)));
                if (T_ > 1) {
                    flag("ramp_up", keys::hourly("ramp_up", p.id, t), d - dprev,
                         p.ramp_up_fraction * p.unit_size_mw * net, '<');
                    flag("ramp_down", keys::hourly("ramp_down", p.id, t), dprev - d,
                         p.ramp_down_fraction * p.unit_size_mw * net, '<');
                }
            }
        }
    }

    void check_tes() {
        if (!config_.has_tes()) return;
        for (const auto& s : data_.tes_units) {
            const ThermalPlant* host = data_.find_plant(s.source_plant);
            double retro = val(keys::cap("retrofit", s.source_plant));
            double pch = val(keys::cap("tes_charge_cap", s.id));
            double pdis = val(keys::cap("tes_dis_cap", s.id));
            double en = val(keys::cap("tes_energy", s.id));
            flag("power_block_cap", keys::cap("power_block_cap", s.id), pdis,
                 host->unit_size_mw * retro, '<');
            flag("duration_min", keys::cap("duration_min", s.id), en, s.d_min_h * pdis, '>');
            flag("duration_max", keys::cap("duration_max", s.id), en, s.d_max_h * pdis, '<');
            for (int t = 0; t < T_; ++t) {
                double ch = val(keys::hourly("tes_charge", s.id, t));
                double dis = val(keys::hourly("tes_discharge", s.id, t));
                double soc = val(keys::hourly("tes_soc", s.id, t));
                double soc_prev = val(keys::hourly("tes_soc", s.id, prev_hour(t)));
                flag("bound", keys::hourly("tes_charge", s.id, t), ch, 0, '>');
                flag("bound", keys::hourly("tes_discharge", s.id, t), dis, 0, '>');
                flag("bound", keys::hourly("tes_soc", s.id, t), soc, 0, '>');
                flag("tes_charge_limit", keys::hourly("tes_charge_limit", s.id, t), ch, pch, '<');
                flag("tes_discharge_limit", keys::hourly("tes_discharge_limit", s.id, t), dis, pdis,
                     '<');
                flag("tes_soc_cap", keys::hourly("tes_soc_cap", s.id, t), soc, en, '<');
                flag("tes_soc_balance", keys::hourly("tes_soc_balance", s.id, t), soc,
                     soc_prev + s.charge_efficiency * ch - dis / s.discharge_efficiency -
                         s.self_discharge_per_h * en,
                     '=');
                if (T_ > 1) {
                    double dprev = val(keys::hourly("tes_discharge", s.id, prev_hour(t)));
                    flag("tes_ramp_up", keys::hourly("tes_ramp_up", s.id, t), dis - dprev,
                         host->ramp_up_fraction * host->unit_size_mw, '<');
                    flag("tes_ramp_down", keys::hourly("tes_ramp_down", s.id, t), dprev - dis,
                         host->ramp_down_fraction * host->unit_size_mw, '<');
                }
            }
        }
    }

    void check_lib() {
        if (!config_.has_lib()) return;
        for (const auto& s : data_.libs) {
            double power = val(keys::cap("lib_power", s.id));
            double energy = val(keys::cap("lib_energy", s.id));
            flag("bound", keys::cap("lib_power", s.id), power, 0, '>');
            flag("lib_energy_link", keys::cap("lib_energy_link", s.id), energy,
                 s.duration_h * power, '=');
            for (int t = 0; t < T_; ++t) {
                double ch = val(keys::hourly("lib_charge", s.id, t));
                double dis = val(keys::hourly("lib_discharge", s.id, t));
                double soc = val(keys::hourly("lib_soc", s.id, t));
                double soc_prev = val(keys::hourly("lib_soc", s.id, prev_hour(t)));
                flag("bound", keys::hourly("lib_charge", s.id, t), ch, 0, '>');
                flag("bound", keys::hourly("lib_discharge", s.id, t), dis, 0, '>');
                flag("bound", keys::hourly("lib_soc", s.id, t), soc, 0, '>');
                flag("lib_charge_limit", keys::hourly("lib_charge_limit", s.id, t), ch,
                     s.existing_power_mw + power, '<');
                flag("lib_discharge_limit", keys::hourly("lib_discharge_limit", s.id, t), dis,
                     s.existing_power_mw + power, '<');
                flag("lib_soc_cap", keys::hourly("lib_soc_cap", s.id, t), soc,
                     s.duration_h * s.existing_power_mw + energy, '<');
                flag("lib_soc_balance", keys::hourly("lib_soc_balance", s.id, t), soc,
                     soc_prev + s.charge_efficiency * ch - dis / s.discharge_efficiency, '=');
            }
        }
    }

    void check_renewables() {
        for (const auto& r : data_.renewables) {
            double inv = val(keys::cap("ren_invest", r.id));
            flag("bound", keys::cap("ren_invest", r.id), inv, 0, '>');
            flag("bound", keys::cap("ren_invest", r.id) + ":ub", inv, r.max_buildable_mw, '<');
            const auto& cf = reduced_.values(r.capacity_factor_series_ref);
            for (int t = 0; t < T_; ++t)
                flag("ren_inject_limit", keys::hourly("ren_inject_limit", r.id, t),
                     val(keys::hourly("ren_inject", r.id, t)), cf[t] * (r.existing_mw + inv), '<');
        }
    }

    double demand(int t) const {
        double d = 0;
        for (const auto& z : data_.zones)
            if (!z.demand_series_ref.empty()) d += reduced_.value(z.demand_series_ref, t);
        for (const auto& dc : data_.dcs) d += dc.load_mw;
        return d;
    }

    void check_balance() {
        for (int t = 0; t < T_; ++t) {
            double lhs = 0;
            for (const auto& p : data_.plants) lhs += val(keys::hourly("dispatch", p.id, t));
            for (const auto& r : data_.renewables) lhs += val(keys::hourly("ren_inject", r.id, t));
            if (config_.has_lib())
                for (const auto& s : data_.libs)
                    lhs += val(keys::hourly("lib_discharge", s.id, t)) -
                           val(keys::hourly("lib_charge", s.id, t));
            if (config_.has_tes())
                for (const auto& s : data_.tes_units)
                    lhs += val(keys::hourly("tes_discharge", s.id, t)) -
                           val(keys::hourly("tes_charge", s.id, t));
            double unmet = val(keys::hourly("unmet", t));
            flag("bound", keys::hourly("unmet", t), unmet, 0, '>');
            flag("bound", keys::hourly("unmet", t) + ":ub", unmet, demand(t), '<');
            flag("balance", keys::hourly("balance", t), lhs + unmet, demand(t), '=');
        }
    }

    void check_dc() {
        if (config_.carbon_policy != CarbonPolicy::zero_carbon_hourly) return;
        for (const auto& dc : data_.dcs) {
            double lambda = std::min(1.0 - config_.flexibility_fraction, dc.inflexible_fraction);
            auto clean = [&](int t) {
                double v = 0;
                for (const auto& r : data_.renewables)
                    if (r.zone == dc.zone)
                        v += reduced_.value(r.capacity_factor_series_ref, t) *
                             val(keys::cap("ren_invest", r.id));
                if (config_.has_lib())
                    for (const auto& s : data_.libs)
                        if (s.zone == dc.zone)
                            v += val(keys::hourly("lib_discharge", s.id, t)) -
                                 val(keys::hourly("lib_charge", s.id, t));
                if (config_.has_tes())
                    for (const auto& s : data_.tes_units)
                        if (data_.tes_zone(s) == dc.zone)
                            v += val(keys::hourly("tes_discharge", s.id, t)) -
                                 val(keys::hourly("tes_charge", s.id, t));
                return v;
            };
            for (int t = 0; t < T_; ++t) {
                flag("hourly_matching", keys::hourly("hourly_matching", dc.zone, t), clean(t),
                     lambda * dc.load_mw, '>');
                if (config_.has_tes()) {
                    double ch = 0, ren = 0;
                    for (const auto& s : data_.tes_units)
                        if (data_.tes_zone(s) == dc.zone)
                            ch += val(keys::hourly("tes_charge", s.id, t));
                    for (const auto& r : data_.renewables)
                        if (r.zone == dc.zone)
                            ren += reduced_.value(r.capacity_factor_series_ref, t) *
                                   val(keys::cap("ren_invest", r.id));
                    flag("charge_limit", keys::hourly("charge_limit", dc.zone, t), ch, ren, '<');
                }
            }
            int H = dc.flexibility_window_h;
            for (int p = 0; p < reduced_.k; ++p)
                for (int w0 = 0; w0 + H <= hpp_; w0 += H) {
                    double lhs = 0;
                    for (int h = 0; h < H; ++h) lhs += clean(p * hpp_ + w0 + h);
                    int w = p * (hpp_ / H) + w0 / H;
                    flag("daily_energy", keys::cap("daily_energy", dc.zone + ",w=" + std::to_string(w)),
                         lhs, H * dc.load_mw, '>');
                }
        }
    }

    const SystemData& data_;
    const ReducedSeries& reduced_;
    const ScenarioConfig& config_;
    const Solution& sol_;
    double tol_;
    int T_ = 0, hpp_ = 0;
    std::vector<Violation> out_;
};

}  // namespace detail

// Re-derives every constraint from the raw data; returns sorted violations.
// Row tolerance is tol*(1+|rhs|).
inline std::vector<Violation> check_feasibility(const SystemData& data, const ReducedSeries& reduced,
                                                const ScenarioConfig& config, const Solution& sol,
                                                double tol = 1e-6) {
    return detail::FeasibilityAudit(data, reduced, config, sol, tol).run();
}

// Annual emissions in tCO2: weighted thermal dispatch times each plant's
// emission factor.
inline double carbon_account(const SystemData& data, const ReducedSeries& reduced,
                             const Solution& sol) {
    double tco2 = 0;
    int T = reduced.total_hours();
    int hpp = reduced.hours_per_period;
    for (const auto& p : data.plants) {
        double ef = p.emission_t_per_mwh();
        if (ef == 0) continue;
        for (int t = 0; t < T; ++t)
            tco2 += reduced.weight(t / hpp) * ef *
                    sol.value_or(keys::hourly("dispatch", p.id, t), 0.0);
    }
    return tco2;
}

// Splits annual cost into the same blocks the objective is built from; the
// blocks sum to the objective value for any feasible solution.
inline CostBreakdown cost_breakdown(const SystemData& data, const ReducedSeries& reduced,
                                    const ScenarioConfig& config, const Solution& sol) {
    CostBreakdown b;
    int T = reduced.total_hours();
    int hpp = reduced.hours_per_period;
    auto w = [&](int t) { return reduced.weight(t / hpp); };

    for (const auto& p : data.plants) {
        double build = p.fuel == Fuel::gas ? sol.value_or(keys::cap("gas_build", p.id), 0.0) : 0.0;
        double retire = sol.value_or(keys::cap("retire", p.id), 0.0);
        double retro = sol.value_or(keys::cap("retrofit", p.id), 0.0);
        double net = p.existing_units + build - retire - retro;
        if (p.fuel == Fuel::gas)
            b.thermal_capacity += *p.inv_cost_annualized_per_mw * p.unit_size_mw * build;
        b.thermal_capacity += p.fom_per_mw * p.unit_size_mw * net;
        double vcost = p.vom_per_mwh + p.fuel_price_per_mwh();
        for (int t = 0; t < T; ++t)
            b.thermal_variable += w(t) * vcost * sol.value_or(keys::hourly("dispatch", p.id, t), 0.0);
    }
    for (const auto& r : data.renewables) {
        double inv = sol.value_or(keys::cap("ren_invest", r.id), 0.0);
        b.renewable_capacity +=
            r.inv_cost_annualized_per_mw * inv + r.fom_per_mw * (r.existing_mw + inv);
    }
    if (config.has_lib())
        for (const auto& s : data.libs) {
            double power = sol.value_or(keys::cap("lib_power", s.id), 0.0);
            b.lib_capacity += s.inv_power_per_mw * power +
                              s.inv_energy_per_mwh * sol.value_or(keys::cap("lib_energy", s.id), 0.0) +
                              s.fom_per_mw * (s.existing_power_mw + power);
        }
    if (config.has_tes())
        for (const auto& s : data.tes_units) {
            double pdis = sol.value_or(keys::cap("tes_dis_cap", s.id), 0.0);
            b.tes_capacity += s.inv_charge_per_mw * sol.value_or(keys::cap("tes_charge_cap", s.id), 0.0) +
                              s.inv_retrofit_per_mw * pdis + s.fom_per_mw * pdis +
                              s.inv_energy_per_mwhth * sol.value_or(keys::cap("tes_energy", s.id), 0.0);
            for (int t = 0; t < T; ++t)
                b.tes_variable += w(t) * s.vom_discharge_per_mwh *
                                  sol.value_or(keys::hourly("tes_discharge", s.id, t), 0.0);
        }
    for (int t = 0; t < T; ++t)
        b.load_shedding += w(t) * config.voll_per_mwh * sol.value_or(keys::hourly("unmet", t), 0.0);
    return b;
}

}  // namespace retroplan
