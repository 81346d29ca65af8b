#pragma once
// Translates SystemData + ReducedSeries + ScenarioConfig into a sparse MILP:
// named variable registry, linear constraint rows and objective.
//
// Thermal units run linear unit commitment: every non-retired unit is
// committed each hour, output between the minimum stable level and the net
// operating capacity. Coal can retire or retrofit; gas can build or retire.
// Retrofitted storage discharges through the former plant's power block.
// Storage state of charge is periodic within each representative week, and
// ramp windows wrap the same way, so no energy leaks across unlinked weeks.
//
// A retrofit count variable exists only when the plant is retrofittable, a
// TES unit references it, and TES is on the storage menu; otherwise the net
// capacity expression simply omits the term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "retroplan/domain.hpp"
#include "retroplan/errors.hpp"
#include "retroplan/tsreduce.hpp"

namespace retroplan {

enum class VarKind { continuous, integer };
enum class Sense { le, eq, ge };

constexpr double kInf = 1e30;

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0;
    double upper = kInf;
    double obj = 0;

    bool operator==(const Variable&) const = default;
};

struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;  // column -> coefficient, sorted by column
    Sense sense = Sense::le;
    double rhs = 0;

    bool operator==(const Row&) const = default;
};

struct MilpModel {
    std::vector<Variable> vars;
    std::vector<Row> rows;
    double obj_constant = 0;
    std::unordered_map<std::string, int> registry;  // semantic key -> column

    int col(const std::string& key) const {
        auto it = registry.find(key);
        if (it == registry.end()) throw MissingVariable("model has no variable '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return registry.count(key) > 0; }

    int add_var(const std::string& key, VarKind kind, double lower, double upper, double obj = 0) {
        if (registry.count(key)) throw DomainError("duplicate variable key '" + key + "'");
        int idx = static_cast<int>(vars.size());
        vars.push_back({key, kind, lower, upper, obj});
        registry.emplace(key, idx);
        return idx;
    }

    void add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs, Sense sense,
                 double rhs) {
        std::sort(coeffs.begin(), coeffs.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [c, v] : coeffs) {
            if (!std::isfinite(v)) throw DomainError("non-finite coefficient in row '" + name + "'");
            if (!merged.empty() && merged.back().first == c)
                merged.back().second += v;
            else
                merged.emplace_back(c, v);
        }
        std::erase_if(merged, [](const auto& cv) { return cv.second == 0.0; });
        rows.push_back({name, std::move(merged), sense, rhs});
    }

    int num_integer_vars() const {
        int n = 0;
        for (const auto& v : vars) n += v.kind == VarKind::integer;
        return n;
    }
    size_t num_nonzeros() const {
        size_t n = 0;
        for (const auto& r : rows) n += r.coeffs.size();
        return n;
    }

    bool structurally_equal(const MilpModel& o) const {
        return vars == o.vars && rows == o.rows && obj_constant == o.obj_constant;
    }
};

class ModelBuilder {
public:
    ModelBuilder(const SystemData& data, const ReducedSeries& reduced, const ScenarioConfig& config)
        : data_(data), reduced_(reduced), config_(config) {
        T_ = reduced_.total_hours();
        hpp_ = reduced_.hours_per_period;
        plants_ = sorted_by_id(data_.plants);
        renewables_ = sorted_by_id(data_.renewables);
        libs_ = config_.has_lib() ? sorted_by_id(data_.libs) : std::vector<LibSpec>{};
        tes_ = config_.has_tes() ? sorted_by_id(data_.tes_units) : std::vector<TesSpec>{};
        dcs_ = sorted_by_id(data_.dcs);
        for (const auto& s : tes_) tes_by_plant_[s.source_plant].push_back(s.id);
    }

    // ---- pipeline ----
    MilpModel build() {
        create_variables();
        build_objective();
        add_thermal_constraints();
        add_tes_constraints();
        add_lib_constraints();
        add_balance_constraints();
        add_dc_constraints();
        return std::move(m_);
    }

    // ---- pieces, callable individually from tests ----
    void create_variables() {
        VarKind icount = config_.relax_integrality ? VarKind::continuous : VarKind::integer;
        for (const auto& p : plants_) {
            if (p.fuel == Fuel::gas)
                m_.add_var(keys::cap("gas_build", p.id), icount, 0, kInf);
            m_.add_var(keys::cap("retire", p.id), icount, 0, p.existing_units);
            if (has_retrofit(p)) m_.add_var(keys::cap("retrofit", p.id), icount, 0, p.existing_units);
        }
        for (const auto& r : renewables_)
            m_.add_var(keys::cap("ren_invest", r.id), VarKind::continuous, 0, r.max_buildable_mw);
        for (const auto& s : libs_) {
            m_.add_var(keys::cap("lib_power", s.id), VarKind::continuous, 0, kInf);
            m_.add_var(keys::cap("lib_energy", s.id), VarKind::continuous, 0, kInf);
        }
        for (const auto& s : tes_) {
            m_.add_var(keys::cap("tes_charge_cap", s.id), VarKind::continuous, 0, kInf);
            m_.add_var(keys::cap("tes_dis_cap", s.id), VarKind::continuous, 0, kInf);
            m_.add_var(keys::cap("tes_energy", s.id), VarKind::continuous, 0, kInf);
        }
        for (const auto& p : plants_)
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("dispatch", p.id, t), VarKind::continuous, 0, kInf);
        for (const auto& r : renewables_)
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("ren_inject", r.id, t), VarKind::continuous, 0,
                           cf(r, t) * (r.existing_mw + r.max_buildable_mw));
        for (const auto& s : libs_) {
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("lib_charge", s.id, t), VarKind::continuous, 0, kInf);
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("lib_discharge", s.id, t), VarKind::continuous, 0, kInf);
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("lib_soc", s.id, t), VarKind::continuous, 0, kInf);
        }
        for (const auto& s : tes_) {
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("tes_charge", s.id, t), VarKind::continuous, 0, kInf);
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("tes_discharge", s.id, t), VarKind::continuous, 0, kInf);
            for (int t = 0; t < T_; ++t)
                m_.add_var(keys::hourly("tes_soc", s.id, t), VarKind::continuous, 0, kInf);
        }
        for (int t = 0; t < T_; ++t)
            m_.add_var(keys::hourly("unmet", t), VarKind::continuous, 0, demand(t));
    }

    void build_objective() {
        auto& vars = m_.vars;
        for (const auto& p : plants_) {
            double size = p.unit_size_mw;
            if (p.fuel == Fuel::gas)
                vars[m_.col(keys::cap("gas_build", p.id))].obj +=
                    (*p.inv_cost_annualized_per_mw + p.fom_per_mw) * size;
            vars[m_.col(keys::cap("retire", p.id))].obj += -p.fom_per_mw * size;
            if (has_retrofit(p)) vars[m_.col(keys::cap("retrofit", p.id))].obj += -p.fom_per_mw * size;
            m_.obj_constant += p.fom_per_mw * size * p.existing_units;
            double vcost = p.vom_per_mwh + p.fuel_price_per_mwh();
            for (int t = 0; t < T_; ++t)
                vars[m_.col(keys::hourly("dispatch", p.id, t))].obj += weight(t) * vcost;
        }
        for (const auto& r : renewables_) {
            vars[m_.col(keys::cap("ren_invest", r.id))].obj +=
                r.inv_cost_annualized_per_mw + r.fom_per_mw;
            m_.obj_constant += r.fom_per_mw * r.existing_mw;
        }
        for (const auto& s : libs_) {
            vars[m_.col(keys::cap("lib_power", s.id))].obj += s.inv_power_per_mw + s.fom_per_mw;
            vars[m_.col(keys::cap("lib_energy", s.id))].obj += s.inv_energy_per_mwh;
            m_.obj_constant += s.fom_per_mw * s.existing_power_mw;
        }
        for (const auto& s : tes_) {
            vars[m_.col(keys::cap("tes_charge_cap", s.id))].obj += s.inv_charge_per_mw;
            vars[m_.col(keys::cap("tes_dis_cap", s.id))].obj += s.inv_retrofit_per_mw + s.fom_per_mw;
            vars[m_.col(keys::cap("tes_energy", s.id))].obj += s.inv_energy_per_mwhth;
            for (int t = 0; t < T_; ++t)
                vars[m_.col(keys::hourly("tes_discharge", s.id, t))].obj +=
                    weight(t) * s.vom_discharge_per_mwh;
        }
        for (int t = 0; t < T_; ++t)
            vars[m_.col(keys::hourly("unmet", t))].obj += weight(t) * config_.voll_per_mwh;
    }

    void add_thermal_constraints() {
        for (const auto& p : plants_) {
            // net units = existing + builds - retirements - retrofits, as coefficients
            auto net_units = [&](double scale) {
                std::vector<std::pair<int, double>> c;
                if (p.fuel == Fuel::gas) c.emplace_back(m_.col(keys::cap("gas_build", p.id)), scale);
                c.emplace_back(m_.col(keys::cap("retire", p.id)), -scale);
                if (has_retrofit(p)) c.emplace_back(m_.col(keys::cap("retrofit", p.id)), -scale);
                return c;
            };
            {
                // retired + retrofitted units cannot exceed what exists (plus gas builds)
                auto c = net_units(-1.0);
                m_.add_row(keys::cap("retire_limit", p.id), std::move(c), Sense::le, p.existing_units);
            }
            double size = p.unit_size_mw;
            for (int t = 0; t < T_; ++t) {
                int pd = m_.col(keys::hourly("dispatch", p.id, t));
                {
                    auto c = net_units(-size);
                    c.emplace_back(pd, 1.0);
                    m_.add_row(keys::hourly("max_output", p.id, t), std::move(c), Sense::le,
                               size * p.existing_units);
                }
                if (p.min_stable_fraction > 0) {
                    auto c = net_units(-p.min_stable_fraction * size);
                    c.emplace_back(pd, 1.0);
                    m_.add_row(keys::hourly("min_stable", p.id, t), std::move(c), Sense::ge,
                               p.min_stable_fraction * size * p.existing_units);
                }
                int prev = m_.col(keys::hourly("dispatch", p.id, prev_hour(t)));
                if (prev != pd && p.ramp_up_fraction < 1.0) {
                    auto c = net_units(-p.ramp_up_fraction * size);
                    c.emplace_back(pd, 1.0);
                    c.emplace_back(prev, -1.0);
                    m_.add_row(keys::hourly("ramp_up", p.id, t), std::move(c), Sense::le,
                               p.ramp_up_fraction * size * p.existing_units);
                }
                if (prev != pd && p.ramp_down_fraction < 1.0) {
                    auto c = net_units(-p.ramp_down_fraction * size);
                    c.emplace_back(pd, -1.0);
                    c.emplace_back(prev, 1.0);
                    m_.add_row(keys::hourly("ramp_down", p.id, t), std::move(c), Sense::le,
                               p.ramp_down_fraction * size * p.existing_units);
                }
            }
        }
    }

    void add_tes_constraints() {
        for (const auto& s : tes_) {
            const ThermalPlant& host = *data_.find_plant(s.source_plant);
            int pch = m_.col(keys::cap("tes_charge_cap", s.id));
            int pdis = m_.col(keys::cap("tes_dis_cap", s.id));
            int en = m_.col(keys::cap("tes_energy", s.id));

            // discharge capacity is limited by the retrofitted power block
            {
                std::vector<std::pair<int, double>> c{{pdis, 1.0}};
                if (has_retrofit(host))
                    c.emplace_back(m_.col(keys::cap("retrofit", host.id)), -host.unit_size_mw);
                m_.add_row(keys::cap("power_block_cap", s.id), std::move(c), Sense::le, 0);
            }
            m_.add_row(keys::cap("duration_min", s.id), {{en, 1.0}, {pdis, -s.d_min_h}}, Sense::ge, 0);
            m_.add_row(keys::cap("duration_max", s.id), {{en, 1.0}, {pdis, -s.d_max_h}}, Sense::le, 0);

            for (int t = 0; t < T_; ++t) {
                int ch = m_.col(keys::hourly("tes_charge", s.id, t));
                int dis = m_.col(keys::hourly("tes_discharge", s.id, t));
                int soc = m_.col(keys::hourly("tes_soc", s.id, t));
                int soc_prev = m_.col(keys::hourly("tes_soc", s.id, prev_hour(t)));

                m_.add_row(keys::hourly("tes_charge_limit", s.id, t), {{ch, 1.0}, {pch, -1.0}},
                           Sense::le, 0);
                m_.add_row(keys::hourly("tes_discharge_limit", s.id, t), {{dis, 1.0}, {pdis, -1.0}},
                           Sense::le, 0);
                m_.add_row(keys::hourly("tes_soc_cap", s.id, t), {{soc, 1.0}, {en, -1.0}}, Sense::le,
                           0);
                // E_t = E_{t-1} + eta_ch * charge - discharge / eta_dis - eta_self * E_cap
                m_.add_row(keys::hourly("tes_soc_balance", s.id, t),
                           {{soc, 1.0},
                            {soc_prev, -1.0},
                            {ch, -s.charge_efficiency},
                            {dis, 1.0 / s.discharge_efficiency},
                            {en, s.self_discharge_per_h}},
                           Sense::eq, 0);

                // power block ramps, sized by the host plant's unit
                int dis_prev = m_.col(keys::hourly("tes_discharge", s.id, prev_hour(t)));
                if (dis_prev != dis && host.ramp_up_fraction < host.existing_units)
                    m_.add_row(keys::hourly("tes_ramp_up", s.id, t), {{dis, 1.0}, {dis_prev, -1.0}},
                               Sense::le, host.ramp_up_fraction * host.unit_size_mw);
                if (dis_prev != dis && host.ramp_down_fraction < host.existing_units)
                    m_.add_row(keys::hourly("tes_ramp_down", s.id, t), {{dis, -1.0}, {dis_prev, 1.0}},
                               Sense::le, host.ramp_down_fraction * host.unit_size_mw);
            }
        }
    }

    void add_lib_constraints() {
        for (const auto& s : libs_) {
            int power = m_.col(keys::cap("lib_power", s.id));
            int energy = m_.col(keys::cap("lib_energy", s.id));
            // invested energy is tied to invested power at the fixed duration
            m_.add_row(keys::cap("lib_energy_link", s.id), {{energy, 1.0}, {power, -s.duration_h}},
                       Sense::eq, 0);
            for (int t = 0; t < T_; ++t) {
                int ch = m_.col(keys::hourly("lib_charge", s.id, t));
                int dis = m_.col(keys::hourly("lib_discharge", s.id, t));
                int soc = m_.col(keys::hourly("lib_soc", s.id, t));
                int soc_prev = m_.col(keys::hourly("lib_soc", s.id, prev_hour(t)));

                m_.add_row(keys::hourly("lib_charge_limit", s.id, t), {{ch, 1.0}, {power, -1.0}},
                           Sense::le, s.existing_power_mw);
                m_.add_row(keys::hourly("lib_discharge_limit", s.id, t), {{dis, 1.0}, {power, -1.0}},
                           Sense::le, s.existing_power_mw);
                m_.add_row(keys::hourly("lib_soc_cap", s.id, t), {{soc, 1.0}, {energy, -1.0}},
                           Sense::le, s.duration_h * s.existing_power_mw);
                m_.add_row(keys::hourly("lib_soc_balance", s.id, t),
                           {{soc, 1.0},
                            {soc_prev, -1.0},
                            {ch, -s.charge_efficiency},
                            {dis, 1.0 / s.discharge_efficiency}},
                           Sense::eq, 0);
            }
        }
    }

    void add_balance_constraints() {
        for (const auto& r : renewables_)
            for (int t = 0; t < T_; ++t)
                m_.add_row(keys::hourly("ren_inject_limit", r.id, t),
                           {{m_.col(keys::hourly("ren_inject", r.id, t)), 1.0},
                            {m_.col(keys::cap("ren_invest", r.id)), -cf(r, t)}},
                           Sense::le, cf(r, t) * r.existing_mw);

        for (int t = 0; t < T_; ++t) {
            std::vector<std::pair<int, double>> c;
            for (const auto& p : plants_) c.emplace_back(m_.col(keys::hourly("dispatch", p.id, t)), 1.0);
            for (const auto& r : renewables_)
                c.emplace_back(m_.col(keys::hourly("ren_inject", r.id, t)), 1.0);
            for (const auto& s : libs_) {
                c.emplace_back(m_.col(keys::hourly("lib_discharge", s.id, t)), 1.0);
                c.emplace_back(m_.col(keys::hourly("lib_charge", s.id, t)), -1.0);
            }
            for (const auto& s : tes_) {
                c.emplace_back(m_.col(keys::hourly("tes_discharge", s.id, t)), 1.0);
                c.emplace_back(m_.col(keys::hourly("tes_charge", s.id, t)), -1.0);
            }
            c.emplace_back(m_.col(keys::hourly("unmet", t)), 1.0);
            m_.add_row(keys::hourly("balance", t), std::move(c), Sense::eq, demand(t));
        }
    }

    void add_dc_constraints() {
        if (config_.carbon_policy != CarbonPolicy::zero_carbon_hourly) return;
        for (const auto& dc : dcs_) {
            auto zr = zone_renewables(dc.zone);
            auto zlib = zone_libs(dc.zone);
            auto ztes = zone_tes(dc.zone);
            if (dc.load_mw > 0 && zr.empty() && zlib.empty() && ztes.empty())
                throw ConfigError("zero-carbon matching needs co-located assets in zone '" + dc.zone +
                                  "' for DC '" + dc.id + "'");
            // a DC is at least as flexible as its own data says; the scenario
            // knob can only raise flexibility further
            double lambda = std::min(1.0 - config_.flexibility_fraction, dc.inflexible_fraction);

            for (int t = 0; t < T_; ++t) {
                // clean supply from newly invested renewables and storage must
                // cover the inflexible share every hour
                std::vector<std::pair<int, double>> c;
                for (const auto* r : zr)
                    c.emplace_back(m_.col(keys::cap("ren_invest", r->id)), cf(*r, t));
                for (const auto* s : zlib) {
                    c.emplace_back(m_.col(keys::hourly("lib_discharge", s->id, t)), 1.0);
                    c.emplace_back(m_.col(keys::hourly("lib_charge", s->id, t)), -1.0);
                }
                for (const auto* s : ztes) {
                    c.emplace_back(m_.col(keys::hourly("tes_discharge", s->id, t)), 1.0);
                    c.emplace_back(m_.col(keys::hourly("tes_charge", s->id, t)), -1.0);
                }
                m_.add_row(keys::hourly("hourly_matching", dc.zone, t), std::move(c), Sense::ge,
                           lambda * dc.load_mw);
            }
            // heater charging draws from local renewable generation only
            for (int t = 0; !ztes.empty() && t < T_; ++t) {
                std::vector<std::pair<int, double>> c;
                for (const auto* s : ztes)
                    c.emplace_back(m_.col(keys::hourly("tes_charge", s->id, t)), 1.0);
                for (const auto* r : zr)
                    c.emplace_back(m_.col(keys::cap("ren_invest", r->id)), -cf(*r, t));
                m_.add_row(keys::hourly("charge_limit", dc.zone, t), std::move(c), Sense::le, 0);
            }
            // over each day the procured clean energy covers the full DC
            // consumption, letting the flexible share shift within the window
            int H = dc.flexibility_window_h;
            int windows_per_period = hpp_ / H;
            for (int p = 0; p < reduced_.k; ++p) {
                int base = p * hpp_;
                for (int w0 = 0; w0 + H <= hpp_; w0 += H) {
                    int w = p * windows_per_period + w0 / H;
                    std::vector<std::pair<int, double>> c;
                    for (int h = 0; h < H; ++h) {
                        int t = base + w0 + h;
                        for (const auto* r : zr)
                            c.emplace_back(m_.col(keys::cap("ren_invest", r->id)), cf(*r, t));
                        for (const auto* s : zlib) {
                            c.emplace_back(m_.col(keys::hourly("lib_discharge", s->id, t)), 1.0);
                            c.emplace_back(m_.col(keys::hourly("lib_charge", s->id, t)), -1.0);
                        }
                        for (const auto* s : ztes) {
                            c.emplace_back(m_.col(keys::hourly("tes_discharge", s->id, t)), 1.0);
                            c.emplace_back(m_.col(keys::hourly("tes_charge", s->id, t)), -1.0);
                        }
                    }
                    m_.add_row(keys::cap("daily_energy", dc.zone + ",w=" + std::to_string(w)),
                               std::move(c), Sense::ge, H * dc.load_mw);
                }
            }
        }
    }

    // ---- shared helpers ----
    bool has_retrofit(const ThermalPlant& p) const {
        return p.retrofittable && config_.has_tes() && tes_by_plant_.count(p.id) > 0;
    }
    int prev_hour(int t) const {
        int p = t / hpp_;
        int h = t % hpp_;
        return p * hpp_ + (h == 0 ? hpp_ - 1 : h - 1);
    }
    double weight(int t) const { return reduced_.weight(t / hpp_); }
    double cf(const RenewableResource& r, int t) const {
        return reduced_.value(r.capacity_factor_series_ref, t);
    }
    double demand(int t) const {
        double d = 0;
        for (const auto& z : data_.zones)
            if (!z.demand_series_ref.empty()) d += reduced_.value(z.demand_series_ref, t);
        for (const auto& dc : data_.dcs) d += dc.load_mw;
        return d;
    }

private:
    template <typename T>
    static std::vector<T> sorted_by_id(const std::vector<T>& in) {
        std::vector<T> v = in;
        std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.id < b.id; });
        return v;
    }
    std::vector<const RenewableResource*> zone_renewables(const std::string& zone) const {
        std::vector<const RenewableResource*> v;
        for (const auto& r : renewables_)
            if (r.zone == zone) v.push_back(&r);
        return v;
    }
    std::vector<const LibSpec*> zone_libs(const std::string& zone) const {
        std::vector<const LibSpec*> v;
        for (const auto& s : libs_)
            if (s.zone == zone) v.push_back(&s);
        return v;
    }
    std::vector<const TesSpec*> zone_tes(const std::string& zone) const {
        std::vector<const TesSpec*> v;
        for (const auto& s : tes_)
            if (data_.tes_zone(s) == zone) v.push_back(&s);
        return v;
    }

    const SystemData& data_;
    const ReducedSeries& reduced_;
    const ScenarioConfig& config_;
    MilpModel m_;
    int T_ = 0;
    int hpp_ = 0;
    std::vector<ThermalPlant> plants_;
    std::vector<RenewableResource> renewables_;
    std::vector<LibSpec> libs_;
    std::vector<TesSpec> tes_;
    std::vector<DataCenter> dcs_;
    std::map<std::string, std::vector<std::string>> tes_by_plant_;
};

inline MilpModel build_model(const SystemData& data, const ReducedSeries& reduced,
                             const ScenarioConfig& config) {
    return ModelBuilder(data, reduced, config).build();
}

}  // namespace retroplan
