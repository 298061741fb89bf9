#include "v2g/battery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "v2g/errors.hpp"

namespace v2g {

void BatteryParams::validate() const {
    if (!(capacity_kwh > 0)) throw Error(Errc::config_error, "battery capacity must be positive");
    if (!(dod > 0 && dod <= 1)) throw Error(Errc::config_error, "dod must lie in (0,1]");
    if (!(eta > 0 && eta <= 1)) throw Error(Errc::config_error, "eta must lie in (0,1]");
    if (!(charge_rate_kw > 0) || !(discharge_rate_kw > 0))
        throw Error(Errc::config_error, "charge/discharge rates must be positive");
    if (capital_cost < 0) throw Error(Errc::config_error, "capital cost must be nonnegative");
    if (!(saturation_factor > 0 && saturation_factor <= 1))
        throw Error(Errc::config_error, "saturation factor must lie in (0,1]");
}

void DegradationParams::validate() const {
    if (b1 > 0 || c1 > 0) throw Error(Errc::config_error, "degradation rates b1, c1 must be nonpositive");
}

double capacity_remaining(const DegradationParams& deg, double age_days, double n_cyc) {
    double q_calendar = deg.b0 + deg.b1 * std::pow(age_days, deg.z);
    double q_cycle = deg.c0 + deg.c1 * n_cyc;
    return std::min(q_calendar, q_cycle);
}

BatteryState accrue_step(const BatteryState& state, const BatteryParams& params, const DegradationParams& deg,
                         double battery_energy_kwh, double dt_hours) {
    if (dt_hours < 0) throw Error(Errc::negative_timestep, "negative timestep");

    BatteryState next = state;
    next.age_days = state.age_days + dt_hours / 24.0;
    if (battery_energy_kwh < 0)
        next.equivalent_cycles = state.equivalent_cycles - battery_energy_kwh / (params.dod * params.capacity_kwh);

    next.q_remaining = capacity_remaining(deg, next.age_days, next.equivalent_cycles);
    next.deg_cost_accrued = state.deg_cost_accrued + params.capital_cost * params.capacity_kwh *
                                                         (state.q_remaining - next.q_remaining) /
                                                         params.saturation_factor;

    next.soc = state.soc + battery_energy_kwh / params.capacity_kwh;
    const double lo = 1.0 - params.dod;
    if (next.soc < lo - 1e-9 || next.soc > 1.0 + 1e-9)
        throw Error(Errc::soc_out_of_bounds, "soc " + std::to_string(next.soc) + " outside [" +
                                                 std::to_string(lo) + ",1]");
    next.soc = std::clamp(next.soc, lo, 1.0);
    return next;
}

double discharge_floor(const BatteryParams& params, double commute_energy_kwh, int reserve_legs) {
    if (commute_energy_kwh < 0 || 2.0 * commute_energy_kwh > params.dod * params.capacity_kwh * (1.0 + 1e-9))
        throw Error(Errc::infeasible_commute, "commute energy exceeds usable capacity");
    if (reserve_legs != 1 && reserve_legs != 2)
        throw Error(Errc::config_error, "reserve_legs must be 1 or 2");
    return (1.0 - params.dod) + static_cast<double>(reserve_legs) * commute_energy_kwh / params.capacity_kwh;
}

} // namespace v2g
