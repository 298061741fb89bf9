#pragma once

namespace v2g {

// Fixed battery/charger parameters of one simulated vehicle.
struct BatteryParams {
    double capacity_kwh = 60.0;       // E_max
    double dod = 0.9;                 // usable depth of discharge
    double eta = 0.837;               // one-way efficiency (round trip = eta^2)
    double charge_rate_kw = 11.5;     // battery-side charge cap
    double discharge_rate_kw = 11.5;  // battery-side discharge cap
    double capital_cost = 156.0;      // $/kWh
    double saturation_factor = 0.2;   // capacity loss fraction that spends the pack

    void validate() const;
};

// Semi-empirical capacity-fade coefficients. Calendar term b0 + b1*t^z and
// cycle term c0 + c1*N; the fresher normalization b0 = c0 = 1 with
// non-positive b1, c1 keeps Q(0) = 1 and Q nonincreasing.
struct DegradationParams {
    double b0 = 1.0;
    double b1 = -2.5e-4; // per day^z; calibration placeholder, not a measured constant
    double z = 0.5;
    double c0 = 1.0;
    double c1 = -5e-5;   // per equivalent cycle; calibration placeholder
    void validate() const;
};

struct BatteryState {
    double soc = 1.0;              // fraction of capacity
    double age_days = 0.0;
    double equivalent_cycles = 0.0;
    double q_remaining = 1.0;
    double deg_cost_accrued = 0.0; // $
};

// min(calendar fade, cycle fade) remaining-capacity fraction.
double capacity_remaining(const DegradationParams& deg, double age_days, double n_cyc);

// Advances one engine step: ages the pack, counts discharged battery-side
// energy as equivalent cycles, recomputes Q and prices the capacity lost at
// capital_cost * capacity * dQ / saturation_factor. battery_energy_kwh is
// signed battery-side energy (charge positive). For dt > 0 the engine keeps
// |battery_energy| within the rate caps; dt == 0 steps carry instantaneous
// commute withdrawals for zero-duration commutes.
BatteryState accrue_step(const BatteryState& state, const BatteryParams& params, const DegradationParams& deg,
                         double battery_energy_kwh, double dt_hours);

// SoC below which workplace discharge is forbidden: the DoD floor plus the
// battery-side energy reserved for reserve_legs commute legs.
double discharge_floor(const BatteryParams& params, double commute_energy_kwh, int reserve_legs = 1);

} // namespace v2g
