#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "v2g/battery.hpp"
#include "v2g/population.hpp"
#include "v2g/timeseries.hpp"

namespace v2g {

enum class Mode { price_taker, osp, commute_only };

const char* mode_name(Mode mode);
Mode mode_from_string(const std::string& name);

// What the vehicle is doing in one hourly slot.
enum class SlotState { at_home, commuting, at_work, idle };

struct ScenarioConfig {
    Mode mode = Mode::price_taker;
    double selling_price = 0.0; // $/kWh threshold, used only when mode == osp
    BatteryParams battery;      // capacity_kwh is replaced by the profile's EV capacity
    DegradationParams degradation;
    int year = 2019;
    int reserve_legs = 1; // commute legs reserved above the DoD floor while selling
};

// Hour-of-day template of one working day. The commute-work-commute cycle is
// anchored at the departure hour and may wrap past midnight.
struct DaySchedule {
    std::array<SlotState, 24> slots{}; // indexed by hour-of-day
    int work_start = 0;                // hour-of-day of the first work slot
    int work_slots = 0;
    int commute_slots = 0;             // per leg
    int departure_hour = 0;            // work_start - commute_slots, wrapped to [0,24)
};

struct AnnualResult {
    double revenue = 0.0;     // $ from sold energy
    double energy_cost = 0.0; // $ for bought energy
    double deg_cost = 0.0;    // $ amortized capacity fade
    double net = 0.0;         // revenue - energy_cost - deg_cost
    double kwh_sold = 0.0;    // grid-side
    double kwh_bought = 0.0;  // grid-side
    double final_q = 1.0;
    double n_cyc = 0.0;
    double final_soc = 1.0;   // not serialized; used by energy-balance checks
};

// Signed hourly exchange. grid_kwh > 0 delivers to the grid, < 0 draws from
// it; battery_kwh > 0 charges the pack. cash == grid_kwh * price.
struct HourFlow {
    double grid_kwh = 0.0;
    double battery_kwh = 0.0;
    double cash = 0.0;
};

DaySchedule build_schedule(const UserProfile& profile);

// One hour of gated power flow. Rate caps apply battery-side; efficiency maps
// between battery and grid side (sells deliver eta*|battery|, buys draw
// |battery|/eta). commute_leg_kwh is the battery-side draw for a commuting
// slot and is ignored for other states.
HourFlow step_power(SlotState state, double soc, double price, const ScenarioConfig& scenario, double floor,
                    double commute_leg_kwh);

// Precomputed hour labels and fixed parameters of one user-year, reusable
// across selling prices (the optimizer evaluates many p on one plan).
struct YearPlan {
    std::vector<SlotState> labels;
    std::vector<double> boundary_drain; // instantaneous commute withdrawals for zero-slot commutes
    double commute_per_slot = 0.0;
    double floor = 0.0;
    BatteryParams battery;
    DegradationParams degradation;
    int year = 2019;
};

YearPlan build_year_plan(const UserProfile& profile, const WorkCalendar& calendar, const ScenarioConfig& scenario);

// Invoked after every simulated hour; used by invariant checks.
using HourObserver = std::function<void(int hour, SlotState state, const BatteryState& after)>;

AnnualResult simulate_plan(const YearPlan& plan, const PriceSeries& prices, Mode mode, double selling_price,
                           const HourObserver* observer = nullptr);

AnnualResult simulate_year(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                           const ScenarioConfig& scenario);

// net(v2g scenario) - net(commute-only baseline with the same profile/battery).
double annual_savings(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                      const ScenarioConfig& scenario_v2g);

std::string annual_result_csv_header();
std::string annual_result_csv_row(int user_id, Mode mode, double p, const AnnualResult& result, double savings);

} // namespace v2g
