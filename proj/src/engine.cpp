#include "v2g/engine.hpp"

#include <algorithm>
#include <cmath>

#include "v2g/errors.hpp"
#include "v2g/util.hpp"

namespace v2g {

using std::chrono::sys_days;

const char* mode_name(Mode mode) {
    switch (mode) {
    case Mode::price_taker: return "price_taker";
    case Mode::osp: return "osp";
    case Mode::commute_only: return "commute_only";
    }
    return "?";
}

Mode mode_from_string(const std::string& name) {
    if (name == "price_taker") return Mode::price_taker;
    if (name == "osp") return Mode::osp;
    if (name == "commute_only") return Mode::commute_only;
    throw Error(Errc::config_error, "unknown mode '" + name + "'");
}

DaySchedule build_schedule(const UserProfile& profile) {
    DaySchedule sched;
    sched.work_start = static_cast<int>(std::floor(profile.work_start_h)) % 24;
    // daily hours rounded to the engine's 1h grid, at least one slot
    sched.work_slots = std::max(1, static_cast<int>(std::lround(profile.daily_work_hours())));
    double commute_quarter = std::round(profile.commute_time_h * 4.0) / 4.0;
    sched.commute_slots = static_cast<int>(std::ceil(commute_quarter - 1e-9));
    sched.departure_hour = ((sched.work_start - sched.commute_slots) % 24 + 24) % 24;

    int cycle = sched.work_slots + 2 * sched.commute_slots;
    if (cycle > 24) throw Error(Errc::config_error, "daily cycle exceeds 24 hours");
    for (int h = 0; h < 24; ++h) {
        int rel = ((h - sched.departure_hour) % 24 + 24) % 24;
        if (rel < sched.commute_slots)
            sched.slots[h] = SlotState::commuting;
        else if (rel < sched.commute_slots + sched.work_slots)
            sched.slots[h] = SlotState::at_work;
        else if (rel < cycle)
            sched.slots[h] = SlotState::commuting;
        else
            sched.slots[h] = SlotState::at_home;
    }
    return sched;
}

HourFlow step_power(SlotState state, double soc, double price, const ScenarioConfig& scenario, double floor,
                    double commute_leg_kwh) {
    const BatteryParams& b = scenario.battery;
    HourFlow flow;
    switch (state) {
    case SlotState::at_work: {
        if (scenario.mode == Mode::commute_only) break;
        bool gate = scenario.mode == Mode::price_taker || price > scenario.selling_price;
        if (!gate) break;
        double headroom_kwh = (soc - floor) * b.capacity_kwh;
        if (headroom_kwh <= 0) break;
        double batt = std::min(b.discharge_rate_kw * 1.0, headroom_kwh);
        flow.battery_kwh = -batt;
        flow.grid_kwh = b.eta * batt;
        flow.cash = flow.grid_kwh * price;
        break;
    }
    case SlotState::at_home: {
        double room_kwh = (1.0 - soc) * b.capacity_kwh;
        if (room_kwh <= 0) break;
        double batt = std::min(b.charge_rate_kw * 1.0, room_kwh);
        flow.battery_kwh = batt;
        flow.grid_kwh = -batt / b.eta;
        flow.cash = flow.grid_kwh * price;
        break;
    }
    case SlotState::commuting:
        flow.battery_kwh = -commute_leg_kwh;
        break;
    case SlotState::idle:
        break;
    }
    return flow;
}

namespace {

// Vacation is vacation_weeks consecutive weeks starting at a Monday drawn
// uniformly from the Mondays that keep the whole block inside the year. The
// draw depends only on the profile seed, so every scenario sees the same
// placement.
std::pair<int, int> vacation_span(const UserProfile& profile, int year) {
    int days = hours_in_year(year) / 24;
    int span = profile.vacation_weeks * 7;
    sys_days jan1{std::chrono::year{year} / 1 / 1};
    std::vector<int> mondays;
    for (int d = 0; d + span <= days; ++d) {
        if (std::chrono::weekday{jan1 + std::chrono::days{d}} == std::chrono::Monday) mondays.push_back(d);
    }
    std::uint64_t s = profile.rng_seed ^ 0x7661636174696f6eULL; // domain-separated stream
    Rng rng(splitmix64(s));
    int start = mondays[rng.next_below(mondays.size())];
    return {start, start + span};
}

} // namespace

YearPlan build_year_plan(const UserProfile& profile, const WorkCalendar& calendar, const ScenarioConfig& scenario) {
    if (calendar.year != scenario.year)
        throw Error(Errc::config_error, "calendar year does not match scenario year");

    YearPlan plan;
    plan.year = scenario.year;
    plan.battery = scenario.battery;
    plan.battery.capacity_kwh = profile.ev_capacity_kwh;
    plan.battery.validate();
    plan.degradation = scenario.degradation;
    plan.degradation.validate();
    if (scenario.mode == Mode::osp && scenario.selling_price < 0)
        throw Error(Errc::config_error, "selling price must be nonnegative");

    const double commute_energy = profile.commute_energy_kwh();
    plan.floor = discharge_floor(plan.battery, commute_energy, scenario.reserve_legs);

    const int n_hours = hours_in_year(plan.year);
    const int n_days = n_hours / 24;
    plan.labels.assign(n_hours, SlotState::at_home);
    plan.boundary_drain.assign(n_hours, 0.0);

    DaySchedule sched = build_schedule(profile);
    plan.commute_per_slot = sched.commute_slots > 0 ? commute_energy / sched.commute_slots : 0.0;

    auto [vac_begin, vac_end] = vacation_span(profile, plan.year);
    const int cycle = sched.work_slots + 2 * sched.commute_slots;
    const int dep_rel = sched.work_start - sched.commute_slots; // may be negative: departs the previous evening
    sys_days jan1{std::chrono::year{plan.year} / 1 / 1};

    for (int d = 0; d < n_days; ++d) {
        if (d >= vac_begin && d < vac_end) continue;
        if (!is_working_day(calendar, std::chrono::year_month_day{jan1 + std::chrono::days{d}})) continue;
        auto wrap = [&](int hour) { return ((hour % n_hours) + n_hours) % n_hours; };
        for (int k = 0; k < cycle; ++k) {
            int idx = wrap(d * 24 + dep_rel + k);
            if (k < sched.commute_slots || k >= sched.commute_slots + sched.work_slots)
                plan.labels[idx] = SlotState::commuting;
            else
                plan.labels[idx] = SlotState::at_work;
        }
        if (sched.commute_slots == 0 && commute_energy > 0) {
            // zero-duration commute: withdraw each leg at the work boundaries
            plan.boundary_drain[wrap(d * 24 + sched.work_start)] += commute_energy;
            plan.boundary_drain[wrap(d * 24 + sched.work_start + sched.work_slots)] += commute_energy;
        }
    }
    return plan;
}

AnnualResult simulate_plan(const YearPlan& plan, const PriceSeries& prices, Mode mode, double selling_price,
                           const HourObserver* observer) {
    const int n_hours = hours_in_year(plan.year);
    if (static_cast<int>(prices.size()) < n_hours)
        throw Error(Errc::price_series_too_short, "price series has " + std::to_string(prices.size()) +
                                                      " hours, need " + std::to_string(n_hours));
    if (static_cast<int>(prices.start.year()) != plan.year ||
        prices.start != std::chrono::year_month_day{std::chrono::year{plan.year} / 1 / 1})
        throw Error(Errc::price_series_too_short, "price series does not start on Jan 1 of the scenario year");

    ScenarioConfig scenario;
    scenario.mode = mode;
    scenario.selling_price = selling_price;
    scenario.battery = plan.battery;
    scenario.degradation = plan.degradation;
    scenario.year = plan.year;

    BatteryState state;
    state.soc = 1.0;
    state.q_remaining = capacity_remaining(plan.degradation, 0.0, 0.0);

    AnnualResult result;
    for (int h = 0; h < n_hours; ++h) {
        if (plan.boundary_drain[h] != 0.0)
            state = accrue_step(state, plan.battery, plan.degradation, -plan.boundary_drain[h], 0.0);
        HourFlow flow = step_power(plan.labels[h], state.soc, prices.prices[h], scenario, plan.floor,
                                   plan.commute_per_slot);
        state = accrue_step(state, plan.battery, plan.degradation, flow.battery_kwh, 1.0);
        if (observer) (*observer)(h, plan.labels[h], state);
        if (flow.grid_kwh > 0) {
            result.revenue += flow.cash;
            result.kwh_sold += flow.grid_kwh;
        } else if (flow.grid_kwh < 0) {
            result.energy_cost += -flow.cash;
            result.kwh_bought += -flow.grid_kwh;
        }
    }
    result.deg_cost = state.deg_cost_accrued;
    result.net = result.revenue - result.energy_cost - result.deg_cost;
    result.final_q = state.q_remaining;
    result.n_cyc = state.equivalent_cycles;
    result.final_soc = state.soc;
    return result;
}

AnnualResult simulate_year(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                           const ScenarioConfig& scenario) {
    YearPlan plan = build_year_plan(profile, calendar, scenario);
    return simulate_plan(plan, prices, scenario.mode, scenario.selling_price);
}

double annual_savings(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                      const ScenarioConfig& scenario_v2g) {
    YearPlan plan = build_year_plan(profile, calendar, scenario_v2g);
    AnnualResult v2g = simulate_plan(plan, prices, scenario_v2g.mode, scenario_v2g.selling_price);
    AnnualResult baseline = simulate_plan(plan, prices, Mode::commute_only, 0.0);
    return v2g.net - baseline.net;
}

std::string annual_result_csv_header() {
    return "user_id,mode,p,revenue,energy_cost,deg_cost,net,kwh_sold,kwh_bought,final_q,n_cyc,savings";
}

std::string annual_result_csv_row(int user_id, Mode mode, double p, const AnnualResult& r, double savings) {
    std::string row = std::to_string(user_id);
    row += ',';
    row += mode_name(mode);
    for (double v : {p, r.revenue, r.energy_cost, r.deg_cost, r.net, r.kwh_sold, r.kwh_bought, r.final_q, r.n_cyc,
                     savings}) {
        row += ',';
        row += format_double(v);
    }
    return row;
}

} // namespace v2g
