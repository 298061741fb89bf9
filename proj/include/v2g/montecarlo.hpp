#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "v2g/engine.hpp"
#include "v2g/optimizer.hpp"
#include "v2g/population.hpp"
#include "v2g/timeseries.hpp"

namespace v2g {

// Everything a study needs, loaded once and shared read-only by workers.
struct DataBundle {
    PriceSeries prices;
    WorkCalendar calendar;
    CommuteDistribution commute;
    WorkDistribution work;
    EVCatalog catalog;
};

struct StudyConfig {
    std::string city_id;
    int population_size = 1000;
    std::vector<Mode> scenarios{Mode::price_taker, Mode::osp};
    std::uint64_t master_seed = 42;
    int jobs = 0; // 0 = all cores, 1 = serial reference path
    std::vector<double> eta_values{0.837, 0.90, 0.99};
    std::vector<double> rate_values{3.3, 11.5, 15.0};
    int cost_year_begin = 2020;
    int cost_year_end = 2050;
};

struct UserOutcome {
    int user_id = 0;
    UserProfile profile;
    double p = 0.0; // selling price used (p_star for OSP, 0 otherwise)
    bool degenerate = false;
    AnnualResult result;
    double savings = 0.0; // vs the commute-only baseline on the same plan
};

struct Aggregates {
    double mean = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, min = 0.0, max = 0.0;
};

Aggregates aggregate(const std::vector<double>& values);

struct SavingsDistribution {
    Mode mode;
    std::vector<UserOutcome> rows; // in user-index order regardless of jobs
    Aggregates savings;
};

// Samples one population from master_seed and evaluates every scenario on it
// (paired design: per-user seeds are reused across arms).
std::vector<SavingsDistribution> run_population_study(const StudyConfig& study, const DataBundle& bundle,
                                                      const ScenarioConfig& base, const OptimizerConfig& optimizer);

struct SweepCell {
    double eta = 0.0;
    double rate_kw = 0.0; // applied to both charge and discharge rate
    Aggregates savings;
};

// OSP savings over the (eta, rate) grid on one paired population.
std::vector<SweepCell> sweep_efficiency_rate(const StudyConfig& study, const DataBundle& bundle,
                                             const ScenarioConfig& base, const OptimizerConfig& optimizer);

struct CostProjection {
    double cost_at_base = 0.0; // $/kWh at base_year
    double decay_per_year = 0.0;
    int base_year = 0;
    std::vector<std::pair<int, double>> projected; // year -> $/kWh

    double cost_for_year(int year) const;
};

// Least-squares exponential fit log(cost) = log(a) - k*(year - y0), projected
// annually through 2050.
CostProjection fit_battery_cost(const std::vector<std::pair<int, double>>& history);

std::vector<std::pair<int, double>> load_cost_history_file(const std::string& path);

struct CostStudyRow {
    int year = 0;
    double capital_cost = 0.0;
    double mean_savings = 0.0;
};

// Reruns the OSP study on a fixed population and fixed prices with only the
// battery capital cost varied year by year.
std::vector<CostStudyRow> battery_cost_study(const StudyConfig& study, const DataBundle& bundle,
                                             const ScenarioConfig& base, const OptimizerConfig& optimizer,
                                             const CostProjection& projection);

// Fills an unset p_max (<= p_min) with the 99th percentile of the year's
// prices, the default search bound for the selling price.
OptimizerConfig resolve_bounds(OptimizerConfig config, const PriceSeries& prices);

} // namespace v2g
