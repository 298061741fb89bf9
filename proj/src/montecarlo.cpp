#include "v2g/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "v2g/errors.hpp"
#include "v2g/parallel.hpp"
#include "v2g/util.hpp"

namespace v2g {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    double h = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

Aggregates aggregate(const std::vector<double>& values) {
    if (values.empty()) throw Error(Errc::empty_input, "no values to aggregate");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    Aggregates agg;
    double sum = 0.0;
    for (double v : sorted) sum += v;
    agg.mean = sum / static_cast<double>(sorted.size());
    agg.q25 = quantile_sorted(sorted, 0.25);
    agg.q50 = quantile_sorted(sorted, 0.50);
    agg.q75 = quantile_sorted(sorted, 0.75);
    agg.min = sorted.front();
    agg.max = sorted.back();
    return agg;
}

OptimizerConfig resolve_bounds(OptimizerConfig config, const PriceSeries& prices) {
    if (config.p_max <= config.p_min) {
        config.p_max = std::max(price_percentile(prices, 0.99), config.p_min + 0.01);
    }
    return config;
}

namespace {

struct UserEvaluation {
    UserOutcome baseline_view; // shared profile data
    AnnualResult baseline;
};

UserOutcome evaluate_user(int user_id, const UserProfile& profile, const DataBundle& bundle,
                          const ScenarioConfig& base, const OptimizerConfig& optimizer, Mode mode) {
    ScenarioConfig scenario = base;
    scenario.mode = mode;
    YearPlan plan = build_year_plan(profile, bundle.calendar, scenario);
    AnnualResult baseline = simulate_plan(plan, bundle.prices, Mode::commute_only, 0.0);

    UserOutcome out;
    out.user_id = user_id;
    out.profile = profile;

    if (mode == Mode::osp) {
        OptimizerConfig per_user = optimizer;
        per_user.seed = optimizer.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(user_id + 1));
        const PriceSeries* prices = &bundle.prices;
        const YearPlan* plan_ptr = &plan;
        OptimizeResult opt = maximize_surrogate(
            [plan_ptr, prices](double p) { return simulate_plan(*plan_ptr, *prices, Mode::osp, p).net; }, per_user);
        out.p = opt.p_star;
        out.degenerate = opt.degenerate;
        out.result = simulate_plan(plan, bundle.prices, Mode::osp, opt.p_star);
    } else {
        out.result = simulate_plan(plan, bundle.prices, mode, 0.0);
    }
    out.savings = out.result.net - baseline.net;
    return out;
}

} // namespace

std::vector<SavingsDistribution> run_population_study(const StudyConfig& study, const DataBundle& bundle,
                                                      const ScenarioConfig& base, const OptimizerConfig& optimizer) {
    if (study.population_size < 1) throw Error(Errc::config_error, "population size must be at least 1");
    OptimizerConfig opt = resolve_bounds(optimizer, bundle.prices);
    opt.validate();

    std::vector<UserProfile> profiles = sample_population(static_cast<std::size_t>(study.population_size),
                                                          bundle.commute, bundle.work, bundle.catalog,
                                                          base.battery.dod, study.master_seed);

    std::vector<SavingsDistribution> result;
    for (Mode mode : study.scenarios) {
        SavingsDistribution dist;
        dist.mode = mode;
        dist.rows.resize(profiles.size());
        parallel_for(profiles.size(), study.jobs, [&](std::size_t i) {
            dist.rows[i] = evaluate_user(static_cast<int>(i), profiles[i], bundle, base, opt, mode);
        });
        std::vector<double> savings;
        savings.reserve(dist.rows.size());
        for (const auto& row : dist.rows) savings.push_back(row.savings);
        dist.savings = aggregate(savings);
        result.push_back(std::move(dist));
    }
    return result;
}

std::vector<SweepCell> sweep_efficiency_rate(const StudyConfig& study, const DataBundle& bundle,
                                             const ScenarioConfig& base, const OptimizerConfig& optimizer) {
    if (study.eta_values.empty() || study.rate_values.empty())
        throw Error(Errc::config_error, "sweep requires eta and rate values");
    OptimizerConfig opt = resolve_bounds(optimizer, bundle.prices);
    opt.validate();

    std::vector<UserProfile> profiles = sample_population(static_cast<std::size_t>(study.population_size),
                                                          bundle.commute, bundle.work, bundle.catalog,
                                                          base.battery.dod, study.master_seed);

    std::vector<SweepCell> cells;
    for (double eta : study.eta_values) {
        for (double rate : study.rate_values) {
            ScenarioConfig scenario = base;
            scenario.mode = Mode::osp;
            scenario.battery.eta = eta;
            scenario.battery.charge_rate_kw = rate; // one charger serves both directions
            scenario.battery.discharge_rate_kw = rate;

            std::vector<double> savings(profiles.size());
            parallel_for(profiles.size(), study.jobs, [&](std::size_t i) {
                savings[i] = evaluate_user(static_cast<int>(i), profiles[i], bundle, scenario, opt, Mode::osp).savings;
            });
            SweepCell cell;
            cell.eta = eta;
            cell.rate_kw = rate;
            cell.savings = aggregate(savings);
            cells.push_back(cell);
        }
    }
    return cells;
}

double CostProjection::cost_for_year(int year) const {
    return cost_at_base * std::exp(-decay_per_year * static_cast<double>(year - base_year));
}

CostProjection fit_battery_cost(const std::vector<std::pair<int, double>>& history) {
    if (history.size() < 3) throw Error(Errc::too_few_points, "cost fit needs at least 3 points");
    for (const auto& [year, cost] : history)
        if (!(cost > 0)) throw Error(Errc::non_positive_cost, "cost for " + std::to_string(year) + " not positive");

    CostProjection proj;
    proj.base_year = std::max_element(history.begin(), history.end())->first;

    // linear least squares on log(cost) against (year - base_year)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [year, cost] : history) {
        double x = static_cast<double>(year - proj.base_year);
        double y = std::log(cost);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(history.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    proj.decay_per_year = -slope;
    proj.cost_at_base = std::exp(intercept);

    for (int year = 2020; year <= 2050; ++year) proj.projected.emplace_back(year, proj.cost_for_year(year));
    return proj;
}

std::vector<std::pair<int, double>> load_cost_history_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::empty_input, "cannot open cost history: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::empty_input, "empty cost history");
    if (trim(line) != "year,cost_usd_per_kwh")
        throw Error(Errc::malformed_row, "row 1: expected header 'year,cost_usd_per_kwh'");
    std::vector<std::pair<int, double>> history;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv_line(sv);
        if (fields.size() != 2) throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": expected 2 fields");
        history.emplace_back(static_cast<int>(parse_long(fields[0], row, "year")),
                             parse_double(fields[1], row, "cost"));
    }
    if (history.empty()) throw Error(Errc::empty_input, "no cost rows");
    return history;
}

std::vector<CostStudyRow> battery_cost_study(const StudyConfig& study, const DataBundle& bundle,
                                             const ScenarioConfig& base, const OptimizerConfig& optimizer,
                                             const CostProjection& projection) {
    OptimizerConfig opt = resolve_bounds(optimizer, bundle.prices);
    opt.validate();
    std::vector<UserProfile> profiles = sample_population(static_cast<std::size_t>(study.population_size),
                                                          bundle.commute, bundle.work, bundle.catalog,
                                                          base.battery.dod, study.master_seed);

    std::vector<CostStudyRow> rows;
    for (int year = study.cost_year_begin; year <= study.cost_year_end; ++year) {
        ScenarioConfig scenario = base;
        scenario.mode = Mode::osp;
        scenario.battery.capital_cost = projection.cost_for_year(year);

        std::vector<double> savings(profiles.size());
        parallel_for(profiles.size(), study.jobs, [&](std::size_t i) {
            savings[i] = evaluate_user(static_cast<int>(i), profiles[i], bundle, scenario, opt, Mode::osp).savings;
        });
        rows.push_back({year, scenario.battery.capital_cost, aggregate(savings).mean});
    }
    return rows;
}

} // namespace v2g
