#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace v2g {

// Empirical joint distribution of one-way commute distance and duration.
struct CommuteDistribution {
    struct Record {
        double distance_mi;
        double duration_h;
        double weight;
    };
    std::vector<Record> records;
    std::vector<double> cumulative_weight; // filled by the loader

    double total_weight() const { return cumulative_weight.empty() ? 0.0 : cumulative_weight.back(); }
};

// Marginals for work arrival hour and weekly hours worked.
struct WorkDistribution {
    struct Entry {
        double value;
        double weight;
    };
    std::vector<Entry> arrivals;     // hour-of-day in [0,24)
    std::vector<Entry> weekly_hours; // hours/week in (0,168]
    std::vector<double> arrival_cumulative;
    std::vector<double> hours_cumulative;
};

struct EVCatalog {
    struct Model {
        std::string name;
        double capacity_kwh;
        double range_miles;
        double sales_weight;
    };
    std::vector<Model> models;
    std::vector<double> cumulative_weight;
};

// One sampled realization of the per-user random vector.
struct UserProfile {
    double commute_distance_mi = 0.0; // one-way
    double commute_time_h = 0.0;      // one-way
    double work_start_h = 9.0;        // hour-of-day on the engine's 1h grid
    double weekly_hours = 40.0;
    int vacation_weeks = 2;
    double ev_capacity_kwh = 60.0;
    double ev_range_miles = 240.0;
    std::uint64_t rng_seed = 0;

    // battery-side energy for one commute leg
    double commute_energy_kwh() const { return commute_distance_mi * ev_capacity_kwh / ev_range_miles; }
    double daily_work_hours() const { return weekly_hours / 5.0; }
};

CommuteDistribution load_commute_distribution(std::istream& in);
WorkDistribution load_work_distribution(std::istream& arrivals, std::istream& weekly_hours);
EVCatalog load_ev_catalog(std::istream& in);

CommuteDistribution load_commute_file(const std::string& path);
WorkDistribution load_work_files(const std::string& arrival_path, const std::string& hours_path);
EVCatalog load_ev_catalog_file(const std::string& path);

// Draws one feasible profile; pure given the seed. Draws violating day
// closure or trip feasibility are rejection-resampled up to a bounded retry
// count, after which the distributions are declared infeasible.
UserProfile sample_user(const CommuteDistribution& commute, const WorkDistribution& work, const EVCatalog& catalog,
                        double dod, std::uint64_t seed);

std::vector<UserProfile> sample_population(std::size_t n, const CommuteDistribution& commute,
                                           const WorkDistribution& work, const EVCatalog& catalog, double dod,
                                           std::uint64_t master_seed);

} // namespace v2g
