#include "v2g/population.hpp"

#include <cmath>
#include <fstream>

#include "v2g/errors.hpp"
#include "v2g/util.hpp"

namespace v2g {

namespace {

constexpr int kMaxSampleRetries = 1000;

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::empty_input, "cannot open file: " + path);
    return in;
}

void expect_header(std::istream& in, std::string_view want) {
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::empty_input, "empty distribution file");
    if (trim(line) != want)
        throw Error(Errc::malformed_row, "row 1: expected header '" + std::string(want) + "'");
}

std::vector<double> cumulate(const std::vector<double>& weights) {
    std::vector<double> cum;
    cum.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
        total += w;
        cum.push_back(total);
    }
    if (total <= 0.0) throw Error(Errc::empty_distribution, "distribution has no positive weight");
    return cum;
}

std::vector<WorkDistribution::Entry> load_entries(std::istream& in, std::string_view header,
                                                  std::string_view value_name) {
    expect_header(in, header);
    std::vector<WorkDistribution::Entry> entries;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv_line(sv);
        if (fields.size() != 2) throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": expected 2 fields");
        double value = parse_double(fields[0], row, value_name);
        double weight = parse_double(fields[1], row, "weight");
        if (weight < 0) throw Error(Errc::negative_weight, "row " + std::to_string(row) + ": negative weight");
        entries.push_back({value, weight});
    }
    if (entries.empty()) throw Error(Errc::empty_distribution, "no rows");
    return entries;
}

} // namespace

CommuteDistribution load_commute_distribution(std::istream& in) {
    expect_header(in, "distance_miles,duration_hours,weight");
    CommuteDistribution dist;
    std::vector<double> weights;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv_line(sv);
        if (fields.size() != 3) throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": expected 3 fields");
        CommuteDistribution::Record rec{parse_double(fields[0], row, "distance"),
                                        parse_double(fields[1], row, "duration"),
                                        parse_double(fields[2], row, "weight")};
        if (rec.weight < 0) throw Error(Errc::negative_weight, "row " + std::to_string(row) + ": negative weight");
        if (rec.distance_mi < 0 || rec.duration_h < 0)
            throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": negative distance or duration");
        dist.records.push_back(rec);
        weights.push_back(rec.weight);
    }
    if (dist.records.empty()) throw Error(Errc::empty_distribution, "no commute records");
    dist.cumulative_weight = cumulate(weights);
    return dist;
}

WorkDistribution load_work_distribution(std::istream& arrivals, std::istream& weekly_hours) {
    WorkDistribution dist;
    dist.arrivals = load_entries(arrivals, "arrival_hour,weight", "arrival_hour");
    dist.weekly_hours = load_entries(weekly_hours, "hours_per_week,weight", "hours_per_week");
    for (const auto& e : dist.arrivals)
        if (e.value < 0 || e.value >= 24)
            throw Error(Errc::malformed_row, "arrival_hour must lie in [0,24)");
    for (const auto& e : dist.weekly_hours)
        if (e.value <= 0 || e.value > 168)
            throw Error(Errc::malformed_row, "hours_per_week must lie in (0,168]");
    std::vector<double> w;
    for (const auto& e : dist.arrivals) w.push_back(e.weight);
    dist.arrival_cumulative = cumulate(w);
    w.clear();
    for (const auto& e : dist.weekly_hours) w.push_back(e.weight);
    dist.hours_cumulative = cumulate(w);
    return dist;
}

EVCatalog load_ev_catalog(std::istream& in) {
    expect_header(in, "name,capacity_kwh,range_miles,sales_weight");
    EVCatalog catalog;
    std::vector<double> weights;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv_line(sv);
        if (fields.size() != 4) throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": expected 4 fields");
        EVCatalog::Model model;
        model.name = std::string(trim(fields[0]));
        model.capacity_kwh = parse_double(fields[1], row, "capacity");
        model.range_miles = parse_double(fields[2], row, "range");
        model.sales_weight = parse_double(fields[3], row, "sales_weight");
        if (model.sales_weight < 0) throw Error(Errc::negative_weight, "row " + std::to_string(row) + ": negative weight");
        if (model.capacity_kwh <= 0 || model.range_miles <= 0)
            throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": capacity and range must be positive");
        catalog.models.push_back(model);
        weights.push_back(model.sales_weight);
    }
    if (catalog.models.empty()) throw Error(Errc::empty_distribution, "no EV models");
    catalog.cumulative_weight = cumulate(weights);
    return catalog;
}

CommuteDistribution load_commute_file(const std::string& path) {
    auto in = open_or_throw(path);
    return load_commute_distribution(in);
}

WorkDistribution load_work_files(const std::string& arrival_path, const std::string& hours_path) {
    auto a = open_or_throw(arrival_path);
    auto h = open_or_throw(hours_path);
    return load_work_distribution(a, h);
}

EVCatalog load_ev_catalog_file(const std::string& path) {
    auto in = open_or_throw(path);
    return load_ev_catalog(in);
}

UserProfile sample_user(const CommuteDistribution& commute, const WorkDistribution& work, const EVCatalog& catalog,
                        double dod, std::uint64_t seed) {
    if (!(dod > 0 && dod <= 1)) throw Error(Errc::config_error, "dod must lie in (0,1]");
    Rng rng(seed);
    for (int attempt = 0; attempt < kMaxSampleRetries; ++attempt) {
        const auto& trip = commute.records[rng.weighted_index(commute.cumulative_weight)];
        double arrival = work.arrivals[rng.weighted_index(work.arrival_cumulative)].value;
        double hours = work.weekly_hours[rng.weighted_index(work.hours_cumulative)].value;
        int vacation = 1 + static_cast<int>(rng.next_below(3));
        const auto& ev = catalog.models[rng.weighted_index(catalog.cumulative_weight)];

        UserProfile profile;
        profile.commute_distance_mi = trip.distance_mi;
        profile.commute_time_h = trip.duration_h;
        profile.work_start_h = std::fmod(std::round(arrival), 24.0); // engine runs on a 1h grid
        profile.weekly_hours = hours;
        profile.vacation_weeks = vacation;
        profile.ev_capacity_kwh = ev.capacity_kwh;
        profile.ev_range_miles = ev.range_miles;
        profile.rng_seed = seed;

        // Day closure: the commute-work-commute cycle must fit inside 24h of
        // the departure day (start times may wrap past midnight). Checked on
        // both the exact values and the rounded hourly schedule.
        double daily = profile.daily_work_hours();
        int work_slots = std::max(1, static_cast<int>(std::lround(daily)));
        int commute_slots = static_cast<int>(std::ceil(std::round(profile.commute_time_h * 4.0) / 4.0 - 1e-9));
        bool closes = daily + 2.0 * profile.commute_time_h <= 24.0 && work_slots + 2 * commute_slots <= 24;

        // Trip feasibility: the round trip fits in the usable capacity.
        bool feasible_trip = 2.0 * profile.commute_energy_kwh() <= dod * profile.ev_capacity_kwh * (1.0 + 1e-9);

        if (closes && feasible_trip) return profile;
    }
    throw Error(Errc::infeasible_population, "no feasible user profile after " +
                                                 std::to_string(kMaxSampleRetries) + " draws");
}

std::vector<UserProfile> sample_population(std::size_t n, const CommuteDistribution& commute,
                                           const WorkDistribution& work, const EVCatalog& catalog, double dod,
                                           std::uint64_t master_seed) {
    if (n == 0) throw Error(Errc::config_error, "population size must be at least 1");
    std::uint64_t state = master_seed;
    std::vector<std::uint64_t> seeds(n);
    for (auto& s : seeds) s = splitmix64(state);

    std::vector<UserProfile> profiles;
    profiles.reserve(n);
    for (std::size_t i = 0; i < n; ++i) profiles.push_back(sample_user(commute, work, catalog, dod, seeds[i]));
    return profiles;
}

} // namespace v2g
