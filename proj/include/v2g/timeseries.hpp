#pragma once

#include <chrono>
#include <istream>
#include <set>
#include <string>
#include <vector>

namespace v2g {

// Hourly electricity prices on a contiguous calendar grid. Index i is the
// hour starting at `start + i hours` in local time. Immutable once built;
// safe to share across simulation workers.
struct PriceSeries {
    std::string city_id;
    std::chrono::year_month_day start{};
    std::vector<double> prices; // $/kWh, may be negative

    // normalization notes captured while parsing (DST repair etc.)
    std::vector<std::string> warnings;

    std::size_t size() const { return prices.size(); }
    int days() const { return static_cast<int>(prices.size() / 24); }
};

// Working-day calendar for one year: weekends plus observed US federal
// holidays are non-working.
struct WorkCalendar {
    int year = 0;
    std::set<std::chrono::year_month_day> holidays;
};

PriceSeries parse_price_csv(std::istream& in, const std::string& city_id);
PriceSeries parse_price_file(const std::string& path, const std::string& city_id);
std::string serialize_price_csv(const PriceSeries& series);

// Savitzky-Golay smoothing: each point becomes the least-squares polynomial
// fit of `poly_order` over the centered odd `window`. Edge points are taken
// from the fit over the first/last full window, so polynomial inputs of
// order <= poly_order are reproduced exactly over the whole series.
PriceSeries smooth_prices(const PriceSeries& series, int window, int poly_order);

WorkCalendar make_work_calendar(int year);
bool is_working_day(const WorkCalendar& calendar, std::chrono::year_month_day date);

// q-quantile of the price values under linear interpolation, q in [0,1].
double price_percentile(const PriceSeries& series, double q);

inline int hours_in_year(int year) {
    using namespace std::chrono;
    return std::chrono::year{year}.is_leap() ? 8784 : 8760;
}

} // namespace v2g
