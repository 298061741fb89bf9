#include "v2g/timeseries.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "v2g/errors.hpp"
#include "v2g/util.hpp"

namespace v2g {

using std::chrono::sys_days;
using std::chrono::year_month_day;

namespace {

struct Timestamp {
    year_month_day date;
    int hour;
};

// Expects ISO-8601 local time at the top of the hour, e.g. 2019-03-10T02:00:00
// (a trailing ":00" for seconds is optional).
Timestamp parse_timestamp(std::string_view s, std::size_t row) {
    s = trim(s);
    auto fail = [&]() -> Timestamp {
        throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": bad timestamp '" + std::string(s) + "'");
    };
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return fail();
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (ec != std::errc{} || ptr != s.data() + pos + len) fail();
        return v;
    };
    int y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2);
    int sec = 0;
    if (s.size() >= 19) {
        if (s[16] != ':') fail();
        sec = num(17, 2);
    } else if (s.size() != 16) {
        fail();
    }
    year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                       std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23) fail();
    if (mi != 0 || sec != 0)
        throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": timestamp not at the top of the hour");
    return {ymd, h};
}

long long hour_index(const Timestamp& t) {
    return static_cast<long long>(sys_days{t.date}.time_since_epoch().count()) * 24 + t.hour;
}

bool is_sunday(const Timestamp& t) {
    return std::chrono::weekday{sys_days{t.date}} == std::chrono::Sunday;
}

std::string describe(const Timestamp& t) {
    std::ostringstream os;
    os << static_cast<int>(t.date.year()) << '-';
    unsigned mo = static_cast<unsigned>(t.date.month()), d = static_cast<unsigned>(t.date.day());
    os << (mo < 10 ? "0" : "") << mo << '-' << (d < 10 ? "0" : "") << d;
    os << 'T' << (t.hour < 10 ? "0" : "") << t.hour << ":00:00";
    return os.str();
}

Timestamp from_hour_index(long long idx) {
    long long day = idx / 24;
    return {year_month_day{sys_days{std::chrono::days{day}}}, static_cast<int>(idx % 24)};
}

} // namespace

PriceSeries parse_price_csv(std::istream& in, const std::string& city_id) {
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::empty_input, "empty price file");
    if (trim(line) != "timestamp,price_usd_per_kwh")
        throw Error(Errc::malformed_row, "row 1: expected header 'timestamp,price_usd_per_kwh'");

    PriceSeries series;
    series.city_id = city_id;

    long long prev_idx = 0;
    bool have_prev = false;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv_line(sv);
        if (fields.size() != 2)
            throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": expected 2 fields");
        Timestamp ts = parse_timestamp(fields[0], row);
        double price = parse_double(fields[1], row, "price");
        long long idx = hour_index(ts);

        if (!have_prev) {
            series.start = ts.date;
            if (ts.hour != 0)
                throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": series must start at midnight");
            series.prices.push_back(price);
            prev_idx = idx;
            have_prev = true;
            continue;
        }

        if (idx == prev_idx) {
            // DST fall-back exports repeat one early-morning Sunday hour.
            if ((ts.hour == 1 || ts.hour == 2) && is_sunday(ts)) {
                series.prices.back() = 0.5 * (series.prices.back() + price);
                series.warnings.push_back("averaged duplicated DST hour " + describe(ts));
                continue;
            }
            throw Error(Errc::duplicate_timestamp, "row " + std::to_string(row) + ": duplicate timestamp " + describe(ts));
        }
        if (idx < prev_idx)
            throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": timestamps not ascending");
        if (idx == prev_idx + 2) {
            Timestamp missing = from_hour_index(prev_idx + 1);
            // DST spring-forward exports skip the 02:00 Sunday hour.
            if (missing.hour == 2 && is_sunday(missing)) {
                series.prices.push_back(0.5 * (series.prices.back() + price));
                series.warnings.push_back("interpolated missing DST hour " + describe(missing));
                series.prices.push_back(price);
                prev_idx = idx;
                continue;
            }
        }
        if (idx > prev_idx + 1) {
            Timestamp missing = from_hour_index(prev_idx + 1);
            throw Error(Errc::missing_hours, "row " + std::to_string(row) + ": gap starting at " + describe(missing));
        }
        series.prices.push_back(price);
        prev_idx = idx;
    }

    if (series.prices.empty()) throw Error(Errc::empty_input, "no data rows");
    if (series.prices.size() % 24 != 0)
        throw Error(Errc::missing_hours, "series does not cover a whole number of days (" +
                                             std::to_string(series.prices.size()) + " hours)");
    return series;
}

PriceSeries parse_price_file(const std::string& path, const std::string& city_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::empty_input, "cannot open price file: " + path);
    return parse_price_csv(in, city_id);
}

std::string serialize_price_csv(const PriceSeries& series) {
    std::string out = "timestamp,price_usd_per_kwh\n";
    long long base = hour_index({series.start, 0});
    for (std::size_t i = 0; i < series.prices.size(); ++i) {
        out += describe(from_hour_index(base + static_cast<long long>(i)));
        out += ',';
        out += format_double(series.prices[i]);
        out += '\n';
    }
    return out;
}

PriceSeries smooth_prices(const PriceSeries& series, int window, int poly_order) {
    const int n = static_cast<int>(series.prices.size());
    if (window < 1 || window % 2 == 0)
        throw Error(Errc::invalid_window, "window must be a positive odd count");
    if (poly_order < 0 || poly_order >= window)
        throw Error(Errc::invalid_window, "window must exceed polynomial order");
    if (window > n)
        throw Error(Errc::invalid_window, "window exceeds series length");

    const int m = window / 2;
    const int p = poly_order;

    // design matrix over window offsets -m..m
    Eigen::MatrixXd design(window, p + 1);
    for (int i = 0; i < window; ++i) {
        double x = i - m;
        double pw = 1.0;
        for (int k = 0; k <= p; ++k) {
            design(i, k) = pw;
            pw *= x;
        }
    }
    // evaluate the window's least-squares fit at offset x
    auto fit_eval = [&](const double* y, double x) {
        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(y, window);
        Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);
        double acc = 0.0, pw = 1.0;
        for (int k = 0; k <= p; ++k) {
            acc += beta(k) * pw;
            pw *= x;
        }
        return acc;
    };

    PriceSeries out = series;
    out.warnings.clear();
    const double* y = series.prices.data();
    for (int i = 0; i < n; ++i) {
        if (i < m)
            out.prices[i] = fit_eval(y, static_cast<double>(i - m)); // fit over first window
        else if (i >= n - m)
            out.prices[i] = fit_eval(y + (n - window), static_cast<double>(i - (n - 1 - m))); // last window
        else
            out.prices[i] = fit_eval(y + (i - m), 0.0);
    }
    return out;
}

namespace {

year_month_day nth_weekday(int year, unsigned month, std::chrono::weekday wd, unsigned nth) {
    return year_month_day{sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::weekday_indexed{wd, nth}}};
}

year_month_day last_weekday(int year, unsigned month, std::chrono::weekday wd) {
    return year_month_day{sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::weekday_last{wd}}};
}

// Fixed-date holidays falling on Saturday are observed the preceding Friday,
// on Sunday the following Monday.
year_month_day observed(year_month_day date) {
    std::chrono::weekday wd{sys_days{date}};
    if (wd == std::chrono::Saturday) return year_month_day{sys_days{date} - std::chrono::days{1}};
    if (wd == std::chrono::Sunday) return year_month_day{sys_days{date} + std::chrono::days{1}};
    return date;
}

} // namespace

WorkCalendar make_work_calendar(int year) {
    using namespace std::chrono;
    WorkCalendar cal;
    cal.year = year;
    auto add_fixed = [&](int y, unsigned month, unsigned day) {
        year_month_day obs = observed(year_month_day{std::chrono::year{y} / month / day});
        if (static_cast<int>(obs.year()) == year) cal.holidays.insert(obs);
    };
    add_fixed(year, 1, 1);              // New Year's Day
    add_fixed(year + 1, 1, 1);          // next New Year observed Dec 31 when Jan 1 is a Saturday
    if (year >= 2021) add_fixed(year, 6, 19); // Juneteenth
    add_fixed(year, 7, 4);              // Independence Day
    add_fixed(year, 11, 11);            // Veterans Day
    add_fixed(year, 12, 25);            // Christmas Day
    cal.holidays.insert(nth_weekday(year, 1, Monday, 3));   // MLK Day
    cal.holidays.insert(nth_weekday(year, 2, Monday, 3));   // Washington's Birthday
    cal.holidays.insert(last_weekday(year, 5, Monday));     // Memorial Day
    cal.holidays.insert(nth_weekday(year, 9, Monday, 1));   // Labor Day
    cal.holidays.insert(nth_weekday(year, 10, Monday, 2));  // Columbus Day
    cal.holidays.insert(nth_weekday(year, 11, Thursday, 4)); // Thanksgiving
    return cal;
}

bool is_working_day(const WorkCalendar& calendar, year_month_day date) {
    if (static_cast<int>(date.year()) != calendar.year)
        throw Error(Errc::date_out_of_range, "date outside calendar year " + std::to_string(calendar.year));
    std::chrono::weekday wd{sys_days{date}};
    if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) return false;
    return calendar.holidays.find(date) == calendar.holidays.end();
}

double price_percentile(const PriceSeries& series, double q) {
    if (series.prices.empty()) throw Error(Errc::empty_input, "percentile of empty series");
    if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::q_out_of_range, "quantile must lie in [0,1]");
    std::vector<double> sorted = series.prices;
    std::sort(sorted.begin(), sorted.end());
    double h = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace v2g
