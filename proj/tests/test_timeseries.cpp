#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "v2g/errors.hpp"
#include "v2g/timeseries.hpp"

using namespace v2g;
using std::chrono::year_month_day;

namespace {

std::string hourly_csv(int year, unsigned month, unsigned day, int n_hours,
                       const std::vector<double>& values, int skip_hour = -1, int dup_hour = -1) {
    using namespace std::chrono;
    std::string csv = "timestamp,price_usd_per_kwh\n";
    sys_days start{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
    int written = 0;
    for (int i = 0; written < n_hours; ++i) {
        if (i == skip_hour) continue;
        year_month_day date{start + days{i / 24}};
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00:00,", static_cast<int>(date.year()),
                      static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()), i % 24);
        csv += buf;
        csv += std::to_string(values[written % values.size()]);
        csv += '\n';
        ++written;
        if (i == dup_hour) {
            csv += buf;
            csv += std::to_string(values[written % values.size()]);
            csv += '\n';
            ++written;
        }
    }
    return csv;
}

PriceSeries parse_string(const std::string& csv) {
    std::istringstream in(csv);
    return parse_price_csv(in, "test");
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::empty_input;
}

// brute-force sliding least-squares polynomial fit, solved by Gaussian
// elimination on the normal equations (independent of the filter path)
std::vector<double> savgol_oracle(const std::vector<double>& y, int window, int order) {
    const int n = static_cast<int>(y.size());
    const int m = window / 2;
    auto fit_at = [&](int first, double x) {
        const int p = order + 1;
        std::vector<std::vector<double>> g(p, std::vector<double>(p + 1, 0.0));
        for (int i = 0; i < window; ++i) {
            double xi = i - m;
            std::vector<double> pw(p);
            pw[0] = 1.0;
            for (int k = 1; k < p; ++k) pw[k] = pw[k - 1] * xi;
            for (int a = 0; a < p; ++a) {
                for (int b = 0; b < p; ++b) g[a][b] += pw[a] * pw[b];
                g[a][p] += pw[a] * y[first + i];
            }
        }
        for (int col = 0; col < p; ++col) { // elimination with partial pivoting
            int piv = col;
            for (int r = col + 1; r < p; ++r)
                if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
            std::swap(g[col], g[piv]);
            for (int r = 0; r < p; ++r) {
                if (r == col) continue;
                double f = g[r][col] / g[col][col];
                for (int c = col; c <= p; ++c) g[r][c] -= f * g[col][c];
            }
        }
        double acc = 0.0, xpow = 1.0;
        for (int k = 0; k < p; ++k) {
            acc += g[k][p] / g[k][k] * xpow;
            xpow *= x;
        }
        return acc;
    };
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        if (i < m)
            out[i] = fit_at(0, i - m);
        else if (i >= n - m)
            out[i] = fit_at(n - window, i - (n - 1 - m));
        else
            out[i] = fit_at(i - m, 0.0);
    }
    return out;
}

PriceSeries series_of(std::vector<double> values) {
    PriceSeries s;
    s.city_id = "test";
    s.start = year_month_day{std::chrono::year{2019} / 1 / 1};
    s.prices = std::move(values);
    return s;
}

} // namespace

TEST_CASE("parse: 24 constant rows pass through") {
    PriceSeries s = parse_string(hourly_csv(2019, 10, 1, 24, {0.05}));
    CHECK(s.size() == 24);
    CHECK(s.days() == 1);
    for (double p : s.prices) CHECK(p == doctest::Approx(0.05));
    CHECK(s.start == year_month_day{std::chrono::year{2019} / 10 / 1});
}

TEST_CASE("parse: missing mid-morning hour is a gap error") {
    std::string csv = hourly_csv(2019, 10, 1, 23, {0.05}, /*skip_hour=*/7);
    try {
        parse_string(csv);
        FAIL("expected MissingHours");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_hours);
        CHECK(std::string(e.what()).find("07:00") != std::string::npos);
    }
}

TEST_CASE("parse: 8760 rows make a 365 day year") {
    std::vector<double> vals{0.01, 0.02, 0.03, 0.07};
    PriceSeries s = parse_string(hourly_csv(2019, 1, 1, 8760, vals));
    CHECK(s.days() == 365);
    CHECK(s.size() == 8760);
}

TEST_CASE("parse: error taxonomy") {
    CHECK(code_of([] { parse_string(""); }) == Errc::empty_input);
    CHECK(code_of([] { parse_string("timestamp,price_usd_per_kwh\n"); }) == Errc::empty_input);
    // duplicate outside any DST slot
    CHECK(code_of([] {
              parse_string("timestamp,price_usd_per_kwh\n"
                           "2019-10-01T00:00:00,0.05\n"
                           "2019-10-01T01:00:00,0.05\n"
                           "2019-10-01T01:00:00,0.06\n");
          }) == Errc::duplicate_timestamp);
    CHECK(code_of([] {
              parse_string("timestamp,price_usd_per_kwh\n"
                           "2019-10-01T00:00:00,hello\n");
          }) == Errc::malformed_row);
    CHECK(code_of([] {
              parse_string("timestamp,price_usd_per_kwh\n"
                           "2019-10-01T00:30:00,0.05\n");
          }) == Errc::malformed_row);
    // partial final day violates the whole-days invariant
    CHECK(code_of([] { parse_string(hourly_csv(2019, 10, 1, 25, {0.05})); }) == Errc::missing_hours);
}

TEST_CASE("parse: row numbers are reported") {
    try {
        parse_string("timestamp,price_usd_per_kwh\n"
                     "2019-10-01T00:00:00,0.05\n"
                     "2019-10-01T01:00:00,oops\n");
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("parse: DST hours are normalized with warnings") {
    // 2019-11-03 is the fall-back Sunday: 01:00 appears twice
    std::string dup = hourly_csv(2019, 11, 3, 24, {0.10}, -1, /*dup_hour=*/1);
    PriceSeries s = parse_string(dup);
    CHECK(s.size() == 24);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("2019-11-03T01:00") != std::string::npos);

    // 2019-03-10 is spring-forward: 02:00 is absent from the export
    std::string skip = hourly_csv(2019, 3, 10, 23, {0.10, 0.40}, /*skip_hour=*/2);
    PriceSeries t = parse_string(skip);
    CHECK(t.size() == 24);
    REQUIRE(t.warnings.size() == 1);
    CHECK(t.prices[2] == doctest::Approx(0.5 * (t.prices[1] + t.prices[3])));
}

TEST_CASE("serialize: canonical round trip is bit exact") {
    PriceSeries s = series_of({0.05, -0.01, 0.3, 1.25, 0.0, 0.125, 2e-05, 0.9, 0.05, 0.05, 0.05, 0.05,
                               0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05});
    std::string once = serialize_price_csv(s);
    PriceSeries reparsed = parse_string(once);
    CHECK(reparsed.prices == s.prices);
    CHECK(serialize_price_csv(reparsed) == once);
}

TEST_CASE("smooth: constants survive any window") {
    PriceSeries s = series_of(std::vector<double>(48, 0.07));
    PriceSeries out = smooth_prices(s, 5, 2);
    REQUIRE(out.size() == s.size());
    for (double p : out.prices) CHECK(p == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("smooth: exact quadratic is reproduced everywhere") {
    std::vector<double> q(50);
    for (int i = 0; i < 50; ++i) q[i] = 0.8 - 0.03 * i + 0.002 * i * i;
    PriceSeries out = smooth_prices(series_of(q), 7, 2);
    for (int i = 0; i < 50; ++i) CHECK(out.prices[i] == doctest::Approx(q[i]).epsilon(1e-9));
}

TEST_CASE("smooth: matches the sliding least-squares oracle") {
    std::mt19937_64 gen(1234);
    std::vector<double> y(96);
    for (auto& v : y) v = 0.02 + 0.08 * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    PriceSeries out = smooth_prices(series_of(y), 11, 3);
    std::vector<double> expect = savgol_oracle(y, 11, 3);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(out.prices[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("smooth: filter is linear") {
    std::mt19937_64 gen(99);
    std::vector<double> x(72), y(72);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        y[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }
    const double a = 2.5, b = -1.3;
    std::vector<double> combo(72);
    for (std::size_t i = 0; i < x.size(); ++i) combo[i] = a * x[i] + b * y[i];
    PriceSeries sx = smooth_prices(series_of(x), 9, 2);
    PriceSeries sy = smooth_prices(series_of(y), 9, 2);
    PriceSeries sc = smooth_prices(series_of(combo), 9, 2);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(sc.prices[i] == doctest::Approx(a * sx.prices[i] + b * sy.prices[i]).epsilon(1e-9));
}

TEST_CASE("smooth: window validation") {
    PriceSeries s = series_of(std::vector<double>(24, 0.05));
    CHECK(code_of([&] { smooth_prices(s, 4, 2); }) == Errc::invalid_window);
    CHECK(code_of([&] { smooth_prices(s, 5, 5); }) == Errc::invalid_window);
    CHECK(code_of([&] { smooth_prices(s, 25, 2); }) == Errc::invalid_window);
}

TEST_CASE("calendar: observed federal holidays") {
    WorkCalendar cal2019 = make_work_calendar(2019);
    CHECK_FALSE(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 7 / 4}));
    CHECK(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 10 / 2}));
    CHECK_FALSE(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 1 / 1}));
    // Thanksgiving and an ordinary Sunday
    CHECK_FALSE(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 11 / 28}));
    CHECK_FALSE(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 11 / 3}));
    // Juneteenth only became federal in 2021
    CHECK(is_working_day(cal2019, year_month_day{std::chrono::year{2019} / 6 / 19}));
    WorkCalendar cal2022 = make_work_calendar(2022);
    CHECK_FALSE(is_working_day(cal2022, year_month_day{std::chrono::year{2022} / 6 / 20})); // observed Monday
    // July 4 2021 fell on a Sunday: observed Monday July 5
    WorkCalendar cal2021 = make_work_calendar(2021);
    CHECK_FALSE(is_working_day(cal2021, year_month_day{std::chrono::year{2021} / 7 / 5}));
    // New Year 2022 fell on a Saturday: observed on New Year's Eve 2021
    CHECK_FALSE(is_working_day(cal2021, year_month_day{std::chrono::year{2021} / 12 / 31}));
}

TEST_CASE("calendar: date outside year is rejected") {
    WorkCalendar cal = make_work_calendar(2019);
    CHECK(code_of([&] { is_working_day(cal, year_month_day{std::chrono::year{2020} / 1 / 1}); }) ==
          Errc::date_out_of_range);
}

TEST_CASE("calendar: US working-day count stays in the sane band") {
    using namespace std::chrono;
    for (int y = 2015; y <= 2030; ++y) {
        WorkCalendar cal = make_work_calendar(y);
        sys_days d{std::chrono::year{y} / 1 / 1};
        int count = 0;
        while (year_month_day{d}.year() == std::chrono::year{y}) {
            if (is_working_day(cal, year_month_day{d})) ++count;
            d += days{1};
        }
        CAPTURE(y);
        CHECK(count >= 249);
        CHECK(count <= 253);
    }
}

TEST_CASE("percentile: interpolation and bounds") {
    PriceSeries two = series_of({0.0, 0.1});
    CHECK(price_percentile(two, 0.5) == doctest::Approx(0.05));
    CHECK(price_percentile(two, 1.0) == doctest::Approx(0.1));
    CHECK(price_percentile(two, 0.0) == doctest::Approx(0.0));
    CHECK(code_of([&] { price_percentile(two, 1.5); }) == Errc::q_out_of_range);
    CHECK(code_of([&] { price_percentile(two, -0.1); }) == Errc::q_out_of_range);
}

TEST_CASE("percentile: matches the full-sort oracle on random data") {
    std::mt19937_64 gen(7);
    std::vector<double> values(1000);
    for (auto& v : values) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    PriceSeries s = series_of(values);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double h = 0.99 * 999.0;
    std::size_t lo = static_cast<std::size_t>(h);
    double expect = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    CHECK(price_percentile(s, 0.99) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(price_percentile(s, 1.0) == doctest::Approx(sorted.back()));
}
