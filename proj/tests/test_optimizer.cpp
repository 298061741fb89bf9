#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "v2g/errors.hpp"
#include "v2g/optimizer.hpp"
#include "v2g/timeseries.hpp"

using namespace v2g;

namespace {

OptimizerConfig config(double lo, double hi, int n_init = 6, int n_iter = 24) {
    OptimizerConfig c;
    c.p_min = lo;
    c.p_max = hi;
    c.n_init = n_init;
    c.n_iter = n_iter;
    c.seed = 5;
    return c;
}

UserProfile peak_worker() {
    UserProfile u;
    u.commute_distance_mi = 10.0;
    u.commute_time_h = 0.5;
    u.work_start_h = 10.0;
    u.weekly_hours = 50.0;
    u.vacation_weeks = 0;
    u.ev_capacity_kwh = 60.0;
    u.ev_range_miles = 240.0;
    u.rng_seed = 3;
    return u;
}

PriceSeries two_level_series() {
    PriceSeries s;
    s.city_id = "twolevel";
    s.start = std::chrono::year_month_day{std::chrono::year{2019} / 1 / 1};
    s.prices.assign(8760, 0.02);
    for (int h = 0; h < 8760; ++h)
        if (h % 24 >= 17 && h % 24 <= 19) s.prices[h] = 0.30;
    return s;
}

ScenarioConfig osp_scenario() {
    ScenarioConfig s;
    s.mode = Mode::osp;
    s.year = 2019;
    s.degradation.b1 = 0.0;
    s.degradation.c1 = 0.0;
    return s;
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(0.2, 0.1).validate(), Error);
    CHECK_THROWS_AS(config(0.0, 0.1, 1).validate(), Error);
    CHECK_THROWS_AS(config(0.0, 0.1, 6, -1).validate(), Error);
    CHECK_NOTHROW(config(0.0, 0.1).validate());
}

TEST_CASE("grid: argmax of three known values") {
    auto objective = [](double p) {
        if (p < 0.5) return 1.0;
        if (p < 1.5) return 3.0;
        return 2.0;
    };
    GridResult r = grid_maximize(objective, 0.0, 2.0, 1.0); // evaluates 0, 1, 2
    CHECK(r.p_best == doctest::Approx(1.0));
    CHECK(r.n_best == doctest::Approx(3.0));
}

TEST_CASE("grid: plateau ties break toward smaller p") {
    auto plateau = [](double p) { return p >= 0.3 && p <= 0.7 ? 5.0 : 0.0; };
    GridResult r = grid_maximize(plateau, 0.0, 1.0, 0.1);
    CHECK(r.p_best == doctest::Approx(0.3));
    CHECK(r.n_best == doctest::Approx(5.0));
}

TEST_CASE("grid: refinement never finds a worse optimum") {
    auto objective = [](double p) { return std::sin(17.0 * p) + 0.3 * std::cos(5.0 * p); };
    double prev = -1e300;
    for (double res : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        GridResult r = grid_maximize(objective, 0.0, 1.0, res);
        CHECK(r.n_best >= prev - 1e-12);
        prev = r.n_best;
    }
}

TEST_CASE("surrogate: flat objective is flagged degenerate") {
    int calls = 0;
    auto flat = [&](double) {
        ++calls;
        return 7.25;
    };
    OptimizeResult r = maximize_surrogate(flat, config(0.0, 1.0, 4, 6));
    CHECK(r.degenerate);
    CHECK(r.n_star == doctest::Approx(7.25));
    CHECK(r.p_star == doctest::Approx(0.5));
    CHECK(calls == static_cast<int>(r.trace.size()));
}

TEST_CASE("surrogate: finds a smooth interior optimum") {
    auto bump = [](double p) { return -(p - 0.37) * (p - 0.37); };
    OptimizeResult r = maximize_surrogate(bump, config(0.0, 1.0));
    CHECK_FALSE(r.degenerate);
    CHECK(r.p_star == doctest::Approx(0.37).epsilon(0.05));
    CHECK(r.n_star > -0.001);
}

TEST_CASE("surrogate: n_star equals the best traced objective") {
    auto wavy = [](double p) { return std::sin(9.0 * p) - 0.2 * p; };
    OptimizeResult r = maximize_surrogate(wavy, config(0.0, 1.0));
    double best = -1e300;
    for (const auto& rec : r.trace) best = std::max(best, rec.objective);
    CHECK(r.n_star == doctest::Approx(best));
}

TEST_CASE("surrogate with n_iter=0 and grid-covering inits equals grid search") {
    auto objective = [](double p) { return std::cos(3.0 * p) + 0.1 * p; };
    const int points = 21; // inits at exactly the grid resolution
    OptimizeResult surrogate = maximize_surrogate(objective, config(0.0, 2.0, points, 0));
    GridResult grid = grid_maximize(objective, 0.0, 2.0, 2.0 / (points - 1));
    CHECK(surrogate.p_star == doctest::Approx(grid.p_best).epsilon(1e-12));
    CHECK(surrogate.n_star == doctest::Approx(grid.n_best).epsilon(1e-12));
}

TEST_CASE("osp: plateau objective lands inside the profitable band") {
    UserProfile u = peak_worker();
    WorkCalendar cal = make_work_calendar(2019);
    PriceSeries prices = two_level_series();
    ScenarioConfig s = osp_scenario();
    OptimizerConfig cfg = config(0.0, 0.30);

    OptimizeResult r = optimize_osp(u, prices, cal, s, cfg);
    CHECK_FALSE(r.degenerate);
    CHECK(r.p_star > 0.02);
    CHECK(r.p_star < 0.30);
    // every p strictly between the two price levels yields the same dispatch
    GridResult oracle = grid_search_osp(u, prices, cal, s, cfg, 0.01);
    CHECK(r.n_star == doctest::Approx(oracle.n_best).epsilon(1e-9));
}

TEST_CASE("osp: deterministic given the seed") {
    UserProfile u = peak_worker();
    WorkCalendar cal = make_work_calendar(2019);
    PriceSeries prices = two_level_series();
    ScenarioConfig s = osp_scenario();
    OptimizeResult a = optimize_osp(u, prices, cal, s, config(0.0, 0.30));
    OptimizeResult b = optimize_osp(u, prices, cal, s, config(0.0, 0.30));
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].p == b.trace[i].p);
        CHECK(a.trace[i].objective == b.trace[i].objective);
    }
    CHECK(a.p_star == b.p_star);
}

TEST_CASE("osp: optimized user never does worse than the price-taker") {
    UserProfile u = peak_worker();
    WorkCalendar cal = make_work_calendar(2019);
    PriceSeries prices = two_level_series();
    ScenarioConfig s = osp_scenario();
    s.degradation = DegradationParams{}; // default fade rates

    OptimizeResult r = optimize_osp(u, prices, cal, s, config(0.0, 0.30));
    ScenarioConfig at_star = s;
    at_star.selling_price = r.p_star;
    double osp_savings = annual_savings(u, prices, cal, at_star);
    ScenarioConfig taker = s;
    taker.mode = Mode::price_taker;
    double taker_savings = annual_savings(u, prices, cal, taker);
    CHECK(osp_savings >= taker_savings - 1e-9);
    CHECK(osp_savings >= -1.0);
}
