#include "v2g/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>

#include "v2g/errors.hpp"
#include "v2g/util.hpp"

namespace v2g {

void OptimizerConfig::validate() const {
    if (!(p_min < p_max)) throw Error(Errc::config_error, "optimizer requires p_min < p_max");
    if (n_init < 2) throw Error(Errc::config_error, "optimizer requires n_init >= 2");
    if (n_iter < 0) throw Error(Errc::config_error, "optimizer requires n_iter >= 0");
    if (noise_floor < 0) throw Error(Errc::config_error, "noise_floor must be nonnegative");
}

namespace {

constexpr int kCandidates = 1000;
constexpr double kDuplicateTol = 1e-12;

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double median_pairwise_distance(const std::vector<double>& xs) {
    std::vector<double> d;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) d.push_back(std::abs(xs[i] - xs[j]));
    if (d.empty()) return 0.1;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    double med = d[d.size() / 2];
    return std::max(med, 1e-3);
}

} // namespace

OptimizeResult maximize_surrogate(const Objective& objective, const OptimizerConfig& config) {
    config.validate();
    const double span = config.p_max - config.p_min;
    const double jitter = std::max(config.noise_floor, 1e-12);

    std::vector<double> xs;     // normalized evaluated inputs
    std::vector<double> ys;     // raw objective values
    OptimizeResult result;
    auto evaluate = [&](double x, int iteration) {
        double p = config.p_min + x * span;
        double y = objective(p);
        xs.push_back(x);
        ys.push_back(y);
        result.trace.push_back({p, y, iteration});
    };

    // space-filling start: evenly spaced over the whole interval
    for (int i = 0; i < config.n_init; ++i)
        evaluate(static_cast<double>(i) / static_cast<double>(config.n_init - 1), i);

    // seeded sub-step offset of the acquisition grid
    std::uint64_t seed_state = config.seed;
    const double grid_offset = static_cast<double>(splitmix64(seed_state) >> 11) * 0x1.0p-53;

    for (int it = 0; it < config.n_iter; ++it) {
        const int n = static_cast<int>(xs.size());
        double y_mean = 0.0, y_var = 0.0;
        for (double y : ys) y_mean += y;
        y_mean /= n;
        for (double y : ys) y_var += (y - y_mean) * (y - y_mean);
        double y_scale = std::sqrt(y_var / n);
        if (y_scale < 1e-12) y_scale = 1.0; // flat so far; keep exploring

        const double ell = median_pairwise_distance(xs);
        Eigen::MatrixXd K(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double d = (xs[i] - xs[j]) / ell;
                K(i, j) = std::exp(-0.5 * d * d);
            }
        K.diagonal().array() += jitter;
        Eigen::VectorXd yv(n);
        for (int i = 0; i < n; ++i) yv(i) = (ys[i] - y_mean) / y_scale;
        Eigen::LDLT<Eigen::MatrixXd> chol(K);
        Eigen::VectorXd alpha = chol.solve(yv);

        const double y_best = (*std::max_element(ys.begin(), ys.end()) - y_mean) / y_scale;

        double best_ei = -1.0, best_sigma = -1.0;
        double ei_x = -1.0, sigma_x = -1.0;
        for (int c = 0; c < kCandidates; ++c) {
            double x = (static_cast<double>(c) + grid_offset) / static_cast<double>(kCandidates);
            bool seen = false;
            for (double xe : xs)
                if (std::abs(xe - x) < kDuplicateTol) { seen = true; break; }
            if (seen) continue;

            Eigen::VectorXd k_star(n);
            for (int i = 0; i < n; ++i) {
                double d = (xs[i] - x) / ell;
                k_star(i) = std::exp(-0.5 * d * d);
            }
            double mu = k_star.dot(alpha);
            double var = 1.0 + jitter - k_star.dot(chol.solve(k_star));
            double sigma = std::sqrt(std::max(var, 0.0));

            double ei = 0.0;
            if (sigma > 1e-12) {
                double z = (mu - y_best) / sigma;
                ei = (mu - y_best) * norm_cdf(z) + sigma * norm_pdf(z);
            } else if (mu > y_best) {
                ei = mu - y_best;
            }
            if (ei > best_ei) { best_ei = ei; ei_x = x; }
            if (sigma > best_sigma) { best_sigma = sigma; sigma_x = x; }
        }
        // all candidates coincide with evaluated points: budget saturated
        if (ei_x < 0 && sigma_x < 0) break;
        double next_x = best_ei > 1e-14 ? ei_x : sigma_x; // flat EI: fall back to max variance
        evaluate(next_x, config.n_init + it);
    }

    // best evaluated pair, ties toward smaller p
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        if (result.trace[i].objective > result.trace[best].objective ||
            (result.trace[i].objective == result.trace[best].objective && result.trace[i].p < result.trace[best].p))
            best = i;
    }
    result.p_star = result.trace[best].p;
    result.n_star = result.trace[best].objective;

    auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    if (*hi - *lo <= 1e-9 * std::max(1.0, std::abs(*hi))) {
        result.degenerate = true;
        result.p_star = 0.5 * (config.p_min + config.p_max);
    }
    return result;
}

GridResult grid_maximize(const Objective& objective, double p_min, double p_max, double resolution) {
    if (!(resolution > 0)) throw Error(Errc::config_error, "grid resolution must be positive");
    if (!(p_min < p_max)) throw Error(Errc::config_error, "grid requires p_min < p_max");
    GridResult best;
    bool first = true;
    for (long long k = 0;; ++k) {
        double p = p_min + static_cast<double>(k) * resolution;
        if (p > p_max + resolution * 1e-9) break;
        double y = objective(p);
        if (first || y > best.n_best) {
            best = {p, y};
            first = false;
        }
    }
    return best;
}

namespace {

Objective osp_objective(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                        const ScenarioConfig& scenario_template) {
    ScenarioConfig scenario = scenario_template;
    scenario.mode = Mode::osp;
    scenario.selling_price = 0.0;
    auto plan = std::make_shared<YearPlan>(build_year_plan(profile, calendar, scenario));
    const PriceSeries* series = &prices;
    return [plan, series](double p) { return simulate_plan(*plan, *series, Mode::osp, p).net; };
}

} // namespace

OptimizeResult optimize_osp(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                            const ScenarioConfig& scenario_template, const OptimizerConfig& config) {
    return maximize_surrogate(osp_objective(profile, prices, calendar, scenario_template), config);
}

GridResult grid_search_osp(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                           const ScenarioConfig& scenario_template, const OptimizerConfig& config, double resolution) {
    return grid_maximize(osp_objective(profile, prices, calendar, scenario_template), config.p_min, config.p_max,
                         resolution);
}

} // namespace v2g
