#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "v2g/engine.hpp"

namespace v2g {

struct OptimizerConfig {
    double p_min = 0.0;
    double p_max = 0.0;      // callers default this to the 99th price percentile
    int n_init = 6;          // initial space-filling evaluations
    int n_iter = 24;         // acquisition-driven evaluations
    double noise_floor = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EvaluationRecord {
    double p;
    double objective;
    int iteration;
};

struct OptimizeResult {
    double p_star = 0.0;
    double n_star = 0.0;
    bool degenerate = false; // objective was flat over every evaluation
    std::vector<EvaluationRecord> trace;
};

struct GridResult {
    double p_best = 0.0;
    double n_best = 0.0;
};

using Objective = std::function<double(double)>;

// Gaussian-process surrogate maximization of a scalar objective over
// [p_min, p_max]: squared-exponential kernel on normalized inputs,
// length-scale from the median pairwise distance, expected improvement
// maximized over a dense candidate grid. Returns the best evaluated point.
OptimizeResult maximize_surrogate(const Objective& objective, const OptimizerConfig& config);

// Exhaustive enumeration at fixed resolution; ties break toward smaller p.
GridResult grid_maximize(const Objective& objective, double p_min, double p_max, double resolution);

// Both entry points optimize annual net profit in OSP mode over the selling
// price, sharing one precomputed year plan across evaluations.
OptimizeResult optimize_osp(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                            const ScenarioConfig& scenario_template, const OptimizerConfig& config);

GridResult grid_search_osp(const UserProfile& profile, const PriceSeries& prices, const WorkCalendar& calendar,
                           const ScenarioConfig& scenario_template, const OptimizerConfig& config, double resolution);

} // namespace v2g
