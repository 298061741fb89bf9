// Compares the serial reference path against the OpenMP fan-out on the same
// population study and checks that both produce identical results.
//
// usage: v2g_bench <config> [users]

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "v2g/config.hpp"
#include "v2g/montecarlo.hpp"
#include "v2g/parallel.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double run_study(const v2g::RunConfig& cfg, const v2g::DataBundle& bundle, int jobs,
                 std::vector<v2g::SavingsDistribution>& out) {
    v2g::StudyConfig study = cfg.study;
    study.jobs = jobs;
    auto t0 = clock_type::now();
    out = v2g::run_population_study(study, bundle, v2g::base_scenario(cfg), cfg.optimizer);
    auto t1 = clock_type::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

bool identical(const std::vector<v2g::SavingsDistribution>& a, const std::vector<v2g::SavingsDistribution>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s].rows.size() != b[s].rows.size()) return false;
        for (std::size_t i = 0; i < a[s].rows.size(); ++i) {
            if (a[s].rows[i].savings != b[s].rows[i].savings) return false;
            if (a[s].rows[i].p != b[s].rows[i].p) return false;
            if (a[s].rows[i].result.net != b[s].rows[i].result.net) return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: v2g_bench <config> [users]\n";
        return 2;
    }
    try {
        v2g::RunConfig cfg = v2g::load_run_config(argv[1]);
        if (argc > 2) cfg.study.population_size = std::atoi(argv[2]);
        v2g::DataBundle bundle = v2g::load_bundle(cfg);

        std::vector<v2g::SavingsDistribution> serial_result, parallel_result;
        double t_serial = run_study(cfg, bundle, 1, serial_result);
        int threads = v2g::hardware_jobs();
        double t_parallel = run_study(cfg, bundle, threads, parallel_result);

        std::cout << "users:            " << cfg.study.population_size << "\n"
                  << "serial reference: " << t_serial << " s\n"
                  << "openmp x" << threads << ":        " << t_parallel << " s\n"
                  << "speedup:          " << t_serial / t_parallel << "\n"
                  << "results identical: " << (identical(serial_result, parallel_result) ? "yes" : "NO") << "\n";
        return identical(serial_result, parallel_result) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
