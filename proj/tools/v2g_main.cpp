// v2g: vehicle-to-grid savings simulator CLI.
//
// Subcommands map onto the study machinery: `simulate` runs one user-year,
// `study` produces per-user savings distributions, `sweep` and `cost-study`
// rerun the OSP study over efficiency/rate grids and projected battery
// costs, `smooth` denoises a price file for plotting.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "v2g/config.hpp"
#include "v2g/engine.hpp"
#include "v2g/errors.hpp"
#include "v2g/montecarlo.hpp"
#include "v2g/population.hpp"
#include "v2g/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code_for(v2g::Errc code) {
    switch (code) {
    case v2g::Errc::config_error:
    case v2g::Errc::invalid_window:
    case v2g::Errc::q_out_of_range:
        return 2;
    case v2g::Errc::infeasible_population:
        return 4;
    default:
        return 3;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw v2g::Error(v2g::Errc::config_error, "cannot write " + path.string());
    out << content;
}

std::string users_csv(const v2g::SavingsDistribution& dist) {
    std::string csv = v2g::annual_result_csv_header();
    csv += '\n';
    for (const auto& row : dist.rows) {
        csv += v2g::annual_result_csv_row(row.user_id, dist.mode, row.p, row.result, row.savings);
        csv += '\n';
    }
    return csv;
}

ordered_json aggregates_json(const v2g::Aggregates& agg) {
    return ordered_json{{"mean", agg.mean}, {"q25", agg.q25}, {"q50", agg.q50},
                        {"q75", agg.q75},   {"min", agg.min}, {"max", agg.max}};
}

int cmd_simulate(const std::string& config_path, long user_seed, const std::string& mode_name, double p, int jobs) {
    (void)jobs;
    v2g::RunConfig cfg = v2g::load_run_config(config_path);
    v2g::DataBundle bundle = v2g::load_bundle(cfg);

    std::uint64_t seed;
    if (user_seed >= 0) {
        seed = static_cast<std::uint64_t>(user_seed);
    } else {
        std::uint64_t state = cfg.study.master_seed;
        seed = v2g::splitmix64(state); // first user of the study population
    }
    v2g::UserProfile profile =
        v2g::sample_user(bundle.commute, bundle.work, bundle.catalog, cfg.battery.dod, seed);

    v2g::ScenarioConfig scenario = v2g::base_scenario(cfg);
    scenario.mode = v2g::mode_from_string(mode_name);
    scenario.selling_price = p;

    v2g::AnnualResult result = v2g::simulate_year(profile, bundle.prices, bundle.calendar, scenario);
    double savings = scenario.mode == v2g::Mode::commute_only
                         ? 0.0
                         : v2g::annual_savings(profile, bundle.prices, bundle.calendar, scenario);

    std::string csv = v2g::annual_result_csv_header() + "\n" +
                      v2g::annual_result_csv_row(0, scenario.mode, scenario.selling_price, result, savings) + "\n";
    std::cout << csv;
    write_file(fs::path(cfg.output_dir) / "simulate.csv", csv);
    return 0;
}

int cmd_study(const std::string& config_path, int jobs) {
    v2g::RunConfig cfg = v2g::load_run_config(config_path);
    cfg.study.jobs = jobs;
    v2g::DataBundle bundle = v2g::load_bundle(cfg);
    v2g::ScenarioConfig base = v2g::base_scenario(cfg);

    auto distributions = v2g::run_population_study(cfg.study, bundle, base, cfg.optimizer);

    const fs::path out(cfg.output_dir);
    ordered_json summary;
    summary["city_id"] = cfg.study.city_id;
    summary["population_size"] = cfg.study.population_size;
    summary["master_seed"] = cfg.study.master_seed;
    summary["config"] = cfg.raw;
    for (const auto& dist : distributions) {
        write_file(out / ("users_" + std::string(v2g::mode_name(dist.mode)) + ".csv"), users_csv(dist));
        summary["scenarios"][v2g::mode_name(dist.mode)] = aggregates_json(dist.savings);
        if (dist.mode == v2g::Mode::osp) {
            std::vector<double> osps;
            for (const auto& row : dist.rows) osps.push_back(row.p);
            summary["scenarios"]["osp"]["p_star"] = aggregates_json(v2g::aggregate(osps));
        }
    }

    // plot-ready projections of the OSP arm (first arm when OSP is absent)
    const v2g::SavingsDistribution* plot_arm = &distributions.front();
    for (const auto& dist : distributions)
        if (dist.mode == v2g::Mode::osp) plot_arm = &dist;
    std::string schedule_csv = "t_w,commute_time,savings\n";
    std::string hours_csv = "weekly_hours,capacity_kwh,savings\n";
    for (const auto& row : plot_arm->rows) {
        schedule_csv += v2g::format_double(row.profile.work_start_h) + "," +
                        v2g::format_double(row.profile.commute_time_h) + "," + v2g::format_double(row.savings) + "\n";
        hours_csv += v2g::format_double(row.profile.weekly_hours) + "," +
                     v2g::format_double(row.profile.ev_capacity_kwh) + "," + v2g::format_double(row.savings) + "\n";
    }
    write_file(out / "savings_vs_schedule.csv", schedule_csv);
    write_file(out / "savings_vs_hours.csv", hours_csv);
    write_file(out / "summary.json", summary.dump(2) + "\n");
    std::cout << "study " << cfg.study.city_id << ": " << distributions.front().rows.size() << " users";
    for (const auto& dist : distributions)
        std::cout << ", " << v2g::mode_name(dist.mode) << " mean savings $" << dist.savings.mean;
    std::cout << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, int jobs) {
    v2g::RunConfig cfg = v2g::load_run_config(config_path);
    cfg.study.jobs = jobs;
    v2g::DataBundle bundle = v2g::load_bundle(cfg);

    auto cells = v2g::sweep_efficiency_rate(cfg.study, bundle, v2g::base_scenario(cfg), cfg.optimizer);
    std::string csv = "eta,r_ch,mean_savings,q25,q50,q75\n";
    for (const auto& cell : cells) {
        csv += v2g::format_double(cell.eta) + "," + v2g::format_double(cell.rate_kw) + "," +
               v2g::format_double(cell.savings.mean) + "," + v2g::format_double(cell.savings.q25) + "," +
               v2g::format_double(cell.savings.q50) + "," + v2g::format_double(cell.savings.q75) + "\n";
    }
    write_file(fs::path(cfg.output_dir) / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_cost_study(const std::string& config_path, int jobs) {
    v2g::RunConfig cfg = v2g::load_run_config(config_path);
    cfg.study.jobs = jobs;
    if (cfg.cost_history_path.empty())
        throw v2g::Error(v2g::Errc::config_error, "cost-study needs [paths] cost_history");
    v2g::DataBundle bundle = v2g::load_bundle(cfg);

    auto projection = v2g::fit_battery_cost(v2g::load_cost_history_file(cfg.cost_history_path));
    auto rows = v2g::battery_cost_study(cfg.study, bundle, v2g::base_scenario(cfg), cfg.optimizer, projection);

    std::string csv = "year,c_b,mean_savings\n";
    for (const auto& row : rows)
        csv += std::to_string(row.year) + "," + v2g::format_double(row.capital_cost) + "," +
               v2g::format_double(row.mean_savings) + "\n";
    write_file(fs::path(cfg.output_dir) / "cost_study.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_smooth(const std::string& input, int window, int order, std::string output, const std::string& city) {
    v2g::PriceSeries series = v2g::parse_price_file(input, city);
    v2g::PriceSeries smoothed = v2g::smooth_prices(series, window, order);
    if (output.empty()) {
        fs::path p(input);
        output = (p.parent_path() / (p.stem().string() + "_smoothed.csv")).string();
    }
    write_file(output, v2g::serialize_price_csv(smoothed));
    std::cout << "wrote " << output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"v2g: stochastic vehicle-to-grid savings simulator"};
    app.require_subcommand(1);

    std::string config_path, mode = "price_taker", smooth_input, smooth_output, city = "city";
    long user_seed = -1;
    double p = 0.0;
    int jobs = 0, window = 11, order = 3;

    auto* sim = app.add_subcommand("simulate", "simulate a single user-year");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--user-seed", user_seed, "explicit profile seed (default: first study user)");
    sim->add_option("--mode", mode, "price_taker | osp | commute_only");
    sim->add_option("--p", p, "selling price $/kWh for osp mode");

    auto* study = app.add_subcommand("study", "population savings study");
    study->add_option("--config", config_path, "run configuration file")->required();
    study->add_option("--jobs", jobs, "worker threads (0 = all cores, 1 = serial)");

    auto* sweep = app.add_subcommand("sweep", "efficiency x charging-rate sweep");
    sweep->add_option("--config", config_path, "run configuration file")->required();
    sweep->add_option("--jobs", jobs, "worker threads (0 = all cores, 1 = serial)");

    auto* cost = app.add_subcommand("cost-study", "savings under projected battery costs");
    cost->add_option("--config", config_path, "run configuration file")->required();
    cost->add_option("--jobs", jobs, "worker threads (0 = all cores, 1 = serial)");

    auto* smooth = app.add_subcommand("smooth", "Savitzky-Golay smoothing of a price file");
    smooth->add_option("prices", smooth_input, "price CSV to smooth")->required();
    smooth->add_option("--window", window, "odd window length");
    smooth->add_option("--order", order, "polynomial order");
    smooth->add_option("--output", smooth_output, "output path (default: <input>_smoothed.csv)");
    smooth->add_option("--city", city, "city label for the output series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad flags are configuration errors
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, user_seed, mode, p, jobs);
        if (study->parsed()) return cmd_study(config_path, jobs);
        if (sweep->parsed()) return cmd_sweep(config_path, jobs);
        if (cost->parsed()) return cmd_cost_study(config_path, jobs);
        if (smooth->parsed()) return cmd_smooth(smooth_input, window, order, smooth_output, city);
    } catch (const v2g::Error& e) {
        std::cerr << "error (" << v2g::errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
