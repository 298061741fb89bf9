#include "v2g/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "v2g/errors.hpp"
#include "v2g/util.hpp"

namespace v2g {

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config_error, "cannot open config: " + path);
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string line, section;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']')
                throw Error(Errc::config_error, path + ":" + std::to_string(row) + ": unterminated section");
            section = std::string(trim(sv.substr(1, sv.size() - 2)));
            continue;
        }
        std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::config_error, path + ":" + std::to_string(row) + ": expected key = value");
        std::string key(trim(sv.substr(0, eq)));
        std::string value(trim(sv.substr(eq + 1)));
        if (section.empty())
            throw Error(Errc::config_error, path + ":" + std::to_string(row) + ": key outside any section");
        if (!sections[section].insert({key, value}).second)
            throw Error(Errc::config_error, path + ":" + std::to_string(row) + ": duplicate key '" + key + "'");
    }
    return sections;
}

class SectionReader {
  public:
    SectionReader(const RunConfig& cfg, std::string section) : cfg_(cfg), section_(std::move(section)) {}

    bool has(const std::string& key) const {
        auto sec = cfg_.raw.find(section_);
        return sec != cfg_.raw.end() && sec->second.count(key) > 0;
    }

    std::string str(const std::string& key) const {
        auto sec = cfg_.raw.find(section_);
        if (sec == cfg_.raw.end() || !sec->second.count(key))
            throw Error(Errc::config_error, "config missing [" + section_ + "] " + key);
        return sec->second.at(key);
    }

    std::string str_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? str(key) : fallback;
    }

    double num(const std::string& key) const { return to_double(str(key), key); }
    double num_or(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

    long integer_or(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        std::string v = str(key);
        long out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            throw Error(Errc::config_error, "config [" + section_ + "] " + key + ": bad integer '" + v + "'");
        return out;
    }

    std::vector<double> num_list_or(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (std::string_view field : split_csv_line(str(key))) out.push_back(to_double(std::string(trim(field)), key));
        return out;
    }

  private:
    double to_double(const std::string& v, const std::string& key) const {
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            throw Error(Errc::config_error, "config [" + section_ + "] " + key + ": bad number '" + v + "'");
        return out;
    }

    const RunConfig& cfg_;
    std::string section_;
};

std::string resolve_path(const fs::path& base, const std::string& value, const std::string& key) {
    fs::path p(value);
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) throw Error(Errc::config_error, "config path for " + key + " does not exist: " + p.string());
    return p.string();
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    cfg.raw = parse_ini(path);
    const fs::path base = fs::path(path).parent_path();

    SectionReader paths(cfg, "paths");
    cfg.prices_path = resolve_path(base, paths.str("prices"), "prices");
    cfg.commute_path = resolve_path(base, paths.str("commute"), "commute");
    cfg.work_arrival_path = resolve_path(base, paths.str("work_arrival"), "work_arrival");
    cfg.work_hours_path = resolve_path(base, paths.str("work_hours"), "work_hours");
    cfg.ev_catalog_path = resolve_path(base, paths.str("ev_catalog"), "ev_catalog");
    if (paths.has("cost_history")) cfg.cost_history_path = resolve_path(base, paths.str("cost_history"), "cost_history");
    {
        fs::path out(paths.str_or("output_dir", "out"));
        if (out.is_relative()) out = base / out;
        cfg.output_dir = out.string();
    }

    SectionReader battery(cfg, "battery");
    cfg.battery.dod = battery.num_or("dod", 0.9);
    cfg.battery.eta = battery.num_or("eta", 0.837);
    cfg.battery.charge_rate_kw = battery.num_or("charge_rate_kw", 11.5);
    cfg.battery.discharge_rate_kw = battery.num_or("discharge_rate_kw", 11.5);
    cfg.battery.capital_cost = battery.num_or("capital_cost_usd_per_kwh", 156.0);
    cfg.battery.saturation_factor = battery.num_or("saturation_factor", 0.2);
    cfg.battery.validate();

    SectionReader deg(cfg, "degradation");
    cfg.degradation.b0 = deg.num_or("b0", 1.0);
    cfg.degradation.b1 = deg.num_or("b1", -2.5e-4);
    cfg.degradation.z = deg.num_or("z", 0.5);
    cfg.degradation.c0 = deg.num_or("c0", 1.0);
    cfg.degradation.c1 = deg.num_or("c1", -5e-5);
    cfg.degradation.validate();

    SectionReader engine(cfg, "engine");
    cfg.year = static_cast<int>(engine.integer_or("year", 2019));
    cfg.reserve_legs = static_cast<int>(engine.integer_or("reserve_legs", 1));
    if (cfg.reserve_legs != 1 && cfg.reserve_legs != 2)
        throw Error(Errc::config_error, "reserve_legs must be 1 or 2");

    SectionReader opt(cfg, "optimizer");
    cfg.optimizer.p_min = opt.num_or("p_min", 0.0);
    std::string p_max = opt.str_or("p_max", "auto");
    cfg.optimizer.p_max = p_max == "auto" ? 0.0 : SectionReader(cfg, "optimizer").num("p_max");
    cfg.optimizer.n_init = static_cast<int>(opt.integer_or("n_init", 6));
    cfg.optimizer.n_iter = static_cast<int>(opt.integer_or("n_iter", 24));
    cfg.optimizer.noise_floor = opt.num_or("noise_floor", 1e-6);
    cfg.optimizer.seed = static_cast<std::uint64_t>(opt.integer_or("seed", 7));

    SectionReader study(cfg, "study");
    cfg.study.city_id = study.str_or("city_id", "city");
    cfg.study.population_size = static_cast<int>(study.integer_or("population_size", 1000));
    cfg.study.master_seed = static_cast<std::uint64_t>(study.integer_or("master_seed", 42));
    cfg.study.eta_values = study.num_list_or("eta_values", {0.837, 0.90, 0.99});
    cfg.study.rate_values = study.num_list_or("rate_values", {3.3, 11.5, 15.0});
    cfg.study.scenarios.clear();
    for (std::string_view field : split_csv_line(study.str_or("scenarios", "price_taker,osp")))
        cfg.study.scenarios.push_back(mode_from_string(std::string(trim(field))));
    if (cfg.study.scenarios.empty()) throw Error(Errc::config_error, "study needs at least one scenario");
    std::string years = study.str_or("cost_years", "2020-2050");
    std::size_t dash = years.find('-');
    if (dash == std::string::npos) throw Error(Errc::config_error, "cost_years must look like 2020-2050");
    cfg.study.cost_year_begin = std::stoi(years.substr(0, dash));
    cfg.study.cost_year_end = std::stoi(years.substr(dash + 1));
    if (cfg.study.cost_year_end < cfg.study.cost_year_begin)
        throw Error(Errc::config_error, "cost_years range is reversed");

    return cfg;
}

DataBundle load_bundle(const RunConfig& config) {
    DataBundle bundle;
    bundle.prices = parse_price_file(config.prices_path, config.study.city_id);
    if (static_cast<int>(bundle.prices.size()) < hours_in_year(config.year))
        throw Error(Errc::price_series_too_short, "price file does not cover year " + std::to_string(config.year));
    bundle.calendar = make_work_calendar(config.year);
    bundle.commute = load_commute_file(config.commute_path);
    bundle.work = load_work_files(config.work_arrival_path, config.work_hours_path);
    bundle.catalog = load_ev_catalog_file(config.ev_catalog_path);
    return bundle;
}

ScenarioConfig base_scenario(const RunConfig& config) {
    ScenarioConfig scenario;
    scenario.battery = config.battery;
    scenario.degradation = config.degradation;
    scenario.year = config.year;
    scenario.reserve_legs = config.reserve_legs;
    return scenario;
}

} // namespace v2g
