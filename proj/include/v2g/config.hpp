#pragma once

#include <map>
#include <string>

#include "v2g/engine.hpp"
#include "v2g/montecarlo.hpp"
#include "v2g/optimizer.hpp"

namespace v2g {

// One key-value file with sections describes a full run: data paths,
// battery/degradation parameters, optimizer budget, and study shape. Every
// default the simulator uses is spelled out in the bundled configs.
struct RunConfig {
    std::string prices_path;
    std::string commute_path;
    std::string work_arrival_path;
    std::string work_hours_path;
    std::string ev_catalog_path;
    std::string cost_history_path;
    std::string output_dir;

    BatteryParams battery;
    DegradationParams degradation;
    int year = 2019;
    int reserve_legs = 1;
    OptimizerConfig optimizer;
    StudyConfig study;

    // section -> key -> value as written, echoed into study summaries
    std::map<std::string, std::map<std::string, std::string>> raw;
};

// Parses the config and resolves relative paths against the config file's
// directory. Referenced data files must exist.
RunConfig load_run_config(const std::string& path);

DataBundle load_bundle(const RunConfig& config);

ScenarioConfig base_scenario(const RunConfig& config);

} // namespace v2g
