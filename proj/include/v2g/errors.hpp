#pragma once

#include <stdexcept>
#include <string>

namespace v2g {

// Every failure the library reports, so callers (and the CLI exit-code
// mapping) can switch on the cause instead of parsing message text.
enum class Errc {
    // data ingestion
    empty_input,
    malformed_row,
    missing_hours,
    duplicate_timestamp,
    negative_weight,
    empty_distribution,
    non_positive_cost,
    too_few_points,
    // domain / configuration
    invalid_window,
    date_out_of_range,
    q_out_of_range,
    infeasible_commute,
    price_series_too_short,
    config_error,
    // sampling
    infeasible_population,
    // engine guards
    soc_out_of_bounds,
    negative_timestep,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::empty_input: return "EmptyInput";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::missing_hours: return "MissingHours";
    case Errc::duplicate_timestamp: return "DuplicateTimestamp";
    case Errc::negative_weight: return "NegativeWeight";
    case Errc::empty_distribution: return "EmptyDistribution";
    case Errc::non_positive_cost: return "NonPositiveCost";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::invalid_window: return "InvalidWindow";
    case Errc::date_out_of_range: return "DateOutOfRange";
    case Errc::q_out_of_range: return "QOutOfRange";
    case Errc::infeasible_commute: return "InfeasibleCommute";
    case Errc::price_series_too_short: return "PriceSeriesTooShort";
    case Errc::config_error: return "ConfigError";
    case Errc::infeasible_population: return "InfeasiblePopulation";
    case Errc::soc_out_of_bounds: return "SocOutOfBounds";
    case Errc::negative_timestep: return "NegativeTimestep";
    }
    return "Unknown";
}

} // namespace v2g
