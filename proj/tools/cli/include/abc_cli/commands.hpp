#pragma once

#include <cstddef>
#include <string_view>

#include <nlohmann/json.hpp>

#include "abc_cli/config.hpp"

namespace abc::cli {

inline constexpr std::string_view kVersion = "0.1.0";

// Each command writes its files under config.output and returns the summary
// that was written to summary.json.
nlohmann::ordered_json run_sample(const RunConfig& config);
nlohmann::ordered_json run_estimate(const RunConfig& config);
nlohmann::ordered_json run_validate(const RunConfig& config, std::string_view which);

nlohmann::ordered_json schedule_report(std::size_t m, std::size_t p, std::size_t n, double c_k,
                                       double c_h);

}  // namespace abc::cli
