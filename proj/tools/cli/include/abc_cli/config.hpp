#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "abc/kernel.hpp"
#include "abc/model_zoo.hpp"

namespace abc::cli {

inline constexpr std::string_view kConfigSchema = "abc-config/1";

enum class AcceptanceKind { k, percentile, epsilon };

std::string_view to_string(AcceptanceKind kind) noexcept;

struct AcceptanceRule {
    AcceptanceKind kind = AcceptanceKind::k;
    double value = 0.0;  // k is stored as an exact integer value

    friend bool operator==(const AcceptanceRule&, const AcceptanceRule&) = default;
};

struct GridConfig {
    std::optional<std::size_t> points;  // per axis; default grid when absent
    std::optional<double> pad;          // in units of h

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ValidateConfig {
    std::size_t replicates = 50;
    std::vector<std::size_t> ns;
    double c_k = 1.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<int> orders{2, 4};
    std::vector<std::string> functionals{"identity", "square", "const"};
    std::size_t runs = 200;
    std::optional<std::size_t> reference_draws;  // 10 k when absent
    double level = 0.05;
    std::string reference = "restricted";
    std::optional<double> xi0;
    std::optional<double> l_diam;

    friend bool operator==(const ValidateConfig&, const ValidateConfig&) = default;
};

struct RunConfig {
    std::string model_id;
    ModelParams model_params;
    std::size_t n = 0;
    AcceptanceRule acceptance;
    bool bandwidth_auto = true;
    double bandwidth = 1.0;  // h when fixed, multiplier on the auto rule otherwise
    KernelKind kernel = KernelKind::gaussian;
    std::optional<std::vector<double>> s0;
    std::optional<std::vector<double>> y0;
    std::uint64_t seed = 0;
    GridConfig grid;
    ValidateConfig validate;
    std::string output = "out";
    bool write_table_csv = true;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigIssue {
    std::string path;
    std::string message;

    std::string text() const { return path.empty() ? message : path + " " + message; }
};

class ConfigErrors : public std::runtime_error {
public:
    explicit ConfigErrors(std::vector<ConfigIssue> issues);
    ConfigErrors(std::string path, std::string message);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// Parses and checks the whole document; every problem found is reported in a
// single ConfigErrors.
RunConfig validate_config(std::string_view text);
RunConfig validate_config_json(const nlohmann::json& doc);

nlohmann::ordered_json to_json(const RunConfig& config);
std::string serialize(const RunConfig& config);

// Observed summary, reducing y0 through the model's summary map when given.
std::vector<double> observed_summary(const RunConfig& config, const Model& model);

}  // namespace abc::cli
