#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "abc/errors.hpp"
#include "abc/parallel.hpp"
#include "abc_cli/commands.hpp"
#include "abc_cli/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int report_error(int code, std::string_view kind, const std::string& message,
                 const std::vector<abc::cli::ConfigIssue>& issues = {}) {
    nlohmann::ordered_json err;
    err["error"]["kind"] = kind;
    err["error"]["message"] = message;
    if (!issues.empty()) {
        auto& list = err["error"]["issues"];
        list = nlohmann::ordered_json::array();
        for (const auto& issue : issues) list.push_back({{"path", issue.path}, {"message", issue.message}});
    }
    err["exit_code"] = code;
    std::cerr << err.dump() << "\n";
    return code;
}

abc::cli::RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed,
                                const std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw abc::cli::ConfigErrors("--config", "cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw abc::cli::ConfigErrors("", std::string("is not valid JSON: ") + e.what());
    }
    if (seed && doc.is_object()) doc["seed"] = *seed;
    if (!out.empty() && doc.is_object()) doc["output"] = out;
    return abc::cli::validate_config_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nearest-neighbour ABC sampling, conditional density estimation and validation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(abc::cli::kVersion));

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("--config", config_path, "JSON run configuration (abc-config/1)");
    app.add_option("--out", out_dir, "Output directory (overrides config.output)");
    app.add_option("--seed", seed, "Master seed (overrides config.seed)");
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);

    auto* sample = app.add_subcommand("sample", "Simulate a reference table and run the acceptance step");
    auto* estimate = app.add_subcommand("estimate", "Estimate the posterior density on a grid");

    auto* sched = app.add_subcommand("schedule", "Print the tuned (k, h) for given m, p, N");
    std::size_t m = 0, p = 0, n = 0;
    double c_k = 1.0, c_h = 1.0;
    sched->add_option("--m", m, "Summary dimension")->required()->check(CLI::PositiveNumber);
    sched->add_option("--p", p, "Parameter dimension")->required()->check(CLI::PositiveNumber);
    sched->add_option("--N", n, "Reference table size")->required()->check(CLI::Range(std::size_t{2}, std::size_t(-1)));
    sched->add_option("--ck", c_k, "Constant on k")->check(CLI::PositiveNumber);
    sched->add_option("--ch", c_h, "Constant on h")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Monte Carlo checks of the estimator");
    validate->require_subcommand(1);
    validate->fallthrough();
    std::string which;
    for (const char* name : {"mise", "rates", "prop1", "bounds", "moments"}) {
        validate->add_subcommand(name)->callback([&which, name] { which = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(kExitConfig, "usage_error", e.what());
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        abc::set_max_threads(threads);
        nlohmann::ordered_json summary;
        if (sched->parsed()) {
            summary = abc::cli::schedule_report(m, p, n, c_k, c_h);
            std::cout << summary.dump(2) << "\n";
            return 0;
        }
        if (config_path.empty()) {
            return report_error(kExitConfig, "usage_error", "--config is required for this command");
        }
        const abc::cli::RunConfig cfg = load_config(config_path, seed, out_dir);
        if (sample->parsed()) summary = abc::cli::run_sample(cfg);
        else if (estimate->parsed()) summary = abc::cli::run_estimate(cfg);
        else summary = abc::cli::run_validate(cfg, which);
        const auto elapsed = std::chrono::steady_clock::now() - start;
        summary["runtime_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const abc::cli::ConfigErrors& e) {
        return report_error(kExitConfig, "config_error", e.what(), e.issues());
    } catch (const abc::Error& e) {
        return report_error(kExitRuntime, e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(kExitRuntime, "runtime_error", e.what());
    }
}
