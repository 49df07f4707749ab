#include <gtest/gtest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "abc/table_io.hpp"
#include "abc_cli/atomic_file.hpp"
#include "abc_cli/commands.hpp"
#include "abc_cli/config.hpp"

namespace fs = std::filesystem;
using abc::cli::ConfigErrors;
using abc::cli::validate_config;

namespace {

const char* kMinimal = R"({"model":{"id":"GaussianConjugate1D"},"N":1000,"acceptance":{"k":10},"s0":[1.0],"seed":7})";

std::vector<std::string> issue_texts(const std::string& text) {
    try {
        validate_config(text);
    } catch (const ConfigErrors& e) {
        std::vector<std::string> out;
        for (const auto& i : e.issues()) out.push_back(i.text());
        return out;
    }
    return {};
}

bool contains(const std::vector<std::string>& xs, const std::string& needle) {
    for (const auto& x : xs) {
        if (x.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("abc_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(Config, MinimalGetsDefaults) {
    const auto cfg = validate_config(kMinimal);
    EXPECT_EQ(cfg.model_id, "GaussianConjugate1D");
    EXPECT_EQ(cfg.n, 1000u);
    EXPECT_EQ(cfg.acceptance.kind, abc::cli::AcceptanceKind::k);
    EXPECT_EQ(cfg.acceptance.value, 10.0);
    EXPECT_TRUE(cfg.bandwidth_auto);
    EXPECT_EQ(cfg.kernel, abc::KernelKind::gaussian);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.validate.replicates, 50u);
    EXPECT_EQ(cfg.output, "out");
}

TEST(Config, PercentileRange) {
    const auto issues = issue_texts(R"({"model":{"id":"GaussianConjugate1D"},"N":1000,"acceptance":{"percentile":1.5},"s0":[1],"seed":1})");
    ASSERT_EQ(issues.size(), 1u);
    EXPECT_EQ(issues[0], "acceptance.percentile must be in (0,1)");
}

TEST(Config, TableSizeFloor) {
    const auto issues = issue_texts(R"({"model":{"id":"GaussianConjugate1D"},"N":1,"acceptance":{"percentile":0.1},"s0":[1],"seed":1})");
    EXPECT_TRUE(contains(issues, "N >= 2"));
}

TEST(Config, AcceptanceRulesAreExclusive) {
    const auto issues = issue_texts(R"({"model":{"id":"GaussianConjugate1D"},"N":100,"acceptance":{"k":5,"epsilon":0.1},"s0":[1],"seed":1})");
    EXPECT_TRUE(contains(issues, "exactly one of k, percentile, epsilon"));
}

TEST(Config, SeedIsMandatory) {
    const auto issues = issue_texts(R"({"model":{"id":"GaussianConjugate1D"},"N":100,"acceptance":{"k":5},"s0":[1]})");
    EXPECT_TRUE(contains(issues, "seed is required"));
}

TEST(Config, ErrorsAreAggregatedAndPathQualified) {
    const auto issues = issue_texts(
        R"({"model":{"id":"GaussianConjugate1D","params":{"noise_var":"x"}},"N":100,"acceptance":{"k":500},
            "s0":[1,2],"seed":1,"kernel":"box","extra":1,"validate":{"Ns":[10,1],"colour":2}})");
    EXPECT_TRUE(contains(issues, "model.params.noise_var must be a number"));
    EXPECT_TRUE(contains(issues, "acceptance.k must be <= N-1"));
    EXPECT_TRUE(contains(issues, "kernel must be"));
    EXPECT_TRUE(contains(issues, "extra is not a recognised key"));
    EXPECT_TRUE(contains(issues, "validate.Ns[1] must be >= 2"));
    EXPECT_TRUE(contains(issues, "validate.colour is not a recognised key"));
    EXPECT_GE(issues.size(), 6u);
}

TEST(Config, ModelChecks) {
    EXPECT_TRUE(contains(issue_texts(R"({"model":{"id":"Nope"},"N":100,"acceptance":{"k":5},"s0":[1],"seed":1})"), "model"));
    EXPECT_TRUE(contains(issue_texts(R"({"model":{"id":"Gauss5D"},"N":100,"acceptance":{"k":5},"s0":[1],"seed":1})"), "s0 must have 5 entries"));
    EXPECT_TRUE(contains(issue_texts(R"({"model":{"id":"GaussianConjugate1D"},"N":100,"acceptance":{"k":5},"y0":[1],"seed":1})"), "y0"));
    const auto demo = validate_config(R"({"model":{"id":"GaussianMeanDemo","params":{"n":3}},"N":100,"acceptance":{"k":5},"y0":[1,2,6],"seed":1})");
    auto model = abc::make_model(demo.model_id, demo.model_params);
    EXPECT_EQ(abc::cli::observed_summary(demo, *model), std::vector<double>{3.0});
}

TEST(Config, RejectsBrokenJson) {
    EXPECT_THROW(validate_config("{not json"), ConfigErrors);
}

abc::cli::RunConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    abc::cli::RunConfig c;
    const bool five = u(rng) < 0.3;
    c.model_id = five ? "Gauss5D" : "GaussianConjugate1D";
    if (u(rng) < 0.5) c.model_params["noise_var"] = 0.25 + u(rng);
    c.n = 2 + rng() % 100000;
    const double pick = u(rng);
    if (pick < 0.33) {
        c.acceptance = {abc::cli::AcceptanceKind::k, static_cast<double>(1 + rng() % (c.n - 1))};
    } else if (pick < 0.66) {
        c.acceptance = {abc::cli::AcceptanceKind::percentile, 1e-6 + 0.99 * u(rng)};
    } else {
        c.acceptance = {abc::cli::AcceptanceKind::epsilon, 1e-3 + 10 * u(rng)};
    }
    c.bandwidth_auto = u(rng) < 0.5;
    if (!c.bandwidth_auto) c.bandwidth = 1e-3 + u(rng);
    c.kernel = u(rng) < 0.5 ? abc::KernelKind::naive : abc::KernelKind::gaussian;
    std::vector<double> s(five ? 5 : 1);
    for (double& x : s) x = 4 * u(rng) - 2;
    c.s0 = s;
    c.seed = rng();
    if (u(rng) < 0.5) c.grid.points = 2 + rng() % 3000;
    if (u(rng) < 0.5) c.grid.pad = 10 * u(rng);
    c.validate.replicates = 2 + rng() % 100;
    for (int i = 0; i < static_cast<int>(rng() % 5); ++i) c.validate.ns.push_back(2 + rng() % 100000);
    c.validate.c_k = 0.1 + u(rng);
    if (u(rng) < 0.5) c.validate.pairs = {{999, 9}, {9999, 99}};
    if (u(rng) < 0.5) c.validate.orders = {4};
    if (u(rng) < 0.5) c.validate.functionals = {"square"};
    c.validate.runs = 1 + rng() % 300;
    if (u(rng) < 0.5) c.validate.reference_draws = 1 + rng() % 1000;
    c.validate.level = 0.001 + 0.2 * u(rng);
    if (u(rng) < 0.5) c.validate.reference = "prior_predictive";
    if (u(rng) < 0.5) c.validate.xi0 = u(rng) + 0.01;
    if (u(rng) < 0.5) c.validate.l_diam = u(rng) + 0.5;
    c.output = "out_" + std::to_string(rng() % 1000);
    c.write_table_csv = u(rng) < 0.5;
    return c;
}

TEST(Config, SerializeRoundTripProperty) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        const auto cfg = random_config(rng);
        const std::string text = abc::cli::serialize(cfg);
        const auto back = validate_config(text);
        ASSERT_EQ(back, cfg) << text;
        EXPECT_EQ(abc::cli::serialize(back), text);
    }
}

TEST(AtomicFile, ReplacesContents) {
    const fs::path dir = scratch_dir("replace");
    abc::cli::write_atomically(dir / "a.txt", "first");
    abc::cli::write_atomically(dir / "a.txt", "second");
    EXPECT_EQ(slurp(dir / "a.txt"), "second");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1u);
}

TEST(AtomicFile, ProducerFailureLeavesOldFile) {
    const fs::path dir = scratch_dir("failure");
    abc::cli::write_atomically(dir / "a.txt", "old");
    EXPECT_THROW(abc::cli::write_atomically(dir / "a.txt", [](std::ostream& os) {
        os << "partial";
        throw std::runtime_error("producer failed");
    }), std::runtime_error);
    EXPECT_EQ(slurp(dir / "a.txt"), "old");
}

TEST(AtomicFile, KillDuringWriteNeverExposesPartialFile) {
    const fs::path dir = scratch_dir("kill");
    const fs::path target = dir / "big.bin";
    abc::cli::write_atomically(target, "old contents");
    const pid_t child = ::fork();
    ASSERT_GE(child, 0);
    if (child == 0) {
        abc::cli::write_atomically(target, [](std::ostream& os) {
            const std::string chunk(1 << 16, 'x');
            for (;;) {
                os.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
                os.flush();
                std::this_thread::sleep_for(std::chrono::milliseconds(1));
            }
        });
        ::_exit(0);
    }
    // wait until the child has written a good part of its temporary
    bool started = false;
    for (int i = 0; i < 5000 && !started; ++i) {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path() != target && fs::file_size(e.path()) > (1u << 20)) started = true;
        }
        if (!started) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    ::kill(child, SIGKILL);
    int status = 0;
    ::waitpid(child, &status, 0);
    EXPECT_TRUE(started);
    EXPECT_TRUE(WIFSIGNALED(status));
    EXPECT_EQ(slurp(target), "old contents");
}

// End-to-end runs of the installed binary.

int run(const std::string& args, std::string* err = nullptr) {
    const fs::path errfile = fs::temp_directory_path() / ("abc_cli_err_" + std::to_string(::getpid()));
    const std::string cmd = std::string(ABC_CLI_PATH) + " " + args + " > /dev/null 2> " + errfile.string();
    const int rc = std::system(cmd.c_str());
    if (err) *err = slurp(errfile);
    fs::remove(errfile);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string capture(const std::string& args) {
    const fs::path outfile = fs::temp_directory_path() / ("abc_cli_out_" + std::to_string(::getpid()));
    const std::string cmd = std::string(ABC_CLI_PATH) + " " + args + " > " + outfile.string();
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    const std::string out = slurp(outfile);
    fs::remove(outfile);
    return out;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

TEST(Binary, ScheduleCommand) {
    const auto j = nlohmann::json::parse(capture("schedule --m 5 --p 1 --N 1000000"));
    EXPECT_EQ(j["k"], 1000);
    EXPECT_NEAR(j["h"].get<double>(), 0.2512, 1e-4);
    EXPECT_EQ(j["regime"], "m_gt_4");
    EXPECT_EQ(j["exponents"]["k"]["num"], 5);
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch_dir("exit");
    std::string err;
    const auto both = write_config(dir, R"({"model":{"id":"GaussianConjugate1D"},"N":100,"acceptance":{"k":5,"epsilon":0.1},"s0":[1],"seed":1})");
    EXPECT_EQ(run("estimate --config " + both.string(), &err), 2);
    const auto j = nlohmann::json::parse(err);
    EXPECT_EQ(j["error"]["kind"], "config_error");
    EXPECT_FALSE(j["error"]["issues"].empty());

    EXPECT_EQ(run("estimate", &err), 2);
    EXPECT_EQ(run("frobnicate", &err), 2);

    const auto tiny = write_config(dir, R"({"model":{"id":"GaussianConjugate1D"},"N":100,"acceptance":{"epsilon":1e-12},"s0":[1],"seed":1,"output":")" + (dir / "o").string() + R"("})");
    EXPECT_EQ(run("estimate --config " + tiny.string(), &err), 3);
    EXPECT_EQ(nlohmann::json::parse(err)["error"]["kind"], "empty_accepted_set");
    EXPECT_FALSE(fs::exists(dir / "o" / "summary.json"));

    const auto ball = write_config(dir, R"({"model":{"id":"UniformBall"},"N":100,"acceptance":{"k":5},"s0":[0,0],"seed":1,"output":")" + (dir / "o").string() + R"("})");
    EXPECT_EQ(run("validate mise --config " + ball.string(), &err), 3);
    EXPECT_EQ(nlohmann::json::parse(err)["error"]["kind"], "unsupported_model");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

void expect_reproducible(const std::string& command, const std::string& config_body) {
    const fs::path dir = scratch_dir("repro_" + std::to_string(std::hash<std::string>{}(command)));
    const auto cfg = write_config(dir, config_body);
    ASSERT_EQ(run(command + " --config " + cfg.string() + " --out " + (dir / "a").string() + " --threads 1"), 0);
    ASSERT_EQ(run(command + " --config " + cfg.string() + " --out " + (dir / "b").string() + " --threads 4"), 0);
    const auto a = snapshot(dir / "a");
    const auto b = snapshot(dir / "b");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b) << command;
    EXPECT_TRUE(a.contains("summary.json"));
}

TEST(Binary, EstimateIsByteIdentical) {
    expect_reproducible("estimate", R"({"model":{"id":"GaussianConjugate1D"},"N":100000,"acceptance":{"percentile":0.001},"bandwidth":"auto","s0":[1.0],"seed":7})");
}

TEST(Binary, SampleWritesReadableTable) {
    const fs::path dir = scratch_dir("sample");
    const auto cfg = write_config(dir, R"({"model":{"id":"Gauss5D"},"N":5000,"acceptance":{"k":50},"s0":[1,0,0,0,0],"seed":3})");
    ASSERT_EQ(run("sample --config " + cfg.string() + " --out " + (dir / "o").string()), 0);
    std::ifstream in(dir / "o" / "table.abct", std::ios::binary);
    const auto table = abc::read_table_binary(in);
    EXPECT_EQ(table.size(), 5000u);
    EXPECT_EQ(table.summary_dim(), 5u);
    const auto summary = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
    for (const char* key : {"N", "k", "h", "d_k_plus_1", "seed", "model_id", "version"}) {
        EXPECT_TRUE(summary.contains(key)) << key;
    }
    EXPECT_EQ(summary["k"], 50);
}

TEST(Binary, SeedFlagOverridesConfig) {
    const fs::path dir = scratch_dir("seed");
    const auto cfg = write_config(dir, R"({"model":{"id":"GaussianConjugate1D"},"N":1000,"acceptance":{"k":20},"s0":[1],"seed":3})");
    ASSERT_EQ(run("sample --config " + cfg.string() + " --out " + (dir / "a").string() + " --seed 99"), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "a" / "summary.json"))["seed"], 99);
}

}  // namespace
