#include "abc_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "abc/abc_core.hpp"
#include "abc/cde.hpp"
#include "abc/density_io.hpp"
#include "abc/errors.hpp"
#include "abc/format.hpp"
#include "abc/rng.hpp"
#include "abc/table_io.hpp"
#include "abc/tuning.hpp"
#include "abc/validate.hpp"
#include "abc_cli/atomic_file.hpp"

namespace abc::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

ojson number_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return number_or_null(*v);
}

struct Csv {
    std::ostringstream out;

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out << (first ? "" : ",") << cell(cells), first = false), ...);
        out << "\r\n";
    }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    static std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

    std::string str() const { return out.str(); }
};

void write_json(const fs::path& path, const ojson& doc) { write_atomically(path, doc.dump(2) + "\n"); }

struct Setup {
    ModelPtr model;
    std::vector<double> s0;
};

Setup setup(const RunConfig& cfg) {
    Setup s;
    s.model = make_model(cfg.model_id, cfg.model_params);
    s.s0 = observed_summary(cfg, *s.model);
    require_dim(s.s0.size(), s.model->summary_dim(), "observed summary");
    return s;
}

std::size_t resolve_k(const RunConfig& cfg, std::size_t n) {
    switch (cfg.acceptance.kind) {
        case AcceptanceKind::k: return static_cast<std::size_t>(cfg.acceptance.value);
        case AcceptanceKind::percentile: return percentile_to_k(n, cfg.acceptance.value);
        case AcceptanceKind::epsilon: break;
    }
    throw ConfigErrors("acceptance", "must give k or percentile for this command");
}

AcceptedSet accept(const RunConfig& cfg, const ReferenceTable& table, std::span<const double> s0) {
    if (cfg.acceptance.kind == AcceptanceKind::epsilon) {
        return abc_tolerance(table, s0, cfg.acceptance.value);
    }
    return abc_knn(table, s0, resolve_k(cfg, table.size()));
}

double resolve_h(const RunConfig& cfg, const AcceptedSet& acc) {
    if (!cfg.bandwidth_auto) return cfg.bandwidth;
    if (acc.empty()) throw EmptyAcceptedSet("no accepted draws to scale the automatic bandwidth");
    return auto_bandwidth(acc, acc.m, acc.table_size);
}

Bandwidth validate_bandwidth(const RunConfig& cfg) {
    return cfg.bandwidth_auto ? Bandwidth::from_accepted(1.0) : Bandwidth::fixed(cfg.bandwidth);
}

ojson base_summary(const RunConfig& cfg, std::string_view command, std::optional<std::size_t> n,
                   std::optional<std::size_t> k, std::optional<double> h,
                   std::optional<double> radius_next) {
    ojson j;
    j["command"] = command;
    j["model_id"] = cfg.model_id;
    j["N"] = n ? ojson(*n) : ojson(nullptr);
    j["k"] = k ? ojson(*k) : ojson(nullptr);
    j["h"] = number_or_null(h);
    if (cfg.acceptance.kind == AcceptanceKind::epsilon) j["epsilon"] = cfg.acceptance.value;
    j["d_k_plus_1"] = number_or_null(radius_next);
    j["seed"] = cfg.seed;
    j["version"] = kVersion;
    return j;
}

std::string accepted_csv(const AcceptedSet& acc) {
    Csv csv;
    std::ostringstream head;
    head << "index,distance";
    for (std::size_t i = 0; i < acc.p; ++i) head << ",theta_" << i;
    for (std::size_t j = 0; j < acc.m; ++j) head << ",s_" << j;
    csv.out << head.str() << "\r\n";
    for (std::size_t r = 0; r < acc.size(); ++r) {
        csv.out << acc.source_indices[r] << "," << format_double(acc.distances[r]);
        for (double v : acc.theta(r)) csv.out << "," << format_double(v);
        for (double v : acc.summary(r)) csv.out << "," << format_double(v);
        csv.out << "\r\n";
    }
    return csv.str();
}

GridSpec resolve_grid(const RunConfig& cfg, const AcceptedSet& acc, double h) {
    if (!cfg.grid.points && !cfg.grid.pad) return default_grid(acc, h);
    const GridSpec def = default_grid(acc, h);
    const std::size_t points = cfg.grid.points.value_or(def.points.front());
    const double pad = cfg.grid.pad.value_or(4.0) * h;
    return padded_grid(acc, pad, points);
}

ojson validate_mise(const RunConfig& cfg, const Setup& s, const fs::path& out) {
    const std::size_t k = resolve_k(cfg, cfg.n);
    const KernelSpec kernel(cfg.kernel, s.model->param_dim());
    const MiseReport r = mise_estimate(*s.model, s.s0, cfg.n, k, validate_bandwidth(cfg), kernel,
                                       cfg.validate.replicates, cfg.seed);
    Csv csv;
    csv.row("replicate", "ise", "h");
    for (std::size_t i = 0; i < r.replicates; ++i) csv.row(i, r.per_replicate[i], r.per_replicate_h[i]);
    write_atomically(out / "mise_replicates.csv", csv.str());
    ojson j = base_summary(cfg, "validate mise", cfg.n, k, r.h, std::nullopt);
    j["report"] = {{"mise_mean", r.mise_mean},
                   {"mise_stderr", r.mise_stderr},
                   {"replicates", r.replicates},
                   {"grid_points", r.grid_points},
                   {"kernel", to_string(cfg.kernel)}};
    return j;
}

ojson validate_rates(const RunConfig& cfg, const Setup& s, const fs::path& out) {
    if (cfg.validate.ns.size() < 3) {
        throw ConfigErrors("validate.Ns", "needs at least 3 sample sizes for the rate fit");
    }
    ScheduleParams params;
    params.c_k = cfg.validate.c_k;
    params.bandwidth = validate_bandwidth(cfg);
    const KernelSpec kernel(cfg.kernel, s.model->param_dim());
    const RateReport r = rate_experiment(*s.model, s.s0, cfg.validate.ns, params, kernel,
                                         cfg.validate.replicates, cfg.seed);
    Csv csv;
    csv.row("N", "k", "h", "replicate", "ise");
    ojson points = ojson::array();
    for (std::size_t i = 0; i < r.ns.size(); ++i) {
        const MiseReport& m = r.reports[i];
        for (std::size_t j = 0; j < m.replicates; ++j) csv.row(r.ns[i], r.ks[i], m.per_replicate_h[j], j, m.per_replicate[j]);
        points.push_back({{"N", r.ns[i]}, {"k", r.ks[i]}, {"h", r.hs[i]},
                          {"mise_mean", m.mise_mean}, {"mise_stderr", m.mise_stderr}});
    }
    write_atomically(out / "rates_replicates.csv", csv.str());
    ojson j = base_summary(cfg, "validate rates", std::nullopt, std::nullopt, std::nullopt, std::nullopt);
    j["report"] = {{"points", points},
                   {"fitted_slope", r.fitted_slope},
                   {"slope_stderr", r.slope_stderr},
                   {"intercept", r.intercept},
                   {"theoretical_slope", r.theoretical_slope},
                   {"log_factor", r.log_factor}};
    return j;
}

ojson validate_prop1(const RunConfig& cfg, const Setup& s, const fs::path& out) {
    const std::size_t k = resolve_k(cfg, cfg.n);
    const std::size_t draws = cfg.validate.reference_draws.value_or(10 * k);
    const LawReference ref = cfg.validate.reference == "prior_predictive" ? LawReference::prior_predictive
                                                                          : LawReference::restricted;
    const LawCalibration cal = law_test_calibration(*s.model, s.s0, cfg.n, k, draws, cfg.validate.runs,
                                                    cfg.seed, cfg.validate.level, ref);
    Csv csv;
    csv.row("run", "statistic", "p_value", "d_k_plus_1");
    for (std::size_t i = 0; i < cal.runs; ++i) {
        const LawTestResult& t = cal.results[i];
        csv.row(i, t.statistic, t.p_value, t.radius);
    }
    write_atomically(out / "prop1_runs.csv", csv.str());
    ojson j = base_summary(cfg, "validate prop1", cfg.n, k, std::nullopt,
                           cal.runs == 1 ? std::optional<double>(cal.results[0].radius) : std::nullopt);
    j["report"] = {{"runs", cal.runs},
                   {"level", cal.level},
                   {"reference", cfg.validate.reference},
                   {"reference_draws", draws},
                   {"rejection_fraction", cal.rejection_fraction}};
    if (cal.runs == 1) {
        j["report"]["ks_statistic"] = cal.results[0].statistic;
        j["report"]["p_value"] = cal.results[0].p_value;
    }
    return j;
}

ojson validate_bounds(const RunConfig& cfg, const Setup& s, const fs::path& out) {
    if (cfg.validate.pairs.empty()) {
        throw ConfigErrors("validate.pairs", "needs at least one [N, k] pair");
    }
    double l_diam = 0.0;
    if (cfg.validate.l_diam) {
        l_diam = *cfg.validate.l_diam;
    } else if (auto d = s.model->support_diameter()) {
        l_diam = *d;
    } else {
        throw UnsupportedModel("model '" + cfg.model_id + "' has no compact summary support");
    }
    double xi0 = 0.0;
    std::optional<Xi0Estimate> est;
    if (cfg.validate.xi0) {
        xi0 = *cfg.validate.xi0;
    } else {
        est = estimate_xi0(*s.model, s.s0, l_diam, derive_seed(cfg.seed, 0, SeedDomain::auxiliary));
        xi0 = est->xi0;
    }
    const auto rows = bound_check(*s.model, s.s0, s.model->summary_dim(), cfg.validate.pairs, xi0, l_diam,
                                  cfg.validate.orders, cfg.validate.replicates, cfg.seed);
    Csv csv;
    csv.row("N", "k", "order", "applies", "empirical", "bound", "holds");
    ojson jr = ojson::array();
    bool all_hold = true;
    for (const auto& r : rows) {
        csv.row(r.n, r.k, r.order, r.applies, r.empirical, r.bound, r.holds);
        jr.push_back({{"N", r.n}, {"k", r.k}, {"order", r.order}, {"applies", r.applies},
                      {"empirical", number_or_null(r.empirical)}, {"bound", number_or_null(r.bound)},
                      {"holds", r.holds}});
        if (r.applies && !r.holds) all_hold = false;
    }
    write_atomically(out / "bounds.csv", csv.str());
    ojson j = base_summary(cfg, "validate bounds", std::nullopt, std::nullopt, std::nullopt, std::nullopt);
    j["report"] = {{"xi0", xi0}, {"xi0_estimated", est.has_value()}, {"L_diam", l_diam},
                   {"replicates", cfg.validate.replicates}, {"rows", jr}, {"all_hold", all_hold}};
    if (est) j["report"]["xi0_argmin_delta"] = est->argmin_delta;
    return j;
}

ojson validate_moments(const RunConfig& cfg, const Setup& s, const fs::path& out) {
    const std::size_t k = resolve_k(cfg, cfg.n);
    std::vector<Functional> fs;
    for (const auto& name : cfg.validate.functionals) fs.push_back(builtin_functional(*s.model, s.s0, name));
    const auto rows = moment_consistency(*s.model, s.s0, cfg.n, k, fs, cfg.validate.replicates, cfg.seed);
    std::ostringstream head;
    head << "replicate";
    for (const auto& r : rows) head << "," << r.name;
    Csv csv;
    csv.out << head.str() << "\r\n";
    for (std::size_t i = 0; i < cfg.validate.replicates; ++i) {
        csv.out << i;
        for (const auto& r : rows) csv.out << "," << format_double(r.per_replicate[i]);
        csv.out << "\r\n";
    }
    write_atomically(out / "moments_replicates.csv", csv.str());
    ojson jr = ojson::array();
    for (const auto& r : rows) {
        jr.push_back({{"name", r.name}, {"estimate_mean", r.estimate_mean}, {"stderr", r.stderr_},
                      {"oracle_value", number_or_null(r.oracle_value)}, {"z_score", number_or_null(r.z_score)}});
    }
    ojson j = base_summary(cfg, "validate moments", cfg.n, k, std::nullopt, std::nullopt);
    j["report"] = {{"replicates", cfg.validate.replicates}, {"functionals", jr}};
    return j;
}

}  // namespace

ojson run_sample(const RunConfig& cfg) {
    const Setup s = setup(cfg);
    const fs::path out = cfg.output;
    const ReferenceTable table = generate_table(*s.model, cfg.n, cfg.seed);
    const AcceptedSet acc = accept(cfg, table, s.s0);
    write_atomically(out / "table.abct", [&](std::ostream& os) { write_table_binary(os, table); });
    if (cfg.write_table_csv) {
        write_atomically(out / "table.csv", [&](std::ostream& os) { write_table_csv(os, table); });
    }
    write_atomically(out / "accepted.csv", accepted_csv(acc));
    const std::optional<double> h = acc.empty() ? std::nullopt : std::optional<double>(resolve_h(cfg, acc));
    ojson j = base_summary(cfg, "sample", cfg.n, acc.size(), h, acc.radius_next);
    j["s0"] = s.s0;
    write_json(out / "summary.json", j);
    return j;
}

ojson run_estimate(const RunConfig& cfg) {
    const Setup s = setup(cfg);
    const fs::path out = cfg.output;
    const ReferenceTable table = generate_table(*s.model, cfg.n, cfg.seed);
    const AcceptedSet acc = accept(cfg, table, s.s0);
    if (acc.empty()) {
        throw EmptyAcceptedSet("no draw fell within epsilon of s0; the density estimate is undefined");
    }
    const double h = resolve_h(cfg, acc);
    const KernelSpec kernel(cfg.kernel, s.model->param_dim());
    const DensityEstimate est = estimate_density(acc, h, kernel, resolve_grid(cfg, acc, h), cfg.seed);
    write_atomically(out / "density.csv", [&](std::ostream& os) { write_density_csv(os, est); });
    write_json(out / "density.json", density_sidecar(est));
    ojson j = base_summary(cfg, "estimate", cfg.n, acc.size(), h, acc.radius_next);
    j["s0"] = s.s0;
    j["kernel"] = to_string(cfg.kernel);
    j["grid_points"] = est.grid.size();
    j["integral"] = trapezoid_integral(est.grid, est.values);
    write_json(out / "summary.json", j);
    return j;
}

ojson run_validate(const RunConfig& cfg, std::string_view which) {
    const Setup s = setup(cfg);
    const fs::path out = cfg.output;
    ojson j;
    if (which == "mise") j = validate_mise(cfg, s, out);
    else if (which == "rates") j = validate_rates(cfg, s, out);
    else if (which == "prop1") j = validate_prop1(cfg, s, out);
    else if (which == "bounds") j = validate_bounds(cfg, s, out);
    else if (which == "moments") j = validate_moments(cfg, s, out);
    else throw InvalidArgument("unknown validation '" + std::string(which) + "'");
    write_json(out / "summary.json", j);
    return j;
}

ojson schedule_report(std::size_t m, std::size_t p, std::size_t n, double c_k, double c_h) {
    const ScheduleValue sv = schedule(m, p, n, c_k, c_h);
    ojson j;
    j["k"] = sv.k;
    j["h"] = sv.h;
    j["regime"] = to_string(sv.schedule.regime);
    j["exponents"] = {
        {"k", {{"num", sv.schedule.k_exponent.num}, {"den", sv.schedule.k_exponent.den},
               {"value", sv.schedule.k_exponent.value()}}},
        {"h", {{"num", sv.schedule.h_exponent.num}, {"den", sv.schedule.h_exponent.den},
               {"value", sv.schedule.h_exponent.value()}}}};
    j["acceptance_fraction"] = number_or_null(acceptance_fraction(m, p, n));
    j["m"] = m;
    j["p"] = p;
    j["N"] = n;
    j["c_k"] = c_k;
    j["c_h"] = c_h;
    return j;
}

}  // namespace abc::cli
