#include "abc_cli/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "abc/errors.hpp"

namespace abc::cli {

using nlohmann::json;

std::string_view to_string(AcceptanceKind kind) noexcept {
    switch (kind) {
        case AcceptanceKind::k: return "k";
        case AcceptanceKind::percentile: return "percentile";
        case AcceptanceKind::epsilon: return "epsilon";
    }
    return "k";
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string out = "invalid configuration";
    for (const auto& issue : issues) out += "; " + issue.text();
    return out;
}

std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

class Checker {
public:
    std::vector<ConfigIssue> issues;

    void fail(std::string path, std::string message) {
        issues.push_back({std::move(path), std::move(message)});
    }

    bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
        if (!j.is_object()) {
            fail(path, "must be an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            if (!allowed.contains(key)) fail(child(path, key), "is not a recognised key");
        }
        return true;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            fail(path, "must be a number");
            return std::nullopt;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            fail(path, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> integer(const json& j, const std::string& path) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer()) {
            const auto v = j.get<std::int64_t>();
            if (v >= 0) return static_cast<std::uint64_t>(v);
            fail(path, "must be a non-negative integer");
            return std::nullopt;
        }
        if (j.is_number_float()) {
            const double v = j.get<double>();
            if (v >= 0 && v <= 9.007199254740992e15 && std::floor(v) == v) {
                return static_cast<std::uint64_t>(v);
            }
        }
        fail(path, "must be a non-negative integer");
        return std::nullopt;
    }

    std::optional<std::vector<double>> vector(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "must be a non-empty array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        bool ok = true;
        for (std::size_t i = 0; i < j.size(); ++i) {
            auto v = number(j[i], path + "[" + std::to_string(i) + "]");
            if (v) out.push_back(*v); else ok = false;
        }
        if (!ok) return std::nullopt;
        return out;
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            fail(path, "must be a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }
};

void parse_validate(Checker& c, const json& j, ValidateConfig& v) {
    const std::string path = "validate";
    if (!c.object(j, path, {"replicates", "Ns", "c_k", "pairs", "orders", "functionals", "runs",
                            "reference_draws", "level", "reference", "xi0", "L_diam"})) {
        return;
    }
    if (j.contains("replicates")) {
        if (auto r = c.integer(j["replicates"], "validate.replicates")) {
            if (*r < 2) c.fail("validate.replicates", "must be >= 2");
            v.replicates = *r;
        }
    }
    if (j.contains("Ns")) {
        const json& ns = j["Ns"];
        if (!ns.is_array()) {
            c.fail("validate.Ns", "must be an array of integers");
        } else {
            v.ns.clear();
            for (std::size_t i = 0; i < ns.size(); ++i) {
                const std::string p = "validate.Ns[" + std::to_string(i) + "]";
                if (auto n = c.integer(ns[i], p)) {
                    if (*n < 2) c.fail(p, "must be >= 2");
                    v.ns.push_back(*n);
                }
            }
        }
    }
    if (j.contains("c_k")) {
        if (auto x = c.number(j["c_k"], "validate.c_k")) {
            if (*x <= 0) c.fail("validate.c_k", "must be > 0");
            v.c_k = *x;
        }
    }
    if (j.contains("pairs")) {
        const json& ps = j["pairs"];
        if (!ps.is_array()) {
            c.fail("validate.pairs", "must be an array of [N, k] pairs");
        } else {
            v.pairs.clear();
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const std::string p = "validate.pairs[" + std::to_string(i) + "]";
                if (!ps[i].is_array() || ps[i].size() != 2) {
                    c.fail(p, "must be an [N, k] pair");
                    continue;
                }
                auto n = c.integer(ps[i][0], p + "[0]");
                auto k = c.integer(ps[i][1], p + "[1]");
                if (n && k) {
                    if (*n < 2 || *k < 1 || *k >= *n) c.fail(p, "needs N >= 2 and 1 <= k <= N-1");
                    v.pairs.emplace_back(*n, *k);
                }
            }
        }
    }
    if (j.contains("orders")) {
        const json& os = j["orders"];
        if (!os.is_array() || os.empty()) {
            c.fail("validate.orders", "must be a non-empty array containing 2 and/or 4");
        } else {
            v.orders.clear();
            for (std::size_t i = 0; i < os.size(); ++i) {
                const std::string p = "validate.orders[" + std::to_string(i) + "]";
                auto o = c.integer(os[i], p);
                if (o && *o != 2 && *o != 4) c.fail(p, "must be 2 or 4");
                if (o) v.orders.push_back(static_cast<int>(*o));
            }
        }
    }
    if (j.contains("functionals")) {
        const json& fs = j["functionals"];
        if (!fs.is_array() || fs.empty()) {
            c.fail("validate.functionals", "must be a non-empty array of names");
        } else {
            v.functionals.clear();
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const std::string p = "validate.functionals[" + std::to_string(i) + "]";
                auto name = c.string(fs[i], p);
                if (!name) continue;
                if (*name != "identity" && *name != "square" && *name != "const") {
                    c.fail(p, "must be one of identity, square, const");
                }
                v.functionals.push_back(*name);
            }
        }
    }
    if (j.contains("runs")) {
        if (auto r = c.integer(j["runs"], "validate.runs")) {
            if (*r < 1) c.fail("validate.runs", "must be >= 1");
            v.runs = *r;
        }
    }
    if (j.contains("reference_draws")) {
        if (auto r = c.integer(j["reference_draws"], "validate.reference_draws")) {
            if (*r < 1) c.fail("validate.reference_draws", "must be >= 1");
            v.reference_draws = *r;
        }
    }
    if (j.contains("level")) {
        if (auto x = c.number(j["level"], "validate.level")) {
            if (!(*x > 0 && *x < 1)) c.fail("validate.level", "must be in (0,1)");
            v.level = *x;
        }
    }
    if (j.contains("reference")) {
        if (auto s = c.string(j["reference"], "validate.reference")) {
            if (*s != "restricted" && *s != "prior_predictive") {
                c.fail("validate.reference", "must be \"restricted\" or \"prior_predictive\"");
            }
            v.reference = *s;
        }
    }
    if (j.contains("xi0")) {
        if (auto x = c.number(j["xi0"], "validate.xi0")) {
            if (*x <= 0) c.fail("validate.xi0", "must be > 0");
            v.xi0 = *x;
        }
    }
    if (j.contains("L_diam")) {
        if (auto x = c.number(j["L_diam"], "validate.L_diam")) {
            if (*x <= 0) c.fail("validate.L_diam", "must be > 0");
            v.l_diam = *x;
        }
    }
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigErrors::ConfigErrors(std::string path, std::string message)
    : ConfigErrors(std::vector<ConfigIssue>{{std::move(path), std::move(message)}}) {}

RunConfig validate_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigErrors("", std::string("is not valid JSON: ") + e.what());
    }
    return validate_config_json(doc);
}

RunConfig validate_config_json(const json& doc) {
    Checker c;
    RunConfig cfg;
    if (!c.object(doc, "", {"schema", "model", "N", "acceptance", "bandwidth", "kernel", "s0", "y0",
                            "seed", "grid", "validate", "output", "table_csv"})) {
        throw ConfigErrors(std::move(c.issues));
    }

    if (doc.contains("schema")) {
        auto s = c.string(doc["schema"], "schema");
        if (s && *s != kConfigSchema) {
            c.fail("schema", "must be \"" + std::string(kConfigSchema) + "\"");
        }
    }

    bool model_ok = false;
    if (!doc.contains("model")) {
        c.fail("model", "is required");
    } else if (c.object(doc["model"], "model", {"id", "params"})) {
        const json& m = doc["model"];
        model_ok = true;
        if (!m.contains("id")) {
            c.fail("model.id", "is required");
            model_ok = false;
        } else if (auto id = c.string(m["id"], "model.id")) {
            cfg.model_id = *id;
        } else {
            model_ok = false;
        }
        if (m.contains("params")) {
            if (!m["params"].is_object()) {
                c.fail("model.params", "must be an object of numbers");
                model_ok = false;
            } else {
                for (const auto& [key, value] : m["params"].items()) {
                    if (auto x = c.number(value, "model.params." + key)) {
                        cfg.model_params[key] = *x;
                    } else {
                        model_ok = false;
                    }
                }
            }
        }
    }
    ModelPtr model;
    if (model_ok) {
        try {
            model = make_model(cfg.model_id, cfg.model_params);
        } catch (const Error& e) {
            c.fail("model", e.what());
        }
    }

    bool n_ok = false;
    if (!doc.contains("N")) {
        c.fail("N", "is required");
    } else if (auto n = c.integer(doc["N"], "N")) {
        cfg.n = *n;
        if (*n < 2) {
            c.fail("N", "must be >= 2 (a reference table needs N >= 2 and 1 <= k <= N-1)");
        } else {
            n_ok = true;
        }
    }

    if (!doc.contains("acceptance")) {
        c.fail("acceptance", "is required: exactly one of k, percentile, epsilon");
    } else if (c.object(doc["acceptance"], "acceptance", {"k", "percentile", "epsilon"})) {
        const json& a = doc["acceptance"];
        const int present = int(a.contains("k")) + int(a.contains("percentile")) + int(a.contains("epsilon"));
        if (present != 1) {
            c.fail("acceptance", "must contain exactly one of k, percentile, epsilon");
        } else if (a.contains("k")) {
            cfg.acceptance.kind = AcceptanceKind::k;
            if (auto k = c.integer(a["k"], "acceptance.k")) {
                cfg.acceptance.value = static_cast<double>(*k);
                if (*k < 1) c.fail("acceptance.k", "must be >= 1");
                else if (n_ok && *k > cfg.n - 1) c.fail("acceptance.k", "must be <= N-1");
            }
        } else if (a.contains("percentile")) {
            cfg.acceptance.kind = AcceptanceKind::percentile;
            if (auto x = c.number(a["percentile"], "acceptance.percentile")) {
                cfg.acceptance.value = *x;
                if (!(*x > 0 && *x < 1)) c.fail("acceptance.percentile", "must be in (0,1)");
            }
        } else {
            cfg.acceptance.kind = AcceptanceKind::epsilon;
            if (auto x = c.number(a["epsilon"], "acceptance.epsilon")) {
                cfg.acceptance.value = *x;
                if (!(*x > 0)) c.fail("acceptance.epsilon", "must be > 0");
            }
        }
    }

    if (doc.contains("bandwidth")) {
        const json& b = doc["bandwidth"];
        if (b.is_string() && b.get<std::string>() == "auto") {
            cfg.bandwidth_auto = true;
        } else if (b.is_number()) {
            auto x = c.number(b, "bandwidth");
            if (x && *x > 0) {
                cfg.bandwidth_auto = false;
                cfg.bandwidth = *x;
            } else if (x) {
                c.fail("bandwidth", "must be > 0");
            }
        } else {
            c.fail("bandwidth", "must be a positive number or \"auto\"");
        }
    }

    if (doc.contains("kernel")) {
        if (auto s = c.string(doc["kernel"], "kernel")) {
            try {
                cfg.kernel = parse_kernel_kind(*s);
            } catch (const Error&) {
                c.fail("kernel", "must be \"naive\" or \"gaussian\"");
            }
        }
    }

    const bool has_s0 = doc.contains("s0");
    const bool has_y0 = doc.contains("y0");
    if (has_s0 == has_y0) {
        c.fail("", "exactly one of s0 or y0 is required");
    } else if (has_s0) {
        cfg.s0 = c.vector(doc["s0"], "s0");
        if (cfg.s0 && model && cfg.s0->size() != model->summary_dim()) {
            c.fail("s0", "must have " + std::to_string(model->summary_dim()) + " entries for model " +
                             cfg.model_id);
        }
    } else {
        cfg.y0 = c.vector(doc["y0"], "y0");
        if (cfg.y0 && model && model->raw_dim() == 0) {
            c.fail("y0", "model " + cfg.model_id + " has no raw-data summary map; give s0");
        }
    }

    if (!doc.contains("seed")) {
        c.fail("seed", "is required");
    } else if (auto s = c.integer(doc["seed"], "seed")) {
        cfg.seed = *s;
    }

    if (doc.contains("grid") && c.object(doc["grid"], "grid", {"points", "pad"})) {
        const json& g = doc["grid"];
        if (g.contains("points")) {
            if (auto p = c.integer(g["points"], "grid.points")) {
                if (*p < 2) c.fail("grid.points", "must be >= 2");
                cfg.grid.points = *p;
            }
        }
        if (g.contains("pad")) {
            if (auto p = c.number(g["pad"], "grid.pad")) {
                if (*p < 0) c.fail("grid.pad", "must be >= 0");
                cfg.grid.pad = *p;
            }
        }
    }

    if (doc.contains("validate")) parse_validate(c, doc["validate"], cfg.validate);

    if (doc.contains("output")) {
        if (auto s = c.string(doc["output"], "output")) {
            if (s->empty()) c.fail("output", "must be a non-empty path");
            cfg.output = *s;
        }
    }
    if (doc.contains("table_csv")) {
        if (!doc["table_csv"].is_boolean()) c.fail("table_csv", "must be a boolean");
        else cfg.write_table_csv = doc["table_csv"].get<bool>();
    }

    if (!c.issues.empty()) throw ConfigErrors(std::move(c.issues));
    return cfg;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["schema"] = kConfigSchema;
    j["model"]["id"] = cfg.model_id;
    j["model"]["params"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : cfg.model_params) j["model"]["params"][key] = value;
    j["N"] = cfg.n;
    if (cfg.acceptance.kind == AcceptanceKind::k) {
        j["acceptance"]["k"] = static_cast<std::uint64_t>(cfg.acceptance.value);
    } else {
        j["acceptance"][std::string(to_string(cfg.acceptance.kind))] = cfg.acceptance.value;
    }
    if (cfg.bandwidth_auto) j["bandwidth"] = "auto";
    else j["bandwidth"] = cfg.bandwidth;
    j["kernel"] = to_string(cfg.kernel);
    if (cfg.s0) j["s0"] = *cfg.s0;
    if (cfg.y0) j["y0"] = *cfg.y0;
    j["seed"] = cfg.seed;
    j["grid"] = nlohmann::ordered_json::object();
    if (cfg.grid.points) j["grid"]["points"] = *cfg.grid.points;
    if (cfg.grid.pad) j["grid"]["pad"] = *cfg.grid.pad;
    const ValidateConfig& v = cfg.validate;
    auto& jv = j["validate"];
    jv["replicates"] = v.replicates;
    jv["Ns"] = v.ns;
    jv["c_k"] = v.c_k;
    jv["pairs"] = nlohmann::ordered_json::array();
    for (const auto& [n, k] : v.pairs) jv["pairs"].push_back({n, k});
    jv["orders"] = v.orders;
    jv["functionals"] = v.functionals;
    jv["runs"] = v.runs;
    if (v.reference_draws) jv["reference_draws"] = *v.reference_draws;
    jv["level"] = v.level;
    jv["reference"] = v.reference;
    if (v.xi0) jv["xi0"] = *v.xi0;
    if (v.l_diam) jv["L_diam"] = *v.l_diam;
    j["output"] = cfg.output;
    j["table_csv"] = cfg.write_table_csv;
    return j;
}

std::string serialize(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::vector<double> observed_summary(const RunConfig& config, const Model& model) {
    if (config.s0) return *config.s0;
    if (config.y0) return model.summarize(*config.y0);
    throw InvalidArgument("configuration has neither s0 nor y0");
}

}  // namespace abc::cli
