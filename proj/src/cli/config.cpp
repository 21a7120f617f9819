#include "qe/cli/config.hpp"

#include "qe/errors.hpp"

#include <cmath>
#include <fstream>

namespace qe::cli {

namespace {

const std::pair<Column, const char*> kColumnNames[] = {
    {Column::exact, "exact"},   {Column::purity, "purity"},   {Column::detbound, "detbound"},
    {Column::szego, "szego"},   {Column::bkbound, "bkbound"},
};

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::size_t get_count(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

Column parse_column(const std::string& name) {
    for (const auto& [c, s] : kColumnNames) {
        if (name == s) return c;
    }
    throw ConfigError("unknown output column '" + name + "' (expected exact, purity, detbound, szego, bkbound)");
}

std::string column_name(Column c) {
    for (const auto& [col, s] : kColumnNames) {
        if (col == c) return s;
    }
    return "?";
}

void ScenarioConfig::validate() const {
    const auto lam = lambda();
    const auto b = beta();
    if (N < 2) throw ConfigError("N must be at least 2");
    const std::size_t cut_n = cut();
    if (cut_n == 0 || cut_n >= N) throw ConfigError("n must satisfy 0 < n < N");
    if (!std::isfinite(t0) || !std::isfinite(t1) || t0 < 0.0 || t1 <= t0) {
        throw ConfigError("times must satisfy 0 <= t0 < t1");
    }
    if (steps < 2) throw ConfigError("steps must be at least 2");
    if (k_max && *k_max < 8) throw ConfigError("kmax must be at least 8");
    if (jobs == 0) throw ConfigError("jobs must be positive");
    if (outputs.empty()) throw ConfigError("no output columns selected");
    try {
        require_positive(b, "beta");
        require_positive(lam, "lambda", true);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json ScenarioConfig::to_json() const {
    nlohmann::json j;
    j["lambda"] = lambda_spec;
    j["beta"] = beta_spec;
    j["N"] = N;
    j["n"] = cut();
    j["t0"] = t0;
    j["t1"] = t1;
    j["steps"] = steps;
    if (k_max) {
        j["kmax"] = *k_max;
    } else {
        j["kmax"] = "auto";
    }
    std::vector<std::string> cols;
    for (Column c : outputs) cols.push_back(column_name(c));
    j["outputs"] = cols;
    j["jobs"] = jobs;
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j, ScenarioConfig cfg) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"lambda", "beta", "N", "n", "t0", "t1", "steps", "kmax", "outputs", "jobs"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (j.contains("lambda")) cfg.lambda_spec = get_as<std::string>(j, "lambda");
    if (j.contains("beta")) cfg.beta_spec = get_as<std::string>(j, "beta");
    if (j.contains("N")) cfg.N = get_count(j, "N");
    if (j.contains("n")) cfg.n = get_count(j, "n");
    if (j.contains("t0")) cfg.t0 = get_as<double>(j, "t0");
    if (j.contains("t1")) cfg.t1 = get_as<double>(j, "t1");
    if (j.contains("steps")) cfg.steps = get_count(j, "steps");
    if (j.contains("kmax")) {
        const auto& k = j.at("kmax");
        if (k.is_string() && k.get<std::string>() == "auto") {
            cfg.k_max.reset();
        } else {
            cfg.k_max = get_count(j, "kmax");
        }
    }
    if (j.contains("outputs")) {
        cfg.outputs.clear();
        for (const auto& name : get_as<std::vector<std::string>>(j, "outputs")) cfg.outputs.insert(parse_column(name));
    }
    if (j.contains("jobs")) cfg.jobs = static_cast<unsigned>(get_count(j, "jobs"));
    return cfg;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) { return from_json(j, ScenarioConfig{}); }

std::vector<double> time_grid(const ScenarioConfig& cfg) {
    std::vector<double> t(cfg.steps);
    const double span = cfg.t1 - cfg.t0;
    const double last = static_cast<double>(cfg.steps - 1);
    for (std::size_t i = 0; i < cfg.steps; ++i) t[i] = cfg.t0 + span * (static_cast<double>(i) / last);
    t.back() = cfg.t1;
    return t;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return ScenarioConfig::from_json(j, std::move(base));
}

}  // namespace qe::cli
