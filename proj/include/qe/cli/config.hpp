#pragma once

#include "qe/spectral.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qe::cli {

enum class Column { exact, purity, detbound, szego, bkbound };

Column parse_column(const std::string& name);
std::string column_name(Column c);

struct ScenarioConfig {
    std::string lambda_spec = "gap:c=1.5";
    std::string beta_spec = "poly:1";
    std::size_t N = 64;
    std::optional<std::size_t> n;  // defaults to N/2
    double t0 = 0.0;
    double t1 = 10.0;
    std::size_t steps = 21;
    std::optional<std::size_t> k_max;  // unset = auto
    std::set<Column> outputs{Column::exact, Column::purity, Column::detbound, Column::szego, Column::bkbound};
    unsigned jobs = 1;

    std::size_t cut() const { return n.value_or(N / 2); }
    TrigPolynomial lambda() const { return parse_spectral_spec(lambda_spec); }
    TrigPolynomial beta() const { return parse_spectral_spec(beta_spec); }

    /// Throws ConfigError.
    void validate() const;

    nlohmann::json to_json() const;
    /// Overlays the keys present in `j` onto `base`.
    static ScenarioConfig from_json(const nlohmann::json& j, ScenarioConfig base);
    static ScenarioConfig from_json(const nlohmann::json& j);
};

/// t_i = t0 + i (t1 − t0)/(steps − 1).
std::vector<double> time_grid(const ScenarioConfig& cfg);

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});

}  // namespace qe::cli
