#pragma once

#include "qe/cli/config.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qe::cli {

/// One time point: dense-route entropy columns and Szegő-side bounds. Columns
/// that were not requested (or skipped for size) stay empty.
struct BoundRow {
    double t = 0.0;
    std::optional<double> exact_entropy;
    std::optional<double> neg_log_purity;
    std::optional<double> det_bound;
    std::optional<double> szego_sum;
    std::optional<double> bk_bound;
};

struct BoundSeries {
    ScenarioConfig config;
    std::vector<BoundRow> rows;
    std::vector<std::string> warnings;
    double runtime_seconds = 0.0;
};

/// Largest N for which dense columns are computed.
inline constexpr std::size_t kDenseLimit = 1024;

/// Runs every time point (concurrently up to cfg.jobs). Throws
/// NumericalError when a row breaks the bound ordering.
BoundSeries run_series(const ScenarioConfig& cfg);

inline constexpr const char* kCsvHeader = "t,exact_entropy,neg_log_purity,det_bound,szego_sum,bk_bound";

/// %.17g, or an empty field for a missing value.
std::string format_value(std::optional<double> v);

void write_csv(std::ostream& os, const BoundSeries& series);
/// Sweep layout: `param_value,` followed by the regular columns.
void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, BoundSeries>>& runs);

nlohmann::json metadata_json(const BoundSeries& series);

/// Calls fn(i) for i in [0, count) on up to `jobs` threads; the first
/// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace qe::cli
