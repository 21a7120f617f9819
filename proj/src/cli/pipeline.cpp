#include "qe/cli/pipeline.hpp"

#include "qe/errors.hpp"
#include "qe/reduction.hpp"
#include "qe/szego.hpp"
#include "qe/version.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace qe::cli {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first) first = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

BoundSeries run_series(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto lam = cfg.lambda();
    const auto beta = cfg.beta();
    const auto times = time_grid(cfg);

    BoundSeries series;
    series.config = cfg;
    series.rows.resize(times.size());

    const auto& out = cfg.outputs;
    bool dense = out.count(Column::exact) || out.count(Column::purity) || out.count(Column::detbound);
    const bool fourier = out.count(Column::szego) || out.count(Column::bkbound);
    if (dense && cfg.N > kDenseLimit) {
        series.warnings.push_back("N = " + std::to_string(cfg.N) + " exceeds " + std::to_string(kDenseLimit) +
                                  "; dense columns skipped");
        dense = false;
    }

    std::vector<std::string> row_warnings(times.size());
    const EvolutionSetup setup{lam, beta, cfg.N};
    parallel_for(times.size(), cfg.jobs, [&](std::size_t i) {
        BoundRow& row = series.rows[i];
        row.t = times[i];
        if (dense) {
            const auto rec = entropy_record(evolve(setup, row.t), cfg.cut());
            if (out.count(Column::exact)) row.exact_entropy = rec.exact_entropy;
            if (out.count(Column::purity)) row.neg_log_purity = rec.neg_log_purity;
            if (out.count(Column::detbound)) row.det_bound = rec.det_bound;
        }
        if (fourier) {
            const auto fs = szego_bounds(lam, beta, row.t, cfg.k_max);
            if (out.count(Column::szego)) row.szego_sum = fs.szego.value;
            if (out.count(Column::bkbound)) row.bk_bound = fs.bk_bound;
            if (!fs.szego.tail_ok) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "t = %.17g: Szegő tail not converged at kmax = %zu (suggest %zu)", row.t,
                              fs.k_max, fs.szego.suggested_k_max);
                row_warnings[i] = buf;
            }
        }
    });
    for (auto& w : row_warnings) {
        if (!w.empty()) series.warnings.push_back(std::move(w));
    }
    series.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return series;
}

std::string format_value(std::optional<double> v) {
    if (!v) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

namespace {

void write_row(std::ostream& os, const BoundRow& r) {
    os << format_value(r.t) << ',' << format_value(r.exact_entropy) << ',' << format_value(r.neg_log_purity) << ','
       << format_value(r.det_bound) << ',' << format_value(r.szego_sum) << ',' << format_value(r.bk_bound) << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const BoundSeries& series) {
    os << kCsvHeader << '\n';
    for (const auto& r : series.rows) write_row(os, r);
}

void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, BoundSeries>>& runs) {
    os << "param_value," << kCsvHeader << '\n';
    for (const auto& [value, series] : runs) {
        for (const auto& r : series.rows) {
            os << format_value(value) << ',';
            write_row(os, r);
        }
    }
}

nlohmann::json metadata_json(const BoundSeries& series) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = series.config.to_json();
    j["runtime_seconds"] = series.runtime_seconds;
    j["warnings"] = series.warnings;
    return j;
}

}  // namespace qe::cli
