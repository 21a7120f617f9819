#pragma once

#include "qe/cli/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qe::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2, kNumericalInconsistency = 3 };

/// Writes the BoundSeries CSV to `out` (stdout when unset) and a
/// `<out>.meta.json` sidecar next to it.
int cmd_evolve(const ScenarioConfig& cfg, const std::optional<std::string>& out,
               const std::optional<std::string>& dump_state, std::ostream& stdout_stream, std::ostream& log);

struct Figure1Options {
    std::string out_dir = ".";
    unsigned jobs = 1;
    std::size_t steps = 101;  // on t ∈ [0, 50]
};

/// Szegő sum vs. t for λ = (c − cos θ)², β = 1, c ∈ {0.5, 1.0, 1.5}; fits in
/// figure1_fits.json. Returns 1 if the curve ordering at t = 50 is violated.
int cmd_figure1(const Figure1Options& opt, std::ostream& log);

/// param ∈ {c, N, n, t1}.
int cmd_sweep(const std::string& param, const std::vector<double>& values, const ScenarioConfig& base,
              const std::optional<std::string>& out, std::ostream& stdout_stream, std::ostream& log);

enum class VerifyLevel { quick, full };

/// Runs every invariant family; writes a JSON report. Returns 0 iff all pass.
int cmd_verify(VerifyLevel level, std::uint64_t seed, std::ostream& report, std::ostream& log);

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace qe::cli
