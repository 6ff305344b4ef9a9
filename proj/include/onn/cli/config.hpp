#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "onn/dynamics.hpp"
#include "onn/encoding.hpp"
#include "onn/inference.hpp"

namespace onn::cli {

/// Everything a command needs besides its own positional inputs.
///
/// JSON layout (every key optional):
///
///   {
///     "dynamics": { "rho", "omega0", "delta_omega", "epsilon", "dt", "t_end",
///                   "stride", "peak_tau", "include_self_in_sum",
///                   "normalize_averager", "initial_amplitude",
///                   "reference_oscillator" },
///     "dom":      { "method": "trailing_mean_envelope" | "sample_peak_detector",
///                   "sample_time", "trailing_fraction" },
///     "lock":     { "spread_tol_fraction", "dom_threshold_fraction" },
///     "bank":     <bank object or array> | "path/to/bank.json",
///     "seeds":    [0, 1, ...],
///     "jobs":     0,
///     "out_dir":  "out",
///     "dump_traces": false
///   }
struct RunConfig {
    OscillatorArrayConfig dynamics;
    MatchOptions match;
    std::size_t side = 5;
    std::vector<GaborSpec> bank = default_bank_specs();
    std::filesystem::path out_dir = "out";
    bool dump_traces = false;

    std::vector<GaborFilter> filters() const;

    /// Checks every module invariant that can be checked before a run.
    /// Messages name the offending field as "config.<section>.<key>".
    void validate() const;
};

/// Parses a JSON config. A relative bank path is resolved against base_dir.
/// Syntax errors report line and column; semantic errors name the field.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Seed lists such as "7", "0-7" or "1,4,10-12".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Grids such as "0:0.2:0.005" (start:stop:step, stop inclusive) or
/// "0,0.01,0.05".
std::vector<double> parse_grid(std::string_view text);

}  // namespace onn::cli
