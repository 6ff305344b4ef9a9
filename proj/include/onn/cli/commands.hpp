#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "onn/cli/config.hpp"
#include "onn/hardware.hpp"
#include "onn/inference.hpp"
#include "onn/oracle.hpp"

namespace onn::cli {

// ---- match ----------------------------------------------------------------

struct MatchCommand {
    std::filesystem::path image;
    std::size_t row = 0;  // top-left corner of the fragment
    std::size_t col = 0;
};

/// Runs the configured bank against one image fragment. Writes
/// <out_dir>/report.csv and, when cfg.dump_traces is set,
/// <out_dir>/trace_filter_<i>.csv for the first seed of every filter.
MatchReport cmd_match(const RunConfig& cfg, const MatchCommand& cmd, std::ostream& out);

void write_report_csv(const std::filesystem::path& path, const MatchReport& report);
void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace);

// ---- sweep-locking ---------------------------------------------------------

struct SweepCommand {
    double epsilon = 0.05;
    std::vector<double> detunings;
    double t_end = 4000.0;
    // 0 selects 0.1 * epsilon.
    double spread_tol = 0.0;
};

struct SweepPoint {
    double detuning = 0.0;
    bool locked = false;
    double final_freq_gap = 0.0;
    double beat_amplitude = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // sorted by detuning
    // Largest detuning such that it and every smaller grid point locked.
    std::optional<double> boundary;
};

/// Two oscillators at omega0 -+ detuning/2 with coupling epsilon, one run per
/// grid point from the first configured seed. Writes
/// <out_dir>/sweep_locking.csv.
SweepResult cmd_sweep_locking(const RunConfig& cfg, const SweepCommand& cmd, std::ostream& out);

// ---- featuremap ------------------------------------------------------------

struct FeatureMapCommand {
    std::filesystem::path image;
    GaborSpec filter;
    // Takes the filter from the configured bank instead of `filter`.
    std::optional<std::size_t> bank_index;
    KernelMode oracle_mode = KernelMode::correlation;
};

struct FeatureMapResult {
    OnnFeatureMap onn;
    FeatureMap oracle;
    double pearson = 0.0;
};

/// Writes <out_dir>/onn_map.csv and <out_dir>/oracle_map.csv (columns
/// row,col,value) and prints their Pearson correlation.
FeatureMapResult cmd_featuremap(const RunConfig& cfg, const FeatureMapCommand& cmd, std::ostream& out);

void write_map_csv(const std::filesystem::path& path, const FeatureMap& map);

// ---- hw --------------------------------------------------------------------

struct HwCommand {
    hw::HardwareParams params;
    double delay_per_conv = 6e-9;
    std::size_t n_filters = 1;
};

void cmd_hw(const HwCommand& cmd, std::ostream& out);

/// "208 uW"-style rendering with SI prefixes from f to G.
std::string engineering(double value, std::string_view unit);

// ---- entry point -----------------------------------------------------------

/// Parses argv and dispatches. Returns 0 on success, 1 on usage or
/// configuration errors, 2 on runtime or numeric errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace onn::cli
