#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "onn/cli/commands.hpp"
#include "onn/error.hpp"

namespace onn::cli {
namespace {

// Flag values; anything set here wins over the config file.
struct Overrides {
    std::string config;
    std::string seeds;
    std::optional<unsigned> jobs;
    std::string out_dir;
    bool dump_traces = false;
    std::optional<double> rho, omega0, delta_omega, epsilon, dt, t_end, peak_tau, initial_amplitude;
    std::optional<std::size_t> stride;
    std::string dom_method;
    std::optional<double> sample_time, trailing_fraction;
    std::string bank;
    bool reference_oscillator = false;
    bool exclude_self = false;
    bool unnormalized_averager = false;
};

void add_run_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config, "JSON run configuration");
    cmd.add_option("--seeds", o.seeds, "Seed list, e.g. 0-7 or 1,4,9 (default 0-7)");
    cmd.add_option("--jobs", o.jobs, "Worker threads (default: all hardware threads)");
    cmd.add_option("--out-dir", o.out_dir, "Output directory (default: out)");
    cmd.add_flag("--dump-traces", o.dump_traces, "Write per-filter trace CSVs (first seed)");
    cmd.add_option("--rho", o.rho, "Nonlinear gain");
    cmd.add_option("--omega0", o.omega0, "Centre angular frequency");
    cmd.add_option("--delta-omega", o.delta_omega, "FSK detuning scale");
    cmd.add_option("--epsilon", o.epsilon, "Coupling coefficient");
    cmd.add_option("--dt", o.dt, "Integration step, radian-time (default: 2*pi/(50*omega_max))");
    cmd.add_option("--t-end", o.t_end, "Integration span, radian-time");
    cmd.add_option("--stride", o.stride, "Trace sampling stride in steps");
    cmd.add_option("--peak-tau", o.peak_tau, "Peak-detector decay constant, radian-time");
    cmd.add_option("--initial-amplitude", o.initial_amplitude, "Initial |z_i| (default 1)");
    cmd.add_option("--dom-method", o.dom_method, "trailing_mean_envelope | sample_peak_detector")
        ->check(CLI::IsMember({"trailing_mean_envelope", "sample_peak_detector"}));
    cmd.add_option("--sample-time", o.sample_time, "Peak-detector sampling time, radian-time");
    cmd.add_option("--trailing-fraction", o.trailing_fraction, "Envelope averaging fraction");
    cmd.add_option("--bank", o.bank, "Bank JSON file");
    cmd.add_flag("--reference-oscillator", o.reference_oscillator, "Add an extra oscillator at omega0");
    cmd.add_flag("--exclude-self", o.exclude_self, "Leave z_i out of its own coupling sum");
    cmd.add_flag("--unnormalized-averager", o.unnormalized_averager, "Averager output sum z_j instead of the mean");
}

RunConfig build_config(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (!o.seeds.empty()) cfg.match.seeds = parse_seed_list(o.seeds);
    if (o.jobs) cfg.match.jobs = *o.jobs;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.dump_traces) cfg.dump_traces = true;
    auto& d = cfg.dynamics;
    if (o.rho) d.rho = *o.rho;
    if (o.omega0) d.omega0 = *o.omega0;
    if (o.delta_omega) d.delta_omega = *o.delta_omega;
    if (o.epsilon) d.epsilon = *o.epsilon;
    if (o.dt) d.dt = *o.dt;
    if (o.t_end) d.t_end = *o.t_end;
    if (o.stride) d.stride = *o.stride;
    if (o.peak_tau) d.peak_tau = *o.peak_tau;
    if (o.exclude_self) d.include_self_in_sum = false;
    if (o.unnormalized_averager) d.normalize_averager = false;
    if (o.initial_amplitude) cfg.match.initial_amplitude = *o.initial_amplitude;
    if (o.reference_oscillator) cfg.match.reference_oscillator = true;
    if (o.dom_method == "trailing_mean_envelope") cfg.match.policy.method = DomMethod::trailing_mean_envelope;
    if (o.dom_method == "sample_peak_detector") cfg.match.policy.method = DomMethod::sample_peak_detector;
    if (o.sample_time) cfg.match.policy.sample_time = *o.sample_time;
    if (o.trailing_fraction) cfg.match.policy.trailing_fraction = *o.trailing_fraction;
    if (!o.bank.empty()) {
        const auto def = load_bank_file(o.bank);
        cfg.bank = def.filters;
        if (def.side > 0) cfg.side = def.side;
    }
    return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Convolution inference on a simulated coupled-oscillator array"};
    app.require_subcommand(1);

    Overrides o;
    MatchCommand match;
    auto* match_cmd = app.add_subcommand("match", "Run the filter bank against one image fragment");
    match_cmd->add_option("image", match.image, "PGM image (P2 or P5)")->required();
    match_cmd->add_option("--row", match.row, "Fragment top row (default 0)");
    match_cmd->add_option("--col", match.col, "Fragment left column (default 0)");
    add_run_options(*match_cmd, o);

    SweepCommand sweep;
    std::string grid = "0:0.2:0.005";
    auto* sweep_cmd = app.add_subcommand("sweep-locking", "Two-oscillator locking sweep over detuning");
    sweep_cmd->add_option("--grid", grid, "Detunings: start:stop:step or a,b,c (default 0:0.2:0.005)");
    sweep_cmd->add_option("--spread-tol", sweep.spread_tol, "Lock tolerance on the frequency gap (default 0.1*coupling)");
    add_run_options(*sweep_cmd, o);

    FeatureMapCommand fmap;
    bool continuous = false;
    std::optional<std::size_t> filter_index;
    std::string oracle_mode = "correlation";
    auto* fmap_cmd = app.add_subcommand("featuremap", "ONN feature map of a whole image for one filter");
    fmap_cmd->add_option("image", fmap.image, "PGM image (P2 or P5)")->required();
    fmap_cmd->add_option("--theta", fmap.filter.theta_deg, "Filter orientation, degrees (default 0)");
    fmap_cmd->add_option("--k", fmap.filter.k, "Filter spatial frequency, cycles/pixel (default 0)");
    fmap_cmd->add_option("--phase", fmap.filter.phase, "Filter phase, radians (default 0)");
    fmap_cmd->add_flag("--continuous", continuous, "Do not binarize the filter");
    fmap_cmd->add_option("--filter-index", filter_index, "Use this entry of the configured bank");
    fmap_cmd->add_option("--oracle-mode", oracle_mode, "correlation | convolution (default correlation)")
        ->check(CLI::IsMember({"correlation", "convolution"}));
    add_run_options(*fmap_cmd, o);

    HwCommand hwc;
    auto* hw_cmd = app.add_subcommand("hw", "Closed-form locking range, power and inference cost");
    hw_cmd->add_option("--i-drv", hwc.params.i_drv, "Drive current amplitude, A (default 0.26e-3)");
    hw_cmd->add_option("--vcc", hwc.params.vcc, "Supply voltage, V (default 0.8)");
    hw_cmd->add_option("--freq", hwc.params.f, "Oscillation frequency, Hz (default 6e9)");
    hw_cmd->add_option("--c-coup", hwc.params.c_coup, "Coupling capacitance, F (default 1e-15)");
    hw_cmd->add_option("--n", hwc.params.n, "Oscillators per array (default 26)");
    hw_cmd->add_option("--delay", hwc.delay_per_conv, "Delay per convolution, s (default 6e-9)");
    hw_cmd->add_option("--filters", hwc.n_filters, "Filters run in sequence (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (*hw_cmd) {
            cmd_hw(hwc, out);
            return 0;
        }
        RunConfig cfg = build_config(o);
        if (*match_cmd) {
            cmd_match(cfg, match, out);
        } else if (*sweep_cmd) {
            sweep.detunings = parse_grid(grid);
            // The pair has its own defaults; only explicit flags replace them.
            sweep.epsilon = o.epsilon.value_or(sweep.epsilon);
            sweep.t_end = o.t_end.value_or(sweep.t_end);
            cmd_sweep_locking(cfg, sweep, out);
        } else if (*fmap_cmd) {
            fmap.filter.binarized = !continuous;
            fmap.bank_index = filter_index;
            fmap.oracle_mode = oracle_mode == "convolution" ? KernelMode::convolution : KernelMode::correlation;
            cmd_featuremap(cfg, fmap, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace onn::cli
