#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace onn {

/// Square image patch, row-major, every entry in [-1, +1].
struct Fragment {
    std::size_t side = 0;
    std::vector<double> values;

    /// Validating constructor; throws InputError on a bad size or range.
    static Fragment from_values(std::size_t side, std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
};

/// Parameters of one grating in a filter bank. `sigma` > 0 applies a
/// Gaussian window of that width (in pixels) before binarization.
struct GaborSpec {
    double theta_deg = 0.0;
    double k = 0.0;  // cycles per pixel
    double phase = 0.0;
    bool binarized = true;
    double sigma = 0.0;

    bool operator==(const GaborSpec&) const = default;
};

struct GaborFilter {
    std::size_t side = 0;
    std::vector<double> values;
    double theta_deg = 0.0;
    double k = 0.0;
    double phase = 0.0;
    bool binarized = true;

    /// Filter with an arbitrary pattern (entries in [-1, +1]). The grating
    /// metadata is set to NaN; `binarized` is true iff every entry is +-1.
    static GaborFilter from_values(std::size_t side, std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
};

struct FrequencyVector {
    std::vector<double> omega;

    std::size_t size() const noexcept { return omega.size(); }
};

/// Maps grayscale pixels in [0, g_max] to 2*raw/g_max - 1, row-major.
Fragment normalize_fragment(std::span<const double> raw, std::size_t side, double g_max);

/// Cosine grating cos(2*pi*k*(x cos(theta) + y sin(theta)) + phase) sampled
/// on centred pixel coordinates, x along columns and y along rows. When
/// binarized, raw >= 0 maps to +1 (ties included) and the rest to -1.
GaborFilter gabor_filter(std::size_t side, const GaborSpec& spec);
GaborFilter gabor_filter(std::size_t side, double theta_deg, double k, double phase, bool binarized);

/// The 18-entry grid theta in {0, 30, ..., 150} deg x k in {0.2, 0.35, 0.5},
/// phase 0, binarized. Orientation-major: index = 3 * theta_index + k_index.
std::vector<GaborSpec> default_bank_specs();
std::vector<GaborFilter> default_bank(std::size_t side = 5);

std::vector<GaborFilter> make_bank(std::size_t side, std::span<const GaborSpec> specs);

/// Bank definition read from JSON. Accepts either a bare array of filter
/// objects or {"side": s, "filters": [...]}; each filter object holds
/// theta_deg and k, and optionally phase (default 0), binarized (default
/// true) and sigma (default 0). `side` is 0 when the file does not set it.
struct BankDefinition {
    std::size_t side = 0;
    std::vector<GaborSpec> filters;
};

BankDefinition parse_bank_json(std::string_view text);
BankDefinition load_bank_file(const std::filesystem::path& path);

/// omega_j = omega0 + delta_omega * (F_j - G_j), row-major.
FrequencyVector fsk_encode(const Fragment& fragment, const GaborFilter& filter, double omega0,
                           double delta_omega);

}  // namespace onn
