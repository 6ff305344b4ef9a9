#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "onn/encoding.hpp"

namespace onn {

/// Row-major grayscale image with entries in [-1, +1].
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;

    static Image from_values(std::size_t width, std::size_t height, std::vector<double> values);

    double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }

    /// The side x side window whose top-left pixel is (row, col).
    Fragment window(std::size_t row, std::size_t col, std::size_t side) const;
};

struct FeatureMap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;

    double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
};

enum class KernelMode {
    convolution,  // kernel flipped in both axes
    correlation,  // kernel applied element-aligned
};

double dot(std::span<const double> a, std::span<const double> b);
double dot(const Fragment& fragment, const GaborFilter& filter);

/// Valid-mode, stride-1 sliding window. Output is
/// (height - side + 1) x (width - side + 1).
FeatureMap convolve_valid(const Image& image, const GaborFilter& filter,
                          KernelMode mode = KernelMode::convolution);

struct IdentitySides {
    double lhs = 0.0;  // 2 (F . G)
    double rhs = 0.0;  // |F|^2 + |G|^2 - |F - G|^2
};

IdentitySides distance_identity_check(const Fragment& fragment, const GaborFilter& filter);

}  // namespace onn
