#include "onn/oracle.hpp"

#include <string>

#include "onn/error.hpp"

namespace onn {
namespace {

void require_same_side(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ConfigError(std::string(what) + ": side mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
    }
}

}  // namespace

Image Image::from_values(std::size_t width, std::size_t height, std::vector<double> values) {
    if (width == 0 || height == 0) throw InputError("image: dimensions must be positive");
    if (values.size() != width * height) {
        throw InputError("image: expected " + std::to_string(width * height) + " values, got " +
                         std::to_string(values.size()));
    }
    for (double v : values) {
        if (!(v >= -1.0 && v <= 1.0)) throw InputError("image: entry outside [-1, +1]");
    }
    return Image{width, height, std::move(values)};
}

Fragment Image::window(std::size_t row, std::size_t col, std::size_t side) const {
    if (side == 0 || row + side > height || col + side > width) {
        throw InputError("window at (" + std::to_string(row) + ", " + std::to_string(col) + ") of side " +
                         std::to_string(side) + " exceeds the " + std::to_string(width) + "x" +
                         std::to_string(height) + " image");
    }
    std::vector<double> v;
    v.reserve(side * side);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) v.push_back(at(row + r, col + c));
    }
    return Fragment{side, std::move(v)};
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
    return sum;
}

double dot(const Fragment& fragment, const GaborFilter& filter) {
    require_same_side(fragment.side, filter.side, "dot");
    return dot(fragment.values, filter.values);
}

FeatureMap convolve_valid(const Image& image, const GaborFilter& filter, KernelMode mode) {
    const std::size_t s = filter.side;
    if (s == 0 || s > image.width || s > image.height) {
        throw InputError("convolve_valid: filter of side " + std::to_string(s) + " is larger than the " +
                         std::to_string(image.width) + "x" + std::to_string(image.height) + " image");
    }
    FeatureMap out;
    out.width = image.width - s + 1;
    out.height = image.height - s + 1;
    out.values.resize(out.width * out.height);

    // Kernel in the orientation it is applied: flipped for true convolution.
    std::vector<double> kernel(filter.values);
    if (mode == KernelMode::convolution) {
        for (std::size_t i = 0; i < s * s; ++i) kernel[i] = filter.values[s * s - 1 - i];
    }
    for (std::size_t r = 0; r < out.height; ++r) {
        for (std::size_t c = 0; c < out.width; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double* pixels = &image.values[(r + i) * image.width + c];
                const double* taps = &kernel[i * s];
                for (std::size_t j = 0; j < s; ++j) sum += pixels[j] * taps[j];
            }
            out.values[r * out.width + c] = sum;
        }
    }
    return out;
}

IdentitySides distance_identity_check(const Fragment& fragment, const GaborFilter& filter) {
    require_same_side(fragment.side, filter.side, "distance_identity_check");
    double ff = 0.0, gg = 0.0, dd = 0.0;
    for (std::size_t j = 0; j < fragment.size(); ++j) {
        const double f = fragment.values[j];
        const double g = filter.values[j];
        ff += f * f;
        gg += g * g;
        dd += (f - g) * (f - g);
    }
    return IdentitySides{2.0 * dot(fragment, filter), ff + gg - dd};
}

}  // namespace onn
