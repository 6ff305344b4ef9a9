#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "onn/oracle.hpp"

namespace onn::io {

/// 8-bit grayscale raster as stored in a PGM file.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 255;
    std::vector<std::uint8_t> pixels;  // row-major
};

enum class PgmFormat { ascii_p2, binary_p5 };

/// Reads P2 or P5 with maxval <= 255. Throws InputError on anything else.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(std::string_view bytes);
void write_pgm(const std::filesystem::path& path, const GrayImage& image, PgmFormat format = PgmFormat::binary_p5);

/// Pixel v becomes 2 v / maxval - 1.
Image to_image(const GrayImage& gray);

/// Renders values in [-1, +1] back to pixels, rounding to the nearest level.
GrayImage from_values(std::size_t width, std::size_t height, const std::vector<double>& values,
                      unsigned maxval = 255);

/// Shortest round-trip decimal form, independent of the C++ locale. NaN is
/// written as an empty field.
std::string format_number(double value);

/// Comma-separated writer. Fields are written as given; callers only pass
/// numbers and identifiers, so no quoting is performed.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& field(std::string_view text);
    CsvWriter& field(const char* text) { return field(std::string_view(text)); }
    CsvWriter& field(double value);
    CsvWriter& field(std::size_t value);
    CsvWriter& field(bool value);
    void end_row();

private:
    void separator();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

}  // namespace onn::io
