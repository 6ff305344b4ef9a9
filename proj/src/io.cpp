#include "onn/io.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "onn/error.hpp"

namespace onn::io {
namespace {

class PgmCursor {
public:
    explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    std::size_t number(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (start == pos_) throw InputError(std::string("pgm: expected ") + what);
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
        if (ec != std::errc{}) throw InputError(std::string("pgm: bad ") + what);
        return value;
    }

    // After maxval exactly one whitespace byte precedes P5 raster data.
    void single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw InputError("pgm: missing whitespace before raster");
        }
        ++pos_;
    }

    std::string_view rest() const { return bytes_.substr(pos_); }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw InputError("pgm: unsupported magic (expected P2 or P5)");
    }
    const bool binary = bytes[1] == '5';
    PgmCursor cursor(bytes.substr(2));
    GrayImage img;
    img.width = cursor.number("width");
    img.height = cursor.number("height");
    const std::size_t maxval = cursor.number("maxval");
    if (img.width == 0 || img.height == 0) throw InputError("pgm: empty image");
    if (maxval == 0 || maxval > 255) throw InputError("pgm: only 8-bit images (maxval 1..255) are supported");
    img.maxval = static_cast<unsigned>(maxval);
    const std::size_t count = img.width * img.height;
    img.pixels.resize(count);

    if (binary) {
        cursor.single_whitespace();
        const auto raster = cursor.rest();
        if (raster.size() < count) throw InputError("pgm: truncated raster");
        for (std::size_t i = 0; i < count; ++i) img.pixels[i] = static_cast<std::uint8_t>(raster[i]);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t v = cursor.number("pixel");
            if (v > maxval) throw InputError("pgm: pixel exceeds maxval");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    for (auto p : img.pixels) {
        if (p > img.maxval) throw InputError("pgm: pixel exceeds maxval");
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open image " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_pgm(bytes);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image, PgmFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write image " + path.string());
    out << (format == PgmFormat::binary_p5 ? "P5" : "P2") << '\n'
        << image.width << ' ' << image.height << '\n'
        << image.maxval << '\n';
    if (format == PgmFormat::binary_p5) {
        out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    } else {
        for (std::size_t r = 0; r < image.height; ++r) {
            for (std::size_t c = 0; c < image.width; ++c) {
                out << static_cast<unsigned>(image.pixels[r * image.width + c])
                    << (c + 1 == image.width ? '\n' : ' ');
            }
        }
    }
}

Image to_image(const GrayImage& gray) {
    std::vector<double> values(gray.pixels.size());
    const double g_max = gray.maxval;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 2.0 * gray.pixels[i] / g_max - 1.0;
    return Image::from_values(gray.width, gray.height, std::move(values));
}

GrayImage from_values(std::size_t width, std::size_t height, const std::vector<double>& values, unsigned maxval) {
    if (values.size() != width * height) throw InputError("from_values: size mismatch");
    if (maxval == 0 || maxval > 255) throw InputError("from_values: maxval must be in 1..255");
    GrayImage img{width, height, maxval, std::vector<std::uint8_t>(values.size())};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= -1.0 && v <= 1.0)) throw InputError("from_values: value outside [-1, +1]");
        img.pixels[i] = static_cast<std::uint8_t>(std::lround((v + 1.0) * 0.5 * maxval));
    }
    return img;
}

std::string format_number(double value) {
    if (std::isnan(value)) return {};
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
    for (auto h : header) field(h);
    end_row();
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    for (const auto& h : header) field(h);
    end_row();
}

void CsvWriter::separator() {
    if (in_row_ > 0) out_ << ',';
    ++in_row_;
}

CsvWriter& CsvWriter::field(std::string_view text) {
    separator();
    out_ << text;
    return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_number(value))); }

CsvWriter& CsvWriter::field(std::size_t value) { return field(std::string_view(std::to_string(value))); }

CsvWriter& CsvWriter::field(bool value) { return field(std::string_view(value ? "1" : "0")); }

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw ConfigError("csv: row has " + std::to_string(in_row_) + " fields, header has " +
                          std::to_string(columns_));
    }
    out_ << '\n';
    in_row_ = 0;
}

}  // namespace onn::io
