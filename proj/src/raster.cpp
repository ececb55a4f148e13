#include "stroketrace/raster.hpp"

#include "stroketrace/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stroketrace {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) {
        throw ValidationError("size", "negative image dimension");
    }
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 0 || height < 0 ||
        pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ValidationError("pixels", "pixel buffer does not match width x height");
    }
}

BinaryImage::BinaryImage(int width, int height, bool fill)
    : width_(width), height_(height),
      mask_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0) {
    if (width < 0 || height < 0) {
        throw ValidationError("size", "negative image dimension");
    }
}

std::size_t BinaryImage::count_foreground() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

namespace {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads an unsigned decimal.
    int next_int() {
        skip_separators();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            throw FormatError("PGM: expected integer at byte " + std::to_string(pos_));
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) {
                throw FormatError("PGM: integer overflow at byte " + std::to_string(pos_));
            }
            ++pos_;
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates the header from a P5 raster.
    void skip_single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw FormatError("PGM: missing whitespace before raster");
        }
        ++pos_;
    }

    std::size_t position() const { return pos_; }
    std::string_view rest() const { return bytes_.substr(pos_); }

private:
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
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

std::uint8_t rescale(int value, int maxval) {
    if (value > maxval) {
        throw FormatError("PGM: sample exceeds maxval");
    }
    if (maxval == 255) {
        return static_cast<std::uint8_t>(value);
    }
    return static_cast<std::uint8_t>(std::lround(static_cast<double>(value) * 255.0 / maxval));
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

} // namespace

GrayImage decode_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw FormatError("not a PGM (P2/P5) file");
    }
    const bool binary = bytes[1] == '5';
    PgmReader reader(bytes.substr(2));
    const int width = reader.next_int();
    const int height = reader.next_int();
    const int maxval = reader.next_int();
    if (width == 0 || height == 0) {
        throw FormatError("PGM: zero-dimension image");
    }
    if (maxval < 1 || maxval > 65535) {
        throw FormatError("PGM: maxval out of range");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> pixels(count);

    if (binary) {
        reader.skip_single_whitespace();
        const std::string_view raster = reader.rest();
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        if (raster.size() < count * bytes_per_sample) {
            throw FormatError("PGM: truncated raster");
        }
        for (std::size_t i = 0; i < count; ++i) {
            int v = static_cast<unsigned char>(raster[i * bytes_per_sample]);
            if (bytes_per_sample == 2) {
                v = (v << 8) | static_cast<unsigned char>(raster[i * 2 + 1]);
            }
            pixels[i] = rescale(v, maxval);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            pixels[i] = rescale(reader.next_int(), maxval);
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

GrayImage decode_png(std::string_view bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
        throw FormatError(std::string("PNG: ") + image.message);
    }
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw FormatError("PNG: zero-dimension image");
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t channels = color ? 3 : 1;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
        throw FormatError(std::string("PNG: ") + image.message);
    }
    const int width = static_cast<int>(image.width);
    const int height = static_cast<int>(image.height);
    if (!color) {
        return GrayImage(width, height, std::move(buffer));
    }
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (std::size_t i = 0; i < gray.size(); ++i) {
        gray[i] = luma(buffer[i * channels], buffer[i * channels + 1], buffer[i * channels + 2]);
    }
    return GrayImage(width, height, std::move(gray));
}

std::string encode_pgm(const GrayImage& img) {
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels().data()), img.pixels().size());
    return out;
}

std::string encode_pgm(const BinaryImage& img) { return encode_pgm(to_gray(img)); }

std::string encode_png(const GrayImage& img) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), 0, nullptr) == 0) {
        throw FormatError(std::string("PNG encode: ") + image.message);
    }
    std::string out(size, '\0');
    if (png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), 0, nullptr) == 0) {
        throw FormatError(std::string("PNG encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage out(img.width(), img.height(), 255);
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (img.mask()[i] != 0) {
            out.pixels()[i] = 0;
        }
    }
    return out;
}

GrayImage load_image(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    static constexpr std::array<unsigned char, 4> png_magic{0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::equal(png_magic.begin(), png_magic.end(), bytes.begin(),
                                        [](unsigned char m, char b) { return m == static_cast<unsigned char>(b); })) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P') {
        return decode_pgm(bytes);
    }
    throw FormatError("unsupported image format: " + path.string());
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    write_file_atomic(path, encode_pgm(img));
}

void save_image(const BinaryImage& img, const std::filesystem::path& path) {
    write_file_atomic(path, encode_pgm(img));
}

GrayImage median_filter_5x5(const GrayImage& img) {
    const int w = img.width();
    const int h = img.height();
    GrayImage out(w, h);
    std::array<std::uint8_t, 25> window{};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t n = 0;
            for (int dy = -2; dy <= 2; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -2; dx <= 2; ++dx) {
                    window[n++] = img.at(std::clamp(x + dx, 0, w - 1), yy);
                }
            }
            std::nth_element(window.begin(), window.begin() + 12, window.end());
            out.at(x, y) = window[12];
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("write failed: " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

} // namespace stroketrace
