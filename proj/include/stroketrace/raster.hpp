#ifndef STROKETRACE_RASTER_HPP
#define STROKETRACE_RASTER_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stroketrace {

/// 8-bit grayscale image, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Foreground (ink, "road") mask. Stored as bytes, 1 = foreground.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return mask_.size(); }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool at(int x, int y) const { return mask_[index(x, y)] != 0; }
    /// Out-of-bounds reads as background.
    bool foreground(int x, int y) const noexcept { return contains(x, y) && mask_[index(x, y)] != 0; }
    void set(int x, int y, bool value) { mask_[index(x, y)] = value ? 1 : 0; }

    std::size_t count_foreground() const noexcept;
    std::span<const std::uint8_t> mask() const noexcept { return mask_; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> mask_;
};

// Decoding and encoding. Throws FormatError on malformed input.
GrayImage decode_pgm(std::string_view bytes);
GrayImage decode_png(std::string_view bytes);
std::string encode_pgm(const GrayImage& img);
std::string encode_pgm(const BinaryImage& img);
std::string encode_png(const GrayImage& img);

/// Binary masks rendered ink-dark: foreground 0, background 255.
GrayImage to_gray(const BinaryImage& img);

/// Reads PGM (P2/P5) or PNG, sniffing the magic bytes. PNG colour is
/// converted with round(0.299R + 0.587G + 0.114B).
GrayImage load_image(const std::filesystem::path& path);

/// Writes binary PGM (P5). Throws IoError.
void save_image(const GrayImage& img, const std::filesystem::path& path);
void save_image(const BinaryImage& img, const std::filesystem::path& path);

/// 5x5 median with replicate padding; output values are the 13th order
/// statistic of each clamped window.
GrayImage median_filter_5x5(const GrayImage& img);

// File helpers shared by the CLI.
std::string read_file(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames on success.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace stroketrace

#endif
