#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gazescreen {

using Rgba = std::array<std::uint8_t, 4>;

/// Row-major 8-bit RGBA pixel grid.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, Rgba fill = {0, 0, 0, 0});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t* pixel(int x, int y) noexcept { return &pixels_[offset(x, y)]; }
    const std::uint8_t* pixel(int x, int y) const noexcept { return &pixels_[offset(x, y)]; }
    Rgba at(int x, int y) const noexcept {
        const auto* p = pixel(x, y);
        return {p[0], p[1], p[2], p[3]};
    }
    void set(int x, int y, Rgba c) noexcept {
        auto* p = pixel(x, y);
        p[0] = c[0], p[1] = c[1], p[2] = c[2], p[3] = c[3];
    }

    std::vector<std::uint8_t>& data() noexcept { return pixels_; }
    const std::vector<std::uint8_t>& data() const noexcept { return pixels_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t offset(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 4;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Non-interlaced 8-bit RGBA PNG with fixed compression settings, so
/// identical images encode to identical bytes.
std::vector<std::uint8_t> encode_png(const RasterImage& img);
RasterImage decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const RasterImage& img, const std::filesystem::path& path);
RasterImage read_png(const std::filesystem::path& path);

}  // namespace gazescreen
