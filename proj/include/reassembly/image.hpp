#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace reassembly {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB image, interleaved, row-major, no padding.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    Rgb pixel(int x, int y) const {
        const std::uint8_t* p = &data_[offset(x, y)];
        return {p[0], p[1], p[2]};
    }
    void set_pixel(int x, int y, Rgb c) {
        std::uint8_t* p = &data_[offset(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }
    std::span<const std::uint8_t> row(int y) const {
        return std::span<const std::uint8_t>(data_).subspan(offset(0, y), static_cast<std::size_t>(width_) * 3);
    }
    std::span<std::uint8_t> row(int y) {
        return std::span<std::uint8_t>(data_).subspan(offset(0, y), static_cast<std::size_t>(width_) * 3);
    }
    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    /// Copy of the w x h window at (x, y); the window must lie inside.
    Raster crop(int x, int y, int w, int h) const;
    /// Draws `src` with its top-left corner at (x, y), clipped to this raster.
    void blit(const Raster& src, int x, int y);
    void fill_rect(int x, int y, int w, int h, Rgb c);

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Bilinear resampling with half-pixel centres and edge clamping.
Raster resize_bilinear(const Raster& src, int width, int height);

/// Decodes PNG/JPEG (anything the codec backend reads). Throws DataError
/// naming the path on failure.
Raster read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Raster& image);

}  // namespace reassembly
