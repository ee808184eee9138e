#include "reassembly/image.hpp"

#include "reassembly/error.hpp"
#include "reassembly/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace reassembly {

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
    data_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t k = 0; k < data_.size(); k += 3) {
        data_[k] = fill.r;
        data_[k + 1] = fill.g;
        data_[k + 2] = fill.b;
    }
}

Raster Raster::crop(int x, int y, int w, int h) const {
    Raster out(w, h);
    for (int r = 0; r < h; ++r) {
        const auto src = row(y + r).subspan(static_cast<std::size_t>(x) * 3, static_cast<std::size_t>(w) * 3);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

void Raster::blit(const Raster& src, int x, int y) {
    const int x0 = std::max(x, 0);
    const int y0 = std::max(y, 0);
    const int x1 = std::min(x + src.width(), width_);
    const int y1 = std::min(y + src.height(), height_);
    if (x0 >= x1 || y0 >= y1) return;
    for (int r = y0; r < y1; ++r) {
        const auto s = src.row(r - y).subspan(static_cast<std::size_t>(x0 - x) * 3, static_cast<std::size_t>(x1 - x0) * 3);
        std::copy(s.begin(), s.end(), row(r).begin() + static_cast<std::ptrdiff_t>(x0) * 3);
    }
}

void Raster::fill_rect(int x, int y, int w, int h, Rgb c) {
    const int x0 = std::max(x, 0);
    const int y0 = std::max(y, 0);
    const int x1 = std::min(x + w, width_);
    const int y1 = std::min(y + h, height_);
    for (int r = y0; r < y1; ++r) {
        for (int col = x0; col < x1; ++col) set_pixel(col, r, c);
    }
}

namespace {

struct Tap {
    int lo;
    int hi;
    float t;
};

// Source sample positions for each destination coordinate.
std::vector<Tap> taps(int src_size, int dst_size) {
    std::vector<Tap> out(static_cast<std::size_t>(dst_size));
    const double scale = static_cast<double>(src_size) / dst_size;
    for (int d = 0; d < dst_size; ++d) {
        double s = (d + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src_size - 1);
        out[static_cast<std::size_t>(d)] = {lo, hi, static_cast<float>(s - lo)};
    }
    return out;
}

}  // namespace

Raster resize_bilinear(const Raster& src, int width, int height) {
    if (src.width() == width && src.height() == height) return src;
    const auto xs = taps(src.width(), width);
    const auto ys = taps(src.height(), height);
    const std::size_t stride = static_cast<std::size_t>(width) * 3;

    // Horizontal pass per source row on demand, vertical blend of two
    // horizontally resampled rows through the lerp kernel.
    auto horizontal = [&](int y, std::vector<float>& out) {
        const auto in = src.row(y);
        for (int x = 0; x < width; ++x) {
            const Tap& t = xs[static_cast<std::size_t>(x)];
            for (int ch = 0; ch < 3; ++ch) {
                const float a = in[static_cast<std::size_t>(t.lo) * 3 + ch];
                const float b = in[static_cast<std::size_t>(t.hi) * 3 + ch];
                out[static_cast<std::size_t>(x) * 3 + ch] = a + t.t * (b - a);
            }
        }
    };

    std::vector<float> upper(stride), lower(stride), blended(stride);
    int upper_row = -1;
    int lower_row = -1;
    Raster out(width, height);
    for (int y = 0; y < height; ++y) {
        const Tap& t = ys[static_cast<std::size_t>(y)];
        if (upper_row != t.lo) {
            if (lower_row == t.lo) {
                std::swap(upper, lower);
                std::swap(upper_row, lower_row);
            } else {
                horizontal(t.lo, upper);
                upper_row = t.lo;
            }
        }
        if (lower_row != t.hi) {
            horizontal(t.hi, lower);
            lower_row = t.hi;
        }
        kernels::lerp(upper, lower, t.t, blended);
        auto dst = out.row(y);
        for (std::size_t k = 0; k < stride; ++k) {
            dst[k] = static_cast<std::uint8_t>(std::clamp(std::lround(blended[k]), 0L, 255L));
        }
    }
    return out;
}

Raster read_image(const std::filesystem::path& path) {
    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw DataError(DataError::Kind::Io, "cannot decode image " + path.string() + ": " + e.what());
    }
    if (bgr.empty() || bgr.type() != CV_8UC3) {
        throw DataError(DataError::Kind::Io, "cannot decode image " + path.string());
    }
    Raster out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* src = bgr.ptr<std::uint8_t>(y);
        auto dst = out.row(y);
        for (int x = 0; x < bgr.cols; ++x) {
            dst[static_cast<std::size_t>(x) * 3 + 0] = src[x * 3 + 2];
            dst[static_cast<std::size_t>(x) * 3 + 1] = src[x * 3 + 1];
            dst[static_cast<std::size_t>(x) * 3 + 2] = src[x * 3 + 0];
        }
    }
    return out;
}

void write_png(const std::filesystem::path& path, const Raster& image) {
    cv::Mat bgr(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        const auto src = image.row(y);
        auto* dst = bgr.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width(); ++x) {
            dst[x * 3 + 0] = src[static_cast<std::size_t>(x) * 3 + 2];
            dst[x * 3 + 1] = src[static_cast<std::size_t>(x) * 3 + 1];
            dst[x * 3 + 2] = src[static_cast<std::size_t>(x) * 3 + 0];
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), bgr);
    } catch (const cv::Exception& e) {
        throw DataError(DataError::Kind::Io, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
}

}  // namespace reassembly
