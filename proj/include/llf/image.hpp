#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "llf/errors.hpp"

namespace llf {

// Row-major grayscale raster with 64-bit samples. Loaded images live in
// [0,1]; intermediate pipeline images may leave that range, clipping
// happens only at export.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
        if (width < 1 || height < 1)
            throw config_error("image dimensions must be at least 1x1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }

    double& operator()(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double operator()(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(int y) { return data_.data() + static_cast<size_t>(y) * width_; }
    const double* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_; }

    std::span<double> pixels() { return data_; }
    std::span<const double> pixels() const { return data_; }

    bool same_size(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

inline double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double min_value(const Image& img) {
    double m = img.data()[0];
    for (double v : img.pixels()) m = std::min(m, v);
    return m;
}

inline double max_value(const Image& img) {
    double m = img.data()[0];
    for (double v : img.pixels()) m = std::max(m, v);
    return m;
}

}  // namespace llf
