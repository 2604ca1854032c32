// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace t2v {

/// Row-major, channel-interleaved RGB grid of doubles.
class Image {
public:
    static constexpr int kChannels = 3;

    Image() = default;
    Image(int height, int width, double fill = 0.0);

    int height() const noexcept { return mHeight; }
    int width() const noexcept { return mWidth; }
    std::size_t size() const noexcept { return mData.size(); }
    bool empty() const noexcept { return mData.empty(); }

    double& at(int y, int x, int c) { return mData[index(y, x, c)]; }
    double at(int y, int x, int c) const { return mData[index(y, x, c)]; }

    std::span<double> values() noexcept { return mData; }
    std::span<const double> values() const noexcept { return mData; }
    double* row(int y) noexcept { return mData.data() + index(y, 0, 0); }
    const double* row(int y) const noexcept { return mData.data() + index(y, 0, 0); }

    bool same_shape(const Image& other) const noexcept {
        return mHeight == other.mHeight && mWidth == other.mWidth;
    }

    /// Changes the shape, reusing storage. Contents are unspecified.
    void reshape(int height, int width);

    void fill(double value);
    void clamp(double lo = 0.0, double hi = 1.0);
    bool all_finite() const;
    bool within(double lo, double hi) const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int y, int x, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(mWidth) + static_cast<std::size_t>(x)) *
                   kChannels +
               static_cast<std::size_t>(c);
    }

    int mHeight = 0;
    int mWidth = 0;
    std::vector<double> mData;
};

/// Mean absolute elementwise difference. Shapes must match.
double mean_abs_diff(const Image& a, const Image& b);

/// Bilinear resize with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& src, int height, int width);

}  // namespace t2v
