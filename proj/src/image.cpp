// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/image.hpp"

#include <algorithm>
#include <cmath>

#include "t2v/error.hpp"
#include "t2v/resample.hpp"

namespace t2v {

Image::Image(int height, int width, double fill_value) : mHeight(height), mWidth(width) {
    if (height < 0 || width < 0) {
        throw ValidationError("Image: negative dimensions");
    }
    mData.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * kChannels, fill_value);
}

void Image::reshape(int height, int width) {
    if (height < 0 || width < 0) {
        throw ValidationError("Image: negative dimensions");
    }
    mHeight = height;
    mWidth = width;
    mData.resize(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * kChannels);
}

void Image::fill(double value) { std::fill(mData.begin(), mData.end(), value); }

void Image::clamp(double lo, double hi) {
    for (double& v : mData) {
        v = std::clamp(v, lo, hi);
    }
}

bool Image::all_finite() const {
    return std::all_of(mData.begin(), mData.end(), [](double v) { return std::isfinite(v); });
}

bool Image::within(double lo, double hi) const {
    return std::all_of(mData.begin(), mData.end(), [=](double v) { return v >= lo && v <= hi; });
}

double mean_abs_diff(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw ValidationError("mean_abs_diff: shape mismatch");
    }
    if (a.empty()) {
        return 0.0;
    }
    auto av = a.values();
    auto bv = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        sum += std::abs(av[i] - bv[i]);
    }
    return sum / static_cast<double>(av.size());
}

Image resize_bilinear(const Image& src, int height, int width) {
    if (src.empty() || height <= 0 || width <= 0) {
        throw ValidationError("resize_bilinear: degenerate size");
    }
    const ResampleOp op{
        make_axis_taps(src.height(), 0.0, src.height(), height),
        make_axis_taps(src.width(), 0.0, src.width(), width),
    };
    return op.apply(src);
}

}  // namespace t2v
