// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/resample.hpp"

#include <algorithm>
#include <cmath>

#include "t2v/error.hpp"

namespace t2v {

AxisTaps make_axis_taps(int source_length, double start, double extent, int out_len) {
    if (source_length <= 0 || out_len <= 0 || !(extent > 0.0)) {
        throw ValidationError("make_axis_taps: degenerate axis");
    }
    AxisTaps axis;
    axis.source_length = source_length;
    axis.taps.reserve(static_cast<std::size_t>(out_len));
    axis.min_source = source_length - 1;
    axis.max_source = 0;
    const double scale = extent / static_cast<double>(out_len);
    const double last = static_cast<double>(source_length - 1);
    for (int o = 0; o < out_len; ++o) {
        const double s = std::clamp(start + (static_cast<double>(o) + 0.5) * scale - 0.5, 0.0, last);
        const int i0 = std::min(static_cast<int>(std::floor(s)), source_length - 1);
        const int i1 = std::min(i0 + 1, source_length - 1);
        const double f = s - static_cast<double>(i0);
        axis.taps.push_back({i0, i1, 1.0 - f, f});
        axis.min_source = std::min(axis.min_source, i0);
        axis.max_source = std::max(axis.max_source, i1);
    }
    return axis;
}

Image ResampleOp::apply(const Image& src) const {
    Image out;
    std::vector<double> scratch;
    apply_into(src, out, scratch);
    return out;
}

void ResampleOp::accumulate_adjoint(const Image& out_grad, Image& in_grad) const {
    std::vector<double> scratch;
    accumulate_adjoint(out_grad, in_grad, scratch);
}

void ResampleOp::apply_into(const Image& src, Image& out, std::vector<double>& tmp) const {
    if (src.height() != rows.source_length || src.width() != cols.source_length) {
        throw ValidationError("ResampleOp::apply: source shape mismatch");
    }
    constexpr int C = Image::kChannels;
    const int out_h = out_height();
    const int out_w = out_width();
    const int band = rows.max_source - rows.min_source + 1;
    const std::size_t tmp_stride = static_cast<std::size_t>(out_w) * C;

    // Horizontal pass over the source rows the crop touches.
    tmp.resize(static_cast<std::size_t>(band) * tmp_stride);
    for (int r = 0; r < band; ++r) {
        const double* in = src.row(rows.min_source + r);
        double* t = tmp.data() + static_cast<std::size_t>(r) * tmp_stride;
        for (int ox = 0; ox < out_w; ++ox) {
            const auto& tap = cols.taps[static_cast<std::size_t>(ox)];
            const double* p0 = in + static_cast<std::size_t>(tap.i0) * C;
            const double* p1 = in + static_cast<std::size_t>(tap.i1) * C;
            for (int c = 0; c < C; ++c) {
                t[ox * C + c] = tap.w0 * p0[c] + tap.w1 * p1[c];
            }
        }
    }

    out.reshape(out_h, out_w);
    for (int oy = 0; oy < out_h; ++oy) {
        const auto& tap = rows.taps[static_cast<std::size_t>(oy)];
        const double* t0 = tmp.data() + static_cast<std::size_t>(tap.i0 - rows.min_source) * tmp_stride;
        const double* t1 = tmp.data() + static_cast<std::size_t>(tap.i1 - rows.min_source) * tmp_stride;
        double* o = out.row(oy);
        for (std::size_t k = 0; k < tmp_stride; ++k) {
            o[k] = tap.w0 * t0[k] + tap.w1 * t1[k];
        }
    }
}

void ResampleOp::accumulate_adjoint(const Image& out_grad, Image& in_grad, std::vector<double>& tmp) const {
    if (out_grad.height() != out_height() || out_grad.width() != out_width()) {
        throw ValidationError("ResampleOp::accumulate_adjoint: gradient shape mismatch");
    }
    if (in_grad.height() != rows.source_length || in_grad.width() != cols.source_length) {
        throw ValidationError("ResampleOp::accumulate_adjoint: source shape mismatch");
    }
    constexpr int C = Image::kChannels;
    const int out_h = out_height();
    const int out_w = out_width();
    const int band = rows.max_source - rows.min_source + 1;
    const std::size_t tmp_stride = static_cast<std::size_t>(out_w) * C;

    tmp.assign(static_cast<std::size_t>(band) * tmp_stride, 0.0);
    for (int oy = 0; oy < out_h; ++oy) {
        const auto& tap = rows.taps[static_cast<std::size_t>(oy)];
        double* t0 = tmp.data() + static_cast<std::size_t>(tap.i0 - rows.min_source) * tmp_stride;
        double* t1 = tmp.data() + static_cast<std::size_t>(tap.i1 - rows.min_source) * tmp_stride;
        const double* g = out_grad.row(oy);
        for (std::size_t k = 0; k < tmp_stride; ++k) {
            t0[k] += tap.w0 * g[k];
            t1[k] += tap.w1 * g[k];
        }
    }

    for (int r = 0; r < band; ++r) {
        double* dst = in_grad.row(rows.min_source + r);
        const double* t = tmp.data() + static_cast<std::size_t>(r) * tmp_stride;
        for (int ox = 0; ox < out_w; ++ox) {
            const auto& tap = cols.taps[static_cast<std::size_t>(ox)];
            double* p0 = dst + static_cast<std::size_t>(tap.i0) * C;
            double* p1 = dst + static_cast<std::size_t>(tap.i1) * C;
            for (int c = 0; c < C; ++c) {
                p0[c] += tap.w0 * t[ox * C + c];
                p1[c] += tap.w1 * t[ox * C + c];
            }
        }
    }
}

}  // namespace t2v
