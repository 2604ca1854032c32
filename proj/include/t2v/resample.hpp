// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "t2v/image.hpp"

namespace t2v {

/// Two-tap linear interpolation weights along one axis.
struct AxisTaps {
    struct Tap {
        int i0;
        int i1;
        double w0;
        double w1;
    };
    std::vector<Tap> taps;  // one per output sample
    int source_length = 0;
    int min_source = 0;
    int max_source = 0;
};

/// Samples `out_len` points over the source window [start, start + extent)
/// with half-pixel centers. Coordinates outside the source clamp to the edge.
AxisTaps make_axis_taps(int source_length, double start, double extent, int out_len);

/// Separable bilinear crop-and-resize. Linear in the input, so the adjoint
/// is the exact gradient of anything computed from the output.
struct ResampleOp {
    AxisTaps rows;
    AxisTaps cols;

    int out_height() const noexcept { return static_cast<int>(rows.taps.size()); }
    int out_width() const noexcept { return static_cast<int>(cols.taps.size()); }

    Image apply(const Image& src) const;
    /// Writes A src into `out` (reshaped as needed); `scratch` is reused storage.
    void apply_into(const Image& src, Image& out, std::vector<double>& scratch) const;

    /// in_grad += A^T out_grad, where A is this operator.
    void accumulate_adjoint(const Image& out_grad, Image& in_grad) const;
    void accumulate_adjoint(const Image& out_grad, Image& in_grad, std::vector<double>& scratch) const;
};

}  // namespace t2v
