// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "t2v/guidance.hpp"
#include "t2v/image.hpp"
#include "t2v/rng.hpp"

namespace t2v {

struct FrameState {
    Image pixels;  // values in [0, 1]
    std::size_t index = 0;
};

struct TemperatureParams {
    double stability_weight = 0.0;
    double warm_start_noise_std = 0.0;
};

/// Linear temperature mapping with configurable slopes.
struct TemperatureMapping {
    double noise_per_degree = 0.004;
    double max_stability_weight = 0.1;
};

/// temperature in [0, 100]: noise std grows linearly from 0, the stability
/// weight falls linearly to 0.
TemperatureParams temperature_to_params(double temperature, const TemperatureMapping& mapping = {});

struct OptimizerParams {
    int iterations_first_frame = 150;
    int iterations_per_frame = 40;
    double step_size = 0.02;
    AugmentationPolicy augmentation;

    void validate() const;
};

/// I.i.d. uniform pixels; index 0.
FrameState init_first_frame(int height, int width, RngStream& rng);

/// clamp(prev + N(0, noise_std^2), 0, 1); index advanced by one.
FrameState warm_start(const FrameState& prev, double noise_std, RngStream& rng);

/// w_c * mean |frame - prev| and its subgradient (0 at exact ties).
GuidanceScore stability_loss(const Image& frame, const Image& prev, double stability_weight);

struct OptimizationResult {
    FrameState frame;
    /// Total loss at each iterate, evaluated on that step's views.
    std::vector<double> loss_trace;
    /// Total loss of the start and end iterates on one shared view set.
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double scorer_seconds = 0.0;
};

/// Projected Adam on text_loss + stability_loss. The stability term is
/// present iff `prev` is given, which must match init.index > 0.
OptimizationResult optimize_frame(const FrameState& init, const FrameState* prev, Scorer& scorer,
                                  std::span<const WeightedPrompt> prompts, const TemperatureParams& temperature,
                                  const OptimizerParams& params, RngStream& rng);

}  // namespace t2v
