// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "t2v/image.hpp"

namespace t2v {

enum class DenoiserKind { identity, external };

/// Image-to-image translator applied to finished raw frames.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual DenoiserKind kind() const = 0;
    virtual std::string describe() const = 0;
    virtual std::string expected_input_note() const = 0;

    /// Raw adapter call; use t2v::denoise for the checked, clamped form.
    virtual std::vector<Image> denoise_batch(std::span<const Image> frames) = 0;
};

using DenoiserHandle = std::unique_ptr<Denoiser>;

DenoiserHandle make_identity_denoiser();

struct ExternalDenoiserConfig {
    std::string weights_path;
    std::string device = "cpu";
    std::vector<std::string> command;
};

/// Throws ConfigError for missing weights, unsupported devices or an
/// adapter that rejects the weights during the handshake.
DenoiserHandle make_external_denoiser(const ExternalDenoiserConfig& config);

std::vector<std::string> default_denoiser_adapter_command();

/// Denoises a copy of `frame`; output has the input's shape and lies in [0, 1].
Image denoise(Denoiser& denoiser, const Image& frame);

/// Bilinear resize to `target_height` (aspect preserved) then denoise.
/// The result stays at the target resolution.
Image denoise_at_resolution(Denoiser& denoiser, const Image& frame, int target_height);

}  // namespace t2v
