// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Text-alignment guidance: a frame is cut into random square crops, each
// crop is resized to the scorer's input size, and the weighted cosine
// distance between the crop embeddings and the prompt embeddings is
// averaged over crops. The gradient flows back through the scorer and the
// crop/resize operators onto the frame's pixels.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t2v/image.hpp"
#include "t2v/resample.hpp"
#include "t2v/rng.hpp"

namespace t2v {

struct TextEmbedding {
    std::vector<double> vector;  // unit L2 norm
    std::string source_text;
};

struct WeightedPrompt {
    TextEmbedding embedding;
    double weight = 0.0;
};

struct AugmentationPolicy {
    int views_per_step = 16;
    double crop_scale_low = 0.7;   // fraction of the frame's shorter side
    double crop_scale_high = 0.95;
    int scorer_input_size = 224;

    void validate() const;
};

/// Scalar loss plus its gradient with respect to every frame pixel.
struct GuidanceScore {
    double value = 0.0;
    Image gradient;
};

enum class ScorerKind { surrogate, external };

/// Image-text encoder used for guidance. Implementations must be
/// deterministic; they may keep mutable adapter state, so a single
/// instance is used from one thread at a time.
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual ScorerKind kind() const = 0;
    virtual std::size_t embedding_dim() const = 0;
    virtual std::string describe() const = 0;
    /// Views per score_views call; 0 means the whole step at once.
    virtual std::size_t preferred_batch() const { return 0; }

    /// Unit-norm embedding of a prompt.
    virtual TextEmbedding embed_text(std::string_view prompt) = 0;
    /// Unit-norm embedding of each image.
    virtual std::vector<std::vector<double>> embed_images(std::span<const Image> images) = 0;

    /// Returns sum_i w_i * (1 - cos(E(view), e_i)) for every view and writes
    /// its derivative with respect to the view pixels into the matching
    /// entry of `gradients` (reshaped as needed).
    virtual std::vector<double> score_views(std::span<const Image> views, std::span<const WeightedPrompt> prompts,
                                            std::span<Image> gradients) = 0;
    /// score_views without the gradients. The default delegates.
    virtual std::vector<double> score_values(std::span<const Image> views, std::span<const WeightedPrompt> prompts);
};

using ScorerHandle = std::unique_ptr<Scorer>;

/// Validates the prompt and the returned embedding's norm.
TextEmbedding embed_text(Scorer& scorer, std::string_view prompt);

/// One random resized crop, expressed as the linear operator that produces it.
struct ViewSample {
    double top = 0.0;
    double left = 0.0;
    double side = 0.0;
    ResampleOp op;
};

/// Draws the crops of one step. Consumes exactly three uniforms per view
/// (side, top, left) from `rng`.
std::vector<ViewSample> sample_views(int height, int width, const AugmentationPolicy& policy, RngStream& rng);

std::vector<Image> augment_views(const Image& frame, const AugmentationPolicy& policy, RngStream& rng);

/// value = sum_i w_i * mean_views (1 - cos(E(view), e_i)), with its exact
/// pixel gradient. Only prompts with positive weight may be passed.
GuidanceScore text_loss(Scorer& scorer, const Image& frame, std::span<const WeightedPrompt> prompts,
                        const AugmentationPolicy& policy, RngStream& rng);

/// text_loss(...).value without the backward pass; same views, same value.
double text_loss_value(Scorer& scorer, const Image& frame, std::span<const WeightedPrompt> prompts,
                       const AugmentationPolicy& policy, RngStream& rng);

/// Deterministic differentiable stand-in for a pretrained encoder. Images
/// are average-pooled to an 8x8 luminance grid and mapped through a seeded
/// random affine map; prompts map to seeded pseudorandom unit vectors.
ScorerHandle make_surrogate_scorer(std::uint64_t seed, std::size_t embedding_dim = 64);

struct ExternalScorerConfig {
    std::string weights_path;
    std::string device = "cpu";
    /// Adapter command line; the first entry is resolved via PATH.
    std::vector<std::string> command;
};

/// Launches the adapter process and performs the handshake. Throws
/// ConfigError when weights are missing, the device hint is unsupported or
/// the adapter refuses the configuration.
ScorerHandle make_external_scorer(const ExternalScorerConfig& config);

/// Device hints understood by the adapters: cpu, auto, cuda, cuda:<n>, mps.
bool is_supported_device(std::string_view device);

/// Default command for the bundled CLIP adapter script.
std::vector<std::string> default_clip_adapter_command();

}  // namespace t2v
