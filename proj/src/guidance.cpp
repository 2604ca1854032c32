// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "t2v/error.hpp"

namespace t2v {

namespace {

struct Workspace {
    std::vector<Image> views;
    std::vector<Image> gradients;
    std::vector<double> scratch;
};

void check_prompts(const Scorer& scorer, std::span<const WeightedPrompt> prompts) {
    if (prompts.empty()) {
        throw ValidationError("text_loss: no weighted prompts");
    }
    for (const auto& p : prompts) {
        if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
            throw ValidationError("text_loss: prompt weights must be positive and finite");
        }
        if (p.embedding.vector.size() != scorer.embedding_dim()) {
            throw ValidationError("text_loss: embedding dimension does not match scorer");
        }
    }
}

std::size_t batch_size(const Scorer& scorer, std::size_t views) {
    return scorer.preferred_batch() == 0 ? views : std::min(scorer.preferred_batch(), views);
}

}  // namespace

std::vector<double> Scorer::score_values(std::span<const Image> views, std::span<const WeightedPrompt> prompts) {
    std::vector<Image> unused(views.size());
    return score_views(views, prompts, unused);
}

void AugmentationPolicy::validate() const {
    if (views_per_step < 1) {
        throw ValidationError("augmentation: views_per_step must be >= 1");
    }
    if (!(crop_scale_low > 0.0 && crop_scale_low <= crop_scale_high && crop_scale_high <= 1.0)) {
        throw ValidationError("augmentation: crop scale range must satisfy 0 < low <= high <= 1");
    }
    if (scorer_input_size < 32) {
        throw ValidationError("augmentation: scorer_input_size must be >= 32");
    }
}

TextEmbedding embed_text(Scorer& scorer, std::string_view prompt) {
    if (prompt.empty()) {
        throw ValidationError("embed_text: empty prompt");
    }
    TextEmbedding e = scorer.embed_text(prompt);
    double norm2 = 0.0;
    for (double v : e.vector) norm2 += v * v;
    if (e.vector.size() != scorer.embedding_dim() || std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
        throw AdapterError("scorer returned a text embedding that is not unit-norm of the advertised dimension");
    }
    return e;
}

std::vector<ViewSample> sample_views(int height, int width, const AugmentationPolicy& policy, RngStream& rng) {
    policy.validate();
    if (height < 8 || width < 8) {
        throw ValidationError("augment_views: frame must be at least 8x8");
    }
    const double shorter = static_cast<double>(std::min(height, width));
    const int size = policy.scorer_input_size;
    std::vector<ViewSample> views;
    views.reserve(static_cast<std::size_t>(policy.views_per_step));
    for (int v = 0; v < policy.views_per_step; ++v) {
        ViewSample s;
        s.side = shorter * rng.uniform(policy.crop_scale_low, policy.crop_scale_high);
        s.top = rng.uniform() * (static_cast<double>(height) - s.side);
        s.left = rng.uniform() * (static_cast<double>(width) - s.side);
        s.op.rows = make_axis_taps(height, s.top, s.side, size);
        s.op.cols = make_axis_taps(width, s.left, s.side, size);
        views.push_back(std::move(s));
    }
    return views;
}

std::vector<Image> augment_views(const Image& frame, const AugmentationPolicy& policy, RngStream& rng) {
    const auto samples = sample_views(frame.height(), frame.width(), policy, rng);
    std::vector<Image> views;
    views.reserve(samples.size());
    for (const auto& s : samples) {
        views.push_back(s.op.apply(frame));
    }
    return views;
}

GuidanceScore text_loss(Scorer& scorer, const Image& frame, std::span<const WeightedPrompt> prompts,
                        const AugmentationPolicy& policy, RngStream& rng) {
    check_prompts(scorer, prompts);
    const auto samples = sample_views(frame.height(), frame.width(), policy, rng);

    // View and gradient buffers are large and identically shaped from one
    // call to the next; keep them per thread, and score in the batch size
    // the scorer prefers so in-process scorers work on cache-resident views.
    thread_local Workspace ws;
    const std::size_t batch = batch_size(scorer, samples.size());
    ws.views.resize(batch);
    ws.gradients.resize(batch);

    GuidanceScore out;
    out.gradient = Image(frame.height(), frame.width());
    for (std::size_t first = 0; first < samples.size(); first += batch) {
        const std::size_t count = std::min(batch, samples.size() - first);
        for (std::size_t k = 0; k < count; ++k) {
            samples[first + k].op.apply_into(frame, ws.views[k], ws.scratch);
        }
        const auto values = scorer.score_views(std::span<const Image>(ws.views.data(), count), prompts,
                                               std::span<Image>(ws.gradients.data(), count));
        if (values.size() != count) {
            throw AdapterError("scorer returned the wrong number of view scores");
        }
        for (std::size_t k = 0; k < count; ++k) {
            if (!ws.gradients[k].same_shape(ws.views[k])) {
                throw AdapterError("scorer returned a gradient of the wrong shape");
            }
            out.value += values[k];
            samples[first + k].op.accumulate_adjoint(ws.gradients[k], out.gradient, ws.scratch);
        }
    }
    const double inv_views = 1.0 / static_cast<double>(samples.size());
    out.value *= inv_views;
    for (double& g : out.gradient.values()) g *= inv_views;

    if (!std::isfinite(out.value) || !out.gradient.all_finite()) {
        throw NumericError("text_loss: non-finite loss or gradient");
    }
    return out;
}

double text_loss_value(Scorer& scorer, const Image& frame, std::span<const WeightedPrompt> prompts,
                       const AugmentationPolicy& policy, RngStream& rng) {
    check_prompts(scorer, prompts);
    const auto samples = sample_views(frame.height(), frame.width(), policy, rng);
    thread_local Workspace ws;
    const std::size_t batch = batch_size(scorer, samples.size());
    ws.views.resize(batch);

    double value = 0.0;
    for (std::size_t first = 0; first < samples.size(); first += batch) {
        const std::size_t count = std::min(batch, samples.size() - first);
        for (std::size_t k = 0; k < count; ++k) {
            samples[first + k].op.apply_into(frame, ws.views[k], ws.scratch);
        }
        const auto values = scorer.score_values(std::span<const Image>(ws.views.data(), count), prompts);
        if (values.size() != count) {
            throw AdapterError("scorer returned the wrong number of view scores");
        }
        for (double v : values) value += v;
    }
    value *= 1.0 / static_cast<double>(samples.size());
    if (!std::isfinite(value)) {
        throw NumericError("text_loss: non-finite loss");
    }
    return value;
}

}  // namespace t2v
