// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/frame_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "t2v/error.hpp"

namespace t2v {

TemperatureParams temperature_to_params(double temperature, const TemperatureMapping& mapping) {
    if (!(temperature >= 0.0 && temperature <= 100.0)) {
        throw ValidationError("temperature must lie in [0, 100], got " + std::to_string(temperature));
    }
    if (!(mapping.noise_per_degree >= 0.0) || !(mapping.max_stability_weight >= 0.0) ||
        !std::isfinite(mapping.noise_per_degree) || !std::isfinite(mapping.max_stability_weight)) {
        throw ValidationError("temperature mapping constants must be finite and nonnegative");
    }
    return TemperatureParams{
        mapping.max_stability_weight * (1.0 - temperature / 100.0),
        mapping.noise_per_degree * temperature,
    };
}

void OptimizerParams::validate() const {
    if (iterations_first_frame < 0 || iterations_per_frame < 0) {
        throw ValidationError("optimizer: iteration counts must be >= 0");
    }
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw ValidationError("optimizer: step_size must be > 0");
    }
    augmentation.validate();
}

FrameState init_first_frame(int height, int width, RngStream& rng) {
    if (height <= 0 || width <= 0) {
        throw ValidationError("init_first_frame: dimensions must be positive");
    }
    FrameState frame{Image(height, width), 0};
    for (double& v : frame.pixels.values()) v = rng.uniform();
    return frame;
}

FrameState warm_start(const FrameState& prev, double noise_std, RngStream& rng) {
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw ValidationError("warm_start: noise std must be finite and >= 0");
    }
    FrameState next{prev.pixels, prev.index + 1};
    if (noise_std > 0.0) {
        for (double& v : next.pixels.values()) v = std::clamp(v + noise_std * rng.normal(), 0.0, 1.0);
    }
    return next;
}

GuidanceScore stability_loss(const Image& frame, const Image& prev, double stability_weight) {
    if (!frame.same_shape(prev)) {
        throw ValidationError("stability_loss: frame and predecessor shapes differ");
    }
    GuidanceScore out;
    out.gradient = Image(frame.height(), frame.width());
    if (frame.empty()) {
        return out;
    }
    auto f = frame.values();
    auto p = prev.values();
    auto g = out.gradient.values();
    const double n = static_cast<double>(f.size());
    const double step = stability_weight / n;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - p[i];
        sum += std::abs(d);
        g[i] = d > 0.0 ? step : (d < 0.0 ? -step : 0.0);
    }
    out.value = stability_weight * sum / n;
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

class Objective {
public:
    Objective(Scorer& scorer, std::span<const WeightedPrompt> prompts, const FrameState* prev,
              double stability_weight, const AugmentationPolicy& policy)
        : mScorer(scorer), mPrompts(prompts), mPrev(prev), mWeight(stability_weight), mPolicy(policy) {}

    GuidanceScore evaluate(const Image& pixels, RngStream& rng) {
        const auto start = Clock::now();
        GuidanceScore total = text_loss(mScorer, pixels, mPrompts, mPolicy, rng);
        mScorerSeconds += std::chrono::duration<double>(Clock::now() - start).count();
        if (mPrev != nullptr) {
            const GuidanceScore stable = stability_loss(pixels, mPrev->pixels, mWeight);
            total.value += stable.value;
            auto g = total.gradient.values();
            auto s = stable.gradient.values();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += s[i];
        }
        return total;
    }

    double value(const Image& pixels, RngStream& rng) {
        const auto start = Clock::now();
        double total = text_loss_value(mScorer, pixels, mPrompts, mPolicy, rng);
        mScorerSeconds += std::chrono::duration<double>(Clock::now() - start).count();
        if (mPrev != nullptr) {
            total += stability_loss(pixels, mPrev->pixels, mWeight).value;
        }
        return total;
    }

    double scorer_seconds() const { return mScorerSeconds; }

private:
    Scorer& mScorer;
    std::span<const WeightedPrompt> mPrompts;
    const FrameState* mPrev;
    double mWeight;
    const AugmentationPolicy& mPolicy;
    double mScorerSeconds = 0.0;
};

}  // namespace

OptimizationResult optimize_frame(const FrameState& init, const FrameState* prev, Scorer& scorer,
                                  std::span<const WeightedPrompt> prompts, const TemperatureParams& temperature,
                                  const OptimizerParams& params, RngStream& rng) {
    params.validate();
    if ((prev != nullptr) != (init.index > 0)) {
        throw ValidationError("optimize_frame: a predecessor is required exactly when frame index > 0");
    }
    if (prev != nullptr && !prev->pixels.same_shape(init.pixels)) {
        throw ValidationError("optimize_frame: predecessor shape differs from frame");
    }
    if (!init.pixels.all_finite()) {
        throw ValidationError("optimize_frame: initial frame is not finite");
    }

    const int iterations = init.index == 0 ? params.iterations_first_frame : params.iterations_per_frame;
    Objective objective(scorer, prompts, prev, temperature.stability_weight, params.augmentation);
    const std::uint64_t eval_seed = rng.next_u64();

    OptimizationResult result;
    result.frame = init;
    result.frame.pixels.clamp();
    result.loss_trace.reserve(static_cast<std::size_t>(iterations));

    auto paired_eval = [&](int iteration) {
        RngStream eval_rng(eval_seed);
        try {
            return objective.value(result.frame.pixels, eval_rng);
        } catch (const NumericError& e) {
            throw NumericError(e.what(), iteration);
        }
    };
    result.initial_loss = paired_eval(0);

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    std::vector<double> m(init.pixels.size(), 0.0);
    std::vector<double> v(init.pixels.size(), 0.0);
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;

    for (int it = 0; it < iterations; ++it) {
        GuidanceScore score;
        try {
            score = objective.evaluate(result.frame.pixels, rng);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(it), it);
        }
        if (!std::isfinite(score.value)) {
            throw NumericError("optimize_frame: non-finite loss at iteration " + std::to_string(it), it);
        }
        result.loss_trace.push_back(score.value);

        beta1_pow *= kBeta1;
        beta2_pow *= kBeta2;
        const double step = params.step_size * std::sqrt(1.0 - beta2_pow) / (1.0 - beta1_pow);
        auto x = result.frame.pixels.values();
        auto g = score.gradient.values();
        for (std::size_t i = 0; i < x.size(); ++i) {
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
            x[i] = std::clamp(x[i] - step * m[i] / (std::sqrt(v[i]) + kEps), 0.0, 1.0);
        }
    }

    result.final_loss = paired_eval(iterations);
    result.scorer_seconds = objective.scorer_seconds();
    return result;
}

}  // namespace t2v
