// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Runs the bundled torch adapters against the tiny random models written
// by tools/adapters/testing/make_tiny_models.py. Registered only when the
// configure step finds torch and transformers.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "t2v/frame_optimizer.hpp"
#include "t2v/guidance.hpp"
#include "t2v/postprocess.hpp"

using namespace t2v;
namespace fs = std::filesystem;

namespace {

fs::path models() {
    const char* dir = std::getenv("T2V_TINY_MODELS");
    REQUIRE_MESSAGE(dir != nullptr, "T2V_TINY_MODELS must point at the generated models");
    return dir;
}

ScorerHandle& clip() {
    static ScorerHandle scorer = make_external_scorer({(models() / "tiny-clip").string(), "cpu", {}});
    return scorer;
}

}  // namespace

TEST_CASE("clip adapter embeddings are unit norm and prompt-specific") {
    auto& s = *clip();
    CHECK(s.embedding_dim() == 16);
    const auto a = embed_text(s, "a cat swimming in the ocean");
    const auto b = embed_text(s, "a koala playing the piano on mars");
    CHECK(a.vector != b.vector);
    CHECK(embed_text(s, "a cat swimming in the ocean").vector == a.vector);
    const Image img = testing::random_image(40, 48, 1);
    const auto e = s.embed_images({&img, 1}).front();
    double n2 = 0.0;
    for (double v : e) n2 += v * v;
    CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("clip adapter gradient agrees with a directional finite difference") {
    auto& s = *clip();
    const std::vector<WeightedPrompt> prompts{{embed_text(s, "a dog"), 0.75}, {embed_text(s, "a cat"), 0.25}};
    AugmentationPolicy policy;
    policy.views_per_step = 3;
    policy.scorer_input_size = 48;  // the adapter resizes to the model's 32
    const Image x = testing::random_image(36, 36, 2, 0.2, 0.8);
    RngStream rng(4);
    const auto g = text_loss(s, x, prompts, policy, rng);

    std::mt19937 gen(5);
    std::normal_distribution<double> normal;
    Image dir(x.height(), x.width());
    for (double& v : dir.values()) v = normal(gen);
    const double h = 1e-2;
    auto at = [&](double t) {
        Image y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y.values()[i] += t * dir.values()[i];
        RngStream r(4);
        return text_loss_value(s, y, prompts, policy, r);
    };
    const double numeric = (at(h) - at(-h)) / (2.0 * h);
    double analytic = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) analytic += g.gradient.values()[i] * dir.values()[i];
    // float32 inside the model bounds the agreement.
    CHECK(analytic == doctest::Approx(numeric).epsilon(2e-2));
}

TEST_CASE("optimizing against the clip adapter lowers the alignment loss") {
    auto& s = *clip();
    const std::vector<WeightedPrompt> prompts{{embed_text(s, "a cat swimming in the ocean"), 1.0}};
    OptimizerParams params;
    params.iterations_first_frame = 25;
    params.augmentation.views_per_step = 4;
    params.augmentation.scorer_input_size = 32;
    RngStream init(1);
    RngStream opt(2);
    const auto r = optimize_frame(init_first_frame(48, 48, init), nullptr, s, prompts, temperature_to_params(50.0),
                                  params, opt);
    CHECK(r.final_loss < r.initial_loss);
}

TEST_CASE("torchscript denoiser adapter keeps odd shapes and the unit range") {
    auto d = make_external_denoiser({(models() / "tiny-denoiser.pt").string(), "cpu", {}});
    const Image x = testing::random_image(37, 51, 3);
    const Image y = denoise(*d, x);
    CHECK(y.same_shape(x));
    CHECK(y.within(0.0, 1.0));
    CHECK(mean_abs_diff(x, y) > 0.0);
    CHECK(denoise(*d, x) == y);
}
