// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "t2v/error.hpp"
#include "t2v/guidance.hpp"

using namespace t2v;
using t2v::testing::finite_difference;
using t2v::testing::random_image;
using t2v::testing::relative_error;

namespace {

double norm(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

/// Direct per-pixel bilinear sample with half-pixel centers and edge clamp.
double bilinear_reference(const Image& src, double top, double left, double side, int size, int oy, int ox, int c) {
    auto coord = [&](double start, int o, int len) {
        const double s = start + (o + 0.5) * side / size - 0.5;
        return std::clamp(s, 0.0, static_cast<double>(len - 1));
    };
    const double sy = coord(top, oy, src.height());
    const double sx = coord(left, ox, src.width());
    const int y0 = static_cast<int>(std::floor(sy));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const int x1 = std::min(x0 + 1, src.width() - 1);
    const double fy = sy - y0;
    const double fx = sx - x0;
    return (1 - fy) * ((1 - fx) * src.at(y0, x0, c) + fx * src.at(y0, x1, c)) +
           fy * ((1 - fx) * src.at(y1, x0, c) + fx * src.at(y1, x1, c));
}

AugmentationPolicy small_policy(int views = 4) {
    AugmentationPolicy p;
    p.views_per_step = views;
    p.scorer_input_size = 32;
    return p;
}

}  // namespace

TEST_CASE("surrogate text embeddings are deterministic, unit norm and prompt-specific") {
    auto scorer = make_surrogate_scorer(3);
    const auto a = embed_text(*scorer, "a dog");
    const auto b = embed_text(*scorer, "a dog");
    const auto c = embed_text(*scorer, "a cat");
    CHECK(a.vector == b.vector);
    CHECK(norm(a.vector) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm(c.vector) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(a.vector != c.vector);
    CHECK(a.source_text == "a dog");
    CHECK_THROWS_AS(embed_text(*scorer, ""), ValidationError);
}

TEST_CASE("surrogate scorer construction") {
    CHECK_THROWS_AS(make_surrogate_scorer(0, 7), ValidationError);
    auto s = make_surrogate_scorer(0, 8);
    CHECK(s->embedding_dim() == 8);
    CHECK(s->kind() == ScorerKind::surrogate);
}

TEST_CASE("surrogate image embeddings") {
    auto s1 = make_surrogate_scorer(11);
    auto s2 = make_surrogate_scorer(11);
    const Image img = random_image(40, 40, 5);
    CHECK(s1->embed_images({&img, 1}) == s2->embed_images({&img, 1}));

    SUBCASE("gray and white differ") {
        const Image gray(32, 32, 0.5);
        const Image white(32, 32, 1.0);
        const auto e = s1->embed_images(std::vector<Image>{gray, white});
        CHECK(norm(e[0]) == doctest::Approx(1.0));
        double diff = 0.0;
        for (std::size_t k = 0; k < e[0].size(); ++k) diff += std::abs(e[0][k] - e[1][k]);
        CHECK(diff > 1e-3);
    }

    SUBCASE("embedding depends only on the pooled 8x8 luminance") {
        // Swap two pixels inside one 4x4 pooling cell of a 32x32 image and
        // trade red for green at fixed luminance: the embedding must not move.
        Image a = random_image(32, 32, 9, 0.2, 0.8);
        Image b = a;
        for (int c = 0; c < 3; ++c) std::swap(b.at(0, 0, c), b.at(3, 2, c));
        const double dr = 0.05;
        b.at(10, 10, 0) += dr;
        b.at(10, 10, 1) -= dr * 0.299 / 0.587;
        const auto e = s1->embed_images(std::vector<Image>{a, b});
        for (std::size_t k = 0; k < e[0].size(); ++k) CHECK(e[0][k] == doctest::Approx(e[1][k]).epsilon(1e-12));
    }
}

TEST_CASE("augment_views produces scorer-sized crops") {
    const Image frame = random_image(64, 64, 1);
    AugmentationPolicy policy;  // 16 views at 224
    RngStream rng(42);
    const auto views = augment_views(frame, policy, rng);
    REQUIRE(views.size() == 16);
    for (const auto& v : views) {
        CHECK(v.height() == 224);
        CHECK(v.width() == 224);
        CHECK(v.within(0.0, 1.0));
    }

    RngStream again(42);
    CHECK(augment_views(frame, policy, again) == views);
}

TEST_CASE("augment_views with a full-frame crop range resizes the whole frame") {
    const Image frame = random_image(48, 48, 2);
    AugmentationPolicy policy = small_policy(3);
    policy.crop_scale_low = policy.crop_scale_high = 1.0;
    RngStream rng(1);
    const Image whole = resize_bilinear(frame, 32, 32);
    for (const auto& v : augment_views(frame, policy, rng)) {
        CHECK(v == whole);
    }
}

TEST_CASE("crop/resize matches a per-pixel bilinear reference on non-square frames") {
    const Image frame = random_image(30, 50, 3);
    RngStream rng(77);
    const AugmentationPolicy policy = small_policy(5);
    const auto samples = sample_views(frame.height(), frame.width(), policy, rng);
    for (const auto& s : samples) {
        CHECK(s.side <= 30.0 * 0.95 + 1e-12);
        CHECK(s.side >= 30.0 * 0.7 - 1e-12);
        CHECK(s.top + s.side <= 30.0 + 1e-9);
        CHECK(s.left + s.side <= 50.0 + 1e-9);
        const Image view = s.op.apply(frame);
        for (int y = 0; y < 32; y += 3)
            for (int x = 0; x < 32; x += 5)
                for (int c = 0; c < 3; ++c)
                    CHECK(view.at(y, x, c) ==
                          doctest::Approx(bilinear_reference(frame, s.top, s.left, s.side, 32, y, x, c)).epsilon(1e-12));
    }
}

TEST_CASE("resample adjoint passes the dot-product test") {
    const Image x = random_image(20, 28, 4);
    RngStream rng(5);
    const auto samples = sample_views(20, 28, small_policy(2), rng);
    for (const auto& s : samples) {
        const Image y = random_image(32, 32, 6, -1.0, 1.0);
        const Image ax = s.op.apply(x);
        Image aty(20, 28);
        s.op.accumulate_adjoint(y, aty);
        double lhs = 0.0;
        double rhs = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) lhs += ax.values()[i] * y.values()[i];
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x.values()[i] * aty.values()[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("augment_views rejects tiny frames and bad policies") {
    RngStream rng(0);
    CHECK_THROWS_AS(augment_views(Image(7, 20), AugmentationPolicy{}, rng), ValidationError);
    AugmentationPolicy bad;
    bad.scorer_input_size = 16;
    CHECK_THROWS_AS(augment_views(Image(16, 16), bad, rng), ValidationError);
    bad = AugmentationPolicy{};
    bad.crop_scale_low = 0.9;
    bad.crop_scale_high = 0.8;
    CHECK_THROWS_AS(augment_views(Image(16, 16), bad, rng), ValidationError);
}

TEST_CASE("text_loss per-view contributions at the cosine extremes") {
    auto scorer = make_surrogate_scorer(8);
    const Image frame(40, 40, 0.3);
    AugmentationPolicy policy = small_policy(4);
    policy.crop_scale_low = policy.crop_scale_high = 1.0;

    const Image view = resize_bilinear(frame, 32, 32);
    const auto e = scorer->embed_images({&view, 1}).front();

    SUBCASE("identical embedding contributes 0") {
        const WeightedPrompt p{{e, "self"}, 1.0};
        RngStream rng(1);
        CHECK(text_loss(*scorer, frame, {&p, 1}, policy, rng).value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("orthogonal embedding contributes its weight") {
        std::vector<double> o(e.size());
        for (std::size_t k = 0; k < o.size(); ++k) o[k] = std::sin(1.0 + 3.0 * static_cast<double>(k));
        double dot = std::inner_product(o.begin(), o.end(), e.begin(), 0.0);
        for (std::size_t k = 0; k < o.size(); ++k) o[k] -= dot * e[k];
        const double n = norm(o);
        for (double& v : o) v /= n;
        const WeightedPrompt p{{o, "orthogonal"}, 0.25};
        RngStream rng(1);
        CHECK(text_loss(*scorer, frame, {&p, 1}, policy, rng).value == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("text_loss gradient matches central finite differences on every pixel of 8x8 frames") {
    auto scorer = make_surrogate_scorer(21);
    const std::vector<WeightedPrompt> prompts{{embed_text(*scorer, "a red barn"), 0.7},
                                              {embed_text(*scorer, "a blue sea"), 0.3}};
    const AugmentationPolicy policy = small_policy(6);
    for (std::uint32_t trial = 0; trial < 3; ++trial) {
        const Image frame = random_image(8, 8, 100 + trial);
        RngStream rng(trial);
        const auto score = text_loss(*scorer, frame, prompts, policy, rng);
        auto f = [&](const Image& x) {
            RngStream r(trial);
            return text_loss(*scorer, x, prompts, policy, r).value;
        };
        const auto coords = t2v::testing::all_coords(frame);
        const auto numeric = finite_difference(f, frame, coords);
        double worst = 0.0;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            worst = std::max(worst, relative_error(score.gradient.values()[coords[i]], numeric[i]));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("text_loss gradient at the default 224 input size on a 16x16 frame") {
    auto scorer = make_surrogate_scorer(4);
    const WeightedPrompt p{embed_text(*scorer, "fog"), 1.0};
    const Image frame = random_image(16, 16, 12);
    AugmentationPolicy policy;
    policy.views_per_step = 4;
    RngStream rng(9);
    const auto score = text_loss(*scorer, frame, {&p, 1}, policy, rng);
    auto f = [&](const Image& x) {
        RngStream r(9);
        return text_loss(*scorer, x, {&p, 1}, policy, r).value;
    };
    std::vector<std::size_t> coords;
    for (std::size_t i = 0; i < frame.size(); i += 17) coords.push_back(i);
    const auto numeric = finite_difference(f, frame, coords);
    bool nonzero = false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        CHECK(relative_error(score.gradient.values()[coords[i]], numeric[i]) < 1e-4);
        nonzero = nonzero || std::abs(numeric[i]) > 1e-8;
    }
    CHECK(nonzero);
}

TEST_CASE("text_loss is linear in the prompt weights for a shared view stream") {
    auto scorer = make_surrogate_scorer(2);
    const auto e1 = embed_text(*scorer, "one");
    const auto e2 = embed_text(*scorer, "two");
    const Image frame = random_image(24, 36, 8);
    const auto policy = small_policy(5);
    auto loss = [&](std::vector<WeightedPrompt> prompts) {
        RngStream rng(314);
        return text_loss(*scorer, frame, prompts, policy, rng);
    };
    const double a = 0.35;
    const double b = 0.65;
    const auto both = loss({{e1, a}, {e2, b}});
    const auto only1 = loss({{e1, 1.0}});
    const auto only2 = loss({{e2, 1.0}});
    CHECK(both.value == doctest::Approx(a * only1.value + b * only2.value).epsilon(1e-12));
    for (std::size_t i = 0; i < frame.size(); i += 13) {
        CHECK(both.gradient.values()[i] ==
              doctest::Approx(a * only1.gradient.values()[i] + b * only2.gradient.values()[i]).epsilon(1e-10));
    }
}

TEST_CASE("text_loss stays within [0, 2] and is bit-deterministic") {
    std::mt19937 gen(1);
    for (int trial = 0; trial < 25; ++trial) {
        auto scorer = make_surrogate_scorer(trial, 8 + static_cast<std::size_t>(trial));
        const Image frame = random_image(8 + trial, 8 + 2 * trial, static_cast<std::uint32_t>(trial));
        const double w = std::uniform_real_distribution<double>(0.01, 0.99)(gen);
        const std::vector<WeightedPrompt> prompts{{embed_text(*scorer, "x" + std::to_string(trial)), w},
                                                  {embed_text(*scorer, "y"), 1.0 - w}};
        RngStream r1(static_cast<std::uint64_t>(trial));
        RngStream r2(static_cast<std::uint64_t>(trial));
        const auto s1 = text_loss(*scorer, frame, prompts, small_policy(3), r1);
        const auto s2 = text_loss(*scorer, frame, prompts, small_policy(3), r2);
        CHECK(s1.value >= 0.0);
        CHECK(s1.value <= 2.0);
        CHECK(s1.value == s2.value);
        CHECK(s1.gradient == s2.gradient);
        CHECK(s1.gradient.same_shape(frame));
        RngStream r3(static_cast<std::uint64_t>(trial));
        CHECK(text_loss_value(*scorer, frame, prompts, small_policy(3), r3) == s1.value);
        CHECK(r3 == r1);
    }
}

TEST_CASE("text_loss rejects empty or nonpositive prompt sets") {
    auto scorer = make_surrogate_scorer(0);
    const Image frame(16, 16, 0.5);
    RngStream rng(0);
    CHECK_THROWS_AS(text_loss(*scorer, frame, {}, small_policy(), rng), ValidationError);
    const WeightedPrompt zero{embed_text(*scorer, "z"), 0.0};
    CHECK_THROWS_AS(text_loss(*scorer, frame, {&zero, 1}, small_policy(), rng), ValidationError);
    CHECK_THROWS_AS(text_loss_value(*scorer, frame, {&zero, 1}, small_policy(), rng), ValidationError);
}

TEST_CASE("text_loss reports non-finite frames as numeric errors") {
    auto scorer = make_surrogate_scorer(0);
    Image frame(16, 16, 0.5);
    frame.at(3, 3, 1) = std::numeric_limits<double>::quiet_NaN();
    const WeightedPrompt p{embed_text(*scorer, "nan"), 1.0};
    RngStream rng(0);
    CHECK_THROWS_AS(text_loss(*scorer, frame, {&p, 1}, small_policy(), rng), NumericError);
}

TEST_CASE("external scorer construction errors") {
    CHECK_THROWS_AS(make_external_scorer({"/nonexistent/clip-weights", "cpu", {}}), ConfigError);
    CHECK_THROWS_AS(make_external_scorer({"", "cpu", {}}), ConfigError);
    CHECK_THROWS_AS(make_external_scorer({"/", "tpu", {}}), ConfigError);
    try {
        make_external_scorer({"/nonexistent/clip-weights", "cpu", {}});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/clip-weights") != std::string::npos);
    }
    CHECK(is_supported_device("cuda:1"));
    CHECK(is_supported_device("cpu"));
    CHECK_FALSE(is_supported_device("gpu"));
}
