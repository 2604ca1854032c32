// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <regex>

#include "t2v/adapter_process.hpp"
#include "t2v/error.hpp"
#include "t2v/guidance.hpp"

#ifndef T2V_ADAPTER_DIR
#define T2V_ADAPTER_DIR "tools/adapters"
#endif

namespace t2v {

namespace {

void append_image(std::vector<double>& payload, const Image& img) {
    auto v = img.values();
    payload.insert(payload.end(), v.begin(), v.end());
}

class ExternalScorer final : public Scorer {
public:
    explicit ExternalScorer(const ExternalScorerConfig& config)
        : mConfig(config), mProcess(config.command) {
        AdapterMessage hello;
        try {
            hello = mProcess.call({{"op", "hello"},
                                   {"role", "scorer"},
                                   {"weights", config.weights_path},
                                   {"device", config.device}});
        } catch (const AdapterError& e) {
            throw ConfigError(std::string("external scorer handshake failed: ") + e.what());
        }
        mDim = hello.header.value("embedding_dim", std::size_t{0});
        mName = hello.header.value("name", std::string("external"));
        if (mDim == 0) {
            throw ConfigError("external scorer reported embedding_dim 0");
        }
    }

    ScorerKind kind() const override { return ScorerKind::external; }
    std::size_t embedding_dim() const override { return mDim; }
    std::string describe() const override {
        return "external(" + mName + ", weights=" + mConfig.weights_path + ", device=" + mConfig.device + ")";
    }

    TextEmbedding embed_text(std::string_view prompt) override {
        const auto reply = mProcess.call({{"op", "embed_text"}, {"text", std::string(prompt)}});
        expect_payload(reply, mDim);
        return TextEmbedding{reply.payload, std::string(prompt)};
    }

    std::vector<std::vector<double>> embed_images(std::span<const Image> images) override {
        std::vector<std::vector<double>> out;
        out.reserve(images.size());
        for (const auto& img : images) {
            std::vector<double> payload;
            append_image(payload, img);
            const auto reply = mProcess.call(
                {{"op", "embed_images"}, {"count", 1}, {"height", img.height()}, {"width", img.width()}}, payload);
            expect_payload(reply, mDim);
            out.push_back(reply.payload);
        }
        return out;
    }

    std::vector<double> score_views(std::span<const Image> views, std::span<const WeightedPrompt> prompts,
                                    std::span<Image> gradients) override {
        if (gradients.size() != views.size()) {
            throw ValidationError("external scorer: one gradient buffer per view is required");
        }
        if (views.empty()) {
            return {};
        }
        const int h = views.front().height();
        const int w = views.front().width();
        std::vector<double> payload;
        payload.reserve(views.size() * views.front().size() + prompts.size() * mDim);
        for (const auto& v : views) {
            if (v.height() != h || v.width() != w) {
                throw ValidationError("external scorer: views in one batch must share a shape");
            }
            append_image(payload, v);
        }
        std::vector<double> weights;
        for (const auto& p : prompts) {
            weights.push_back(p.weight);
            payload.insert(payload.end(), p.embedding.vector.begin(), p.embedding.vector.end());
        }
        const auto reply = mProcess.call({{"op", "score_views"},
                                          {"count", views.size()},
                                          {"height", h},
                                          {"width", w},
                                          {"weights", weights}},
                                         payload);
        const std::size_t per_view = views.front().size();
        expect_payload(reply, per_view * views.size());
        const auto values = reply.header.value("values", std::vector<double>{});
        if (values.size() != views.size()) {
            throw AdapterError("external scorer: wrong number of view values");
        }
        for (std::size_t v = 0; v < views.size(); ++v) {
            gradients[v].reshape(h, w);
            std::copy_n(reply.payload.begin() + static_cast<std::ptrdiff_t>(v * per_view), per_view,
                        gradients[v].values().begin());
        }
        return values;
    }

private:
    static void expect_payload(const AdapterMessage& reply, std::size_t count) {
        if (reply.payload.size() != count) {
            throw AdapterError("external scorer: expected " + std::to_string(count) + " payload values, got " +
                               std::to_string(reply.payload.size()));
        }
    }

    ExternalScorerConfig mConfig;
    AdapterProcess mProcess;
    std::size_t mDim = 0;
    std::string mName;
};

}  // namespace

bool is_supported_device(std::string_view device) {
    static const std::regex pattern("^(cpu|auto|mps|cuda(:[0-9]+)?)$");
    return std::regex_match(device.begin(), device.end(), pattern);
}

std::vector<std::string> default_clip_adapter_command() {
    const char* dir = std::getenv("T2V_ADAPTER_DIR");
    const std::string base = dir != nullptr ? dir : T2V_ADAPTER_DIR;
    return {"python3", base + "/clip_scorer.py"};
}

ScorerHandle make_external_scorer(const ExternalScorerConfig& config) {
    if (config.weights_path.empty()) {
        throw ConfigError("external scorer: no weights path given");
    }
    if (!std::filesystem::exists(config.weights_path)) {
        throw ConfigError("external scorer: weights not found at '" + config.weights_path + "'");
    }
    if (!is_supported_device(config.device)) {
        throw ConfigError("external scorer: unsupported device '" + config.device + "'");
    }
    ExternalScorerConfig resolved = config;
    if (resolved.command.empty()) {
        resolved.command = default_clip_adapter_command();
    }
    return std::make_unique<ExternalScorer>(resolved);
}

}  // namespace t2v
