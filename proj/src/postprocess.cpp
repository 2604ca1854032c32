// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/postprocess.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "t2v/adapter_process.hpp"
#include "t2v/error.hpp"
#include "t2v/guidance.hpp"

#ifndef T2V_ADAPTER_DIR
#define T2V_ADAPTER_DIR "tools/adapters"
#endif

namespace t2v {

namespace {

class IdentityDenoiser final : public Denoiser {
public:
    DenoiserKind kind() const override { return DenoiserKind::identity; }
    std::string describe() const override { return "identity"; }
    std::string expected_input_note() const override { return "any HxWx3 frame in [0, 1]; returned unchanged"; }

    std::vector<Image> denoise_batch(std::span<const Image> frames) override {
        return {frames.begin(), frames.end()};
    }
};

class ExternalDenoiser final : public Denoiser {
public:
    explicit ExternalDenoiser(const ExternalDenoiserConfig& config) : mConfig(config), mProcess(config.command) {
        AdapterMessage hello;
        try {
            hello = mProcess.call({{"op", "hello"},
                                   {"role", "denoiser"},
                                   {"weights", config.weights_path},
                                   {"device", config.device}});
        } catch (const AdapterError& e) {
            throw ConfigError(std::string("external denoiser handshake failed: ") + e.what());
        }
        mName = hello.header.value("name", std::string("external"));
        mNote = hello.header.value("input_note", std::string("HxWx3 frames in [0, 1]"));
    }

    DenoiserKind kind() const override { return DenoiserKind::external; }
    std::string describe() const override {
        return "external(" + mName + ", weights=" + mConfig.weights_path + ", device=" + mConfig.device + ")";
    }
    std::string expected_input_note() const override { return mNote; }

    std::vector<Image> denoise_batch(std::span<const Image> frames) override {
        std::vector<Image> out;
        out.reserve(frames.size());
        for (const auto& frame : frames) {
            auto v = frame.values();
            const auto reply = mProcess.call(
                {{"op", "denoise"}, {"count", 1}, {"height", frame.height()}, {"width", frame.width()}},
                std::vector<double>(v.begin(), v.end()));
            const int h = reply.header.value("height", frame.height());
            const int w = reply.header.value("width", frame.width());
            Image result(h, w);
            if (reply.payload.size() != result.size()) {
                throw AdapterError("external denoiser: payload size does not match reported shape");
            }
            std::copy(reply.payload.begin(), reply.payload.end(), result.values().begin());
            out.push_back(std::move(result));
        }
        return out;
    }

private:
    ExternalDenoiserConfig mConfig;
    AdapterProcess mProcess;
    std::string mName;
    std::string mNote;
};

}  // namespace

DenoiserHandle make_identity_denoiser() { return std::make_unique<IdentityDenoiser>(); }

std::vector<std::string> default_denoiser_adapter_command() {
    const char* dir = std::getenv("T2V_ADAPTER_DIR");
    const std::string base = dir != nullptr ? dir : T2V_ADAPTER_DIR;
    return {"python3", base + "/torchscript_denoiser.py"};
}

DenoiserHandle make_external_denoiser(const ExternalDenoiserConfig& config) {
    if (config.weights_path.empty()) {
        throw ConfigError("external denoiser: no weights path given");
    }
    if (!std::filesystem::exists(config.weights_path)) {
        throw ConfigError("external denoiser: weights not found at '" + config.weights_path + "'");
    }
    if (!is_supported_device(config.device)) {
        throw ConfigError("external denoiser: unsupported device '" + config.device + "'");
    }
    ExternalDenoiserConfig resolved = config;
    if (resolved.command.empty()) {
        resolved.command = default_denoiser_adapter_command();
    }
    return std::make_unique<ExternalDenoiser>(resolved);
}

Image denoise(Denoiser& denoiser, const Image& frame) {
    const Image copy = frame;
    auto out = denoiser.denoise_batch(std::span<const Image>(&copy, 1));
    if (out.size() != 1 || !out.front().same_shape(frame)) {
        throw AdapterError("denoiser changed the frame shape");
    }
    if (!out.front().all_finite()) {
        throw NumericError("denoiser produced non-finite pixels");
    }
    out.front().clamp();
    return std::move(out.front());
}

Image denoise_at_resolution(Denoiser& denoiser, const Image& frame, int target_height) {
    if (target_height < 32) {
        throw ValidationError("denoise_at_resolution: target height must be >= 32");
    }
    if (frame.empty()) {
        throw ValidationError("denoise_at_resolution: empty frame");
    }
    if (target_height == frame.height()) {
        return denoise(denoiser, frame);
    }
    const double scale = static_cast<double>(target_height) / static_cast<double>(frame.height());
    const int target_width = static_cast<int>(std::lround(static_cast<double>(frame.width()) * scale));
    if (target_width < 1) {
        throw ValidationError("denoise_at_resolution: target width would be degenerate");
    }
    return denoise(denoiser, resize_bilinear(frame, target_height, target_width));
}

}  // namespace t2v
