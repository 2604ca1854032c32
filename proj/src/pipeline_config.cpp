// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>

#include "t2v/error.hpp"
#include "t2v/io.hpp"
#include "t2v/pipeline.hpp"

namespace t2v {

std::vector<std::string> GenerationConfig::validation_issues() const {
    std::vector<std::string> issues;
    if (track.entries.empty()) {
        issues.emplace_back("prompts: at least one prompt is required");
    }
    for (std::size_t n = 0; n < track.entries.size(); ++n) {
        const auto& e = track.entries[n];
        if (e.text.empty()) issues.push_back("prompts[" + std::to_string(n) + "].text: must be nonempty");
        if (e.frames < 1) issues.push_back("prompts[" + std::to_string(n) + "].frames: must be >= 1");
    }
    if (height < 8 || width < 8) {
        issues.emplace_back("width/height: frames must be at least 8x8 pixels");
    }
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        issues.emplace_back("fps: must be > 0");
    }
    if (!(temperature >= 0.0 && temperature <= 100.0)) {
        issues.emplace_back("temperature: must lie in [0, 100]");
    }
    if (optimizer.iterations_first_frame < 0) issues.emplace_back("optimizer.iterations_first_frame: must be >= 0");
    if (optimizer.iterations_per_frame < 0) issues.emplace_back("optimizer.iterations_per_frame: must be >= 0");
    if (!(optimizer.step_size > 0.0) || !std::isfinite(optimizer.step_size)) {
        issues.emplace_back("optimizer.step_size: must be > 0");
    }
    const auto& aug = optimizer.augmentation;
    if (aug.views_per_step < 1) issues.emplace_back("optimizer.views: must be >= 1");
    if (!(aug.crop_scale_low > 0.0 && aug.crop_scale_low <= aug.crop_scale_high && aug.crop_scale_high <= 1.0)) {
        issues.emplace_back("optimizer.crop_scale: must satisfy 0 < low <= high <= 1");
    }
    if (aug.scorer_input_size < 32) issues.emplace_back("optimizer.scorer_input_size: must be >= 32");
    if (!(temperature_mapping.noise_per_degree >= 0.0) || !(temperature_mapping.max_stability_weight >= 0.0)) {
        issues.emplace_back("temperature_mapping: constants must be >= 0");
    }
    if (scorer.kind == "surrogate") {
        if (scorer.embedding_dim < 8) issues.emplace_back("scorer.embedding_dim: must be >= 8");
    } else if (scorer.kind == "external") {
        if (scorer.path.empty()) issues.emplace_back("scorer.path: required for an external scorer");
    } else {
        issues.push_back("scorer.kind: unknown kind '" + scorer.kind + "' (surrogate | external)");
    }
    if (denoiser.kind == "external") {
        if (denoiser.path.empty()) issues.emplace_back("denoiser.path: required for an external denoiser");
    } else if (denoiser.kind != "identity") {
        issues.push_back("denoiser.kind: unknown kind '" + denoiser.kind + "' (identity | external)");
    }
    if (denoiser.height && *denoiser.height < 32) {
        issues.emplace_back("denoiser.height: must be >= 32");
    }
    return issues;
}

void GenerationConfig::validate() const {
    auto issues = validation_issues();
    if (!issues.empty()) {
        throw SchemaError(std::move(issues));
    }
}

nlohmann::json config_to_json(const GenerationConfig& c) {
    nlohmann::json prompts = nlohmann::json::array();
    for (const auto& e : c.track.entries) {
        prompts.push_back({{"text", e.text}, {"frames", e.frames}});
    }
    const auto& aug = c.optimizer.augmentation;
    nlohmann::json denoiser = {{"kind", c.denoiser.kind},
                               {"path", c.denoiser.path},
                               {"device", c.denoiser.device},
                               {"command", c.denoiser.command}};
    denoiser["height"] = c.denoiser.height ? nlohmann::json(*c.denoiser.height) : nlohmann::json(nullptr);
    return {
        {"prompts", prompts},
        {"width", c.width},
        {"height", c.height},
        {"fps", c.fps},
        {"temperature", c.temperature},
        {"seed", c.seed},
        {"optimizer",
         {{"iterations_first_frame", c.optimizer.iterations_first_frame},
          {"iterations_per_frame", c.optimizer.iterations_per_frame},
          {"step_size", c.optimizer.step_size},
          {"views", aug.views_per_step},
          {"crop_scale", {aug.crop_scale_low, aug.crop_scale_high}},
          {"scorer_input_size", aug.scorer_input_size}}},
        {"temperature_mapping",
         {{"noise_per_degree", c.temperature_mapping.noise_per_degree},
          {"max_stability_weight", c.temperature_mapping.max_stability_weight}}},
        {"scorer",
         {{"kind", c.scorer.kind},
          {"seed", c.scorer.seed},
          {"embedding_dim", c.scorer.embedding_dim},
          {"path", c.scorer.path},
          {"device", c.scorer.device},
          {"command", c.scorer.command}}},
        {"denoiser", denoiser},
        {"output_dir", c.output_dir.string()},
        {"encoder_command", c.encoder_command},
        {"overlap_postprocess", c.overlap_postprocess},
    };
}

std::string config_hash(const GenerationConfig& config) {
    nlohmann::json j = config_to_json(config);
    j.erase("output_dir");
    j.erase("encoder_command");
    j.erase("overlap_postprocess");
    return sha256_hex(j.dump());
}

std::string resolve_device(const std::string& configured) {
    if (!configured.empty()) {
        return configured;
    }
    const char* env = std::getenv("T2V_DEVICE");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string("cpu");
}

ScorerHandle make_scorer(const ScorerSelection& selection) {
    if (selection.kind == "surrogate") {
        return make_surrogate_scorer(selection.seed, selection.embedding_dim);
    }
    if (selection.kind == "external") {
        return make_external_scorer({selection.path, resolve_device(selection.device), selection.command});
    }
    throw ConfigError("unknown scorer kind '" + selection.kind + "'");
}

DenoiserHandle make_denoiser(const DenoiserSelection& selection) {
    if (selection.kind == "identity") {
        return make_identity_denoiser();
    }
    if (selection.kind == "external") {
        return make_external_denoiser({selection.path, resolve_device(selection.device), selection.command});
    }
    throw ConfigError("unknown denoiser kind '" + selection.kind + "'");
}

}  // namespace t2v
