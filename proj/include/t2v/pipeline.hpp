// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end generation. Output layout under the configured directory:
//
//   raw/frame_00000.png ...   directly optimized frames
//   post/frame_00000.png ...  denoised frames
//   manifest.json             config echo, per-frame records, timings, hashes
//   checkpoint.bin            state needed to continue after the last frame

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "t2v/frame_optimizer.hpp"
#include "t2v/guidance.hpp"
#include "t2v/postprocess.hpp"
#include "t2v/prompt_schedule.hpp"

namespace t2v {

struct ScorerSelection {
    std::string kind = "surrogate";  // surrogate | external
    std::uint64_t seed = 0;          // surrogate only
    std::size_t embedding_dim = 64;  // surrogate only
    std::string path;                // external only
    std::string device;              // external only; empty means $T2V_DEVICE or cpu
    std::vector<std::string> command;
};

struct DenoiserSelection {
    std::string kind = "identity";  // identity | external
    std::string path;
    std::string device;
    std::vector<std::string> command;
    std::optional<int> height;  // denoise at this height instead of the native one
};

struct GenerationConfig {
    PromptTrack track;
    int height = 256;
    int width = 256;
    double fps = 12.0;
    double temperature = 50.0;
    std::uint64_t seed = 0;
    OptimizerParams optimizer;
    TemperatureMapping temperature_mapping;
    ScorerSelection scorer;
    DenoiserSelection denoiser;
    std::filesystem::path output_dir = "out";
    /// {fps}, {raw}, {post} and {out} are substituted.
    std::string encoder_command = "ffmpeg -y -framerate {fps} -i {post}/frame_%05d.png -pix_fmt yuv420p {out}/video.mp4";
    bool overlap_postprocess = false;

    /// Every violation, empty when valid.
    std::vector<std::string> validation_issues() const;
    /// Throws SchemaError listing every violation.
    void validate() const;
};

nlohmann::json config_to_json(const GenerationConfig& config);

/// Hash over everything that affects generated pixels or the manifest's
/// meaning; excludes the output directory and execution-only knobs.
std::string config_hash(const GenerationConfig& config);

std::string resolve_device(const std::string& configured);
ScorerHandle make_scorer(const ScorerSelection& selection);
DenoiserHandle make_denoiser(const DenoiserSelection& selection);

struct FileRecord {
    std::string path;  // relative to the output directory
    std::string sha256;
};

struct FrameRecord {
    std::size_t index = 0;
    std::vector<std::pair<std::size_t, double>> prompts;  // active (prompt index, weight)
    int iterations = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double seconds = 0.0;  // initialization + optimization
    double scorer_seconds = 0.0;
    double postprocess_seconds = 0.0;
    FileRecord raw;
    FileRecord post;
};

struct VideoManifest {
    std::string status;  // in_progress | interrupted | failed | complete
    std::string error;
    nlohmann::json config;
    std::string config_hash;
    std::string scorer;
    std::string denoiser;
    std::vector<FrameRecord> frames;
    double total_wall_seconds = 0.0;
    double optimization_seconds = 0.0;
    double scorer_seconds = 0.0;
    double postprocess_seconds = 0.0;
    double measured_fps = 0.0;  // frames / optimization_seconds
    std::string encoder_command;

    /// Hashes of every frame file, raw then post per frame, in frame order.
    std::vector<std::string> content_hashes() const;
};

nlohmann::json manifest_to_json(const VideoManifest& manifest);
VideoManifest manifest_from_json(const nlohmann::json& json);
VideoManifest read_manifest(const std::filesystem::path& path);

struct Checkpoint {
    std::size_t next_index = 0;
    FrameState last_raw;  // empty pixels when next_index == 0
    std::vector<std::pair<std::string, std::string>> rng_states;  // purpose -> serialized stream
    std::string config_hash;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);
Checkpoint read_checkpoint(const std::filesystem::path& path);

struct ProgressEvent {
    std::size_t frame_index = 0;
    std::size_t total_frames = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double elapsed_seconds = 0.0;
};

using ProgressSink = std::function<void(const ProgressEvent&)>;

struct RunControl {
    /// Stop cleanly after this many frames in the current session, leaving
    /// the checkpoint behind as an interrupted run would.
    std::optional<std::size_t> stop_after_frames;
};

VideoManifest generate(const GenerationConfig& config, Scorer& scorer, Denoiser& denoiser,
                       const ProgressSink& progress = {}, const RunControl& control = {});

/// Continues the run recorded in config.output_dir from `checkpoint`.
/// Throws ValidationError when the checkpoint belongs to another config.
VideoManifest resume(const Checkpoint& checkpoint, const GenerationConfig& config, Scorer& scorer,
                     Denoiser& denoiser, const ProgressSink& progress = {}, const RunControl& control = {});

struct ThroughputReport {
    std::size_t frames = 0;
    double total_wall_seconds = 0.0;
    double optimization_seconds = 0.0;
    double fps = 0.0;            // excludes post-processing and I/O
    double fps_inclusive = 0.0;  // over total wall time
    std::vector<double> per_frame_seconds;
    double scorer_fraction = 0.0;    // scorer time / total wall time
    double overhead_fraction = 0.0;  // everything else / total wall time
};

ThroughputReport measure_throughput(const VideoManifest& manifest);

std::string frame_file_name(std::size_t index);

}  // namespace t2v
