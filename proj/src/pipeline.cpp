// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/pipeline.hpp"

#include <chrono>
#include <future>
#include <sstream>

#include "t2v/error.hpp"
#include "t2v/io.hpp"

namespace t2v {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
        text.replace(pos, key.size(), value);
    }
    return text;
}

std::string expand_encoder_command(const GenerationConfig& config) {
    std::ostringstream fps;
    fps << config.fps;
    std::string cmd = config.encoder_command;
    cmd = substitute(cmd, "{fps}", fps.str());
    cmd = substitute(cmd, "{raw}", (config.output_dir / "raw").string());
    cmd = substitute(cmd, "{post}", (config.output_dir / "post").string());
    cmd = substitute(cmd, "{out}", config.output_dir.string());
    return cmd;
}

struct FrameStreams {
    RngStream init;
    RngStream optimize;

    static FrameStreams derive(std::uint64_t seed, std::size_t t) {
        return {RngStream::derive(seed, "init", t), RngStream::derive(seed, "optimize", t)};
    }
};

struct PostResult {
    Image image;
    double seconds = 0.0;
};

struct PendingFrame {
    FrameRecord record;
    FrameState raw;
    std::future<PostResult> post;
};

class Session {
public:
    Session(const GenerationConfig& config, Scorer& scorer, Denoiser& denoiser, const ProgressSink& progress,
            const RunControl& control)
        : mConfig(config),
          mScorer(scorer),
          mDenoiser(denoiser),
          mProgress(progress),
          mControl(control),
          mOut(config.output_dir),
          mStart(Clock::now()) {
        mLayout = build_layout(config.track);
        mTemperature = temperature_to_params(config.temperature, config.temperature_mapping);
        mManifest.config = config_to_json(config);
        mManifest.config_hash = config_hash(config);
        mManifest.scorer = scorer.describe();
        mManifest.denoiser = denoiser.describe();
        mManifest.encoder_command = expand_encoder_command(config);
    }

    void adopt_history(VideoManifest previous) {
        mManifest.frames = std::move(previous.frames);
        mPriorWall = previous.total_wall_seconds;
        mManifest.optimization_seconds = previous.optimization_seconds;
        mManifest.scorer_seconds = previous.scorer_seconds;
        mManifest.postprocess_seconds = previous.postprocess_seconds;
    }

    VideoManifest run(std::size_t start, std::optional<FrameState> prev, std::optional<FrameStreams> first_streams) {
        fs::create_directories(mOut / "raw");
        fs::create_directories(mOut / "post");
        for (const auto& entry : mConfig.track.entries) {
            mEmbeddings.push_back(embed_text(mScorer, entry.text));
        }

        std::optional<PendingFrame> pending;
        std::size_t produced = 0;
        std::size_t t = start;
        try {
            for (; t < mLayout.total_frames; ++t) {
                if (mControl.stop_after_frames && produced >= *mControl.stop_after_frames) {
                    break;
                }
                FrameStreams streams = (t == start && first_streams) ? *first_streams
                                                                     : FrameStreams::derive(mConfig.seed, t);
                PendingFrame frame = produce(t, prev ? &*prev : nullptr, streams);
                prev = frame.raw;
                ++produced;
                if (pending) {
                    finalize(*pending);
                    pending.reset();
                }
                if (mConfig.overlap_postprocess) {
                    pending = std::move(frame);
                } else {
                    finalize(frame);
                }
            }
            if (pending) {
                finalize(*pending);
                pending.reset();
            }
        } catch (const std::exception& e) {
            if (pending) {
                try {
                    finalize(*pending);
                } catch (const std::exception&) {
                }
            }
            mManifest.status = "failed";
            mManifest.error = "frame " + std::to_string(t) + ": " + e.what();
            write_manifest();
            throw GenerationError(mManifest.error, t);
        }

        mManifest.status = mManifest.frames.size() == mLayout.total_frames ? "complete" : "interrupted";
        write_manifest();
        return mManifest;
    }

private:
    PendingFrame produce(std::size_t t, const FrameState* prev, FrameStreams& streams) {
        const auto frame_start = Clock::now();
        const PromptWeights weights = weights_at(mConfig.track, mLayout, t);

        std::vector<WeightedPrompt> prompts;
        PendingFrame out;
        out.record.index = t;
        for (const auto& [n, w] : weights.active()) {
            prompts.push_back({mEmbeddings[n], w});
            out.record.prompts.emplace_back(n, w);
        }

        const FrameState init = prev == nullptr ? init_first_frame(mConfig.height, mConfig.width, streams.init)
                                                : warm_start(*prev, mTemperature.warm_start_noise_std, streams.init);
        OptimizationResult result =
            optimize_frame(init, prev, mScorer, prompts, mTemperature, mConfig.optimizer, streams.optimize);

        out.record.iterations = t == 0 ? mConfig.optimizer.iterations_first_frame : mConfig.optimizer.iterations_per_frame;
        out.record.initial_loss = result.initial_loss;
        out.record.final_loss = result.final_loss;
        out.record.scorer_seconds = result.scorer_seconds;
        out.record.seconds = seconds_since(frame_start);

        const std::string name = frame_file_name(t);
        write_png(mOut / "raw" / name, result.frame.pixels);
        out.record.raw = {"raw/" + name, sha256_file(mOut / "raw" / name)};
        out.raw = std::move(result.frame);

        // The denoiser receives its own copy; the raw frame stays untouched
        // for the next warm start.
        auto job = [this, image = out.raw.pixels]() {
            const auto start = Clock::now();
            PostResult r;
            r.image = mConfig.denoiser.height ? denoise_at_resolution(mDenoiser, image, *mConfig.denoiser.height)
                                              : denoise(mDenoiser, image);
            r.seconds = seconds_since(start);
            return r;
        };
        out.post = std::async(mConfig.overlap_postprocess ? std::launch::async : std::launch::deferred, job);
        return out;
    }

    void finalize(PendingFrame& frame) {
        PostResult post = frame.post.get();
        const std::string name = frame_file_name(frame.record.index);
        write_png(mOut / "post" / name, post.image);
        frame.record.post = {"post/" + name, sha256_file(mOut / "post" / name)};
        frame.record.postprocess_seconds = post.seconds;

        mManifest.optimization_seconds += frame.record.seconds;
        mManifest.scorer_seconds += frame.record.scorer_seconds;
        mManifest.postprocess_seconds += frame.record.postprocess_seconds;
        mManifest.frames.push_back(frame.record);
        mManifest.status = "in_progress";
        write_manifest();

        const std::size_t next = frame.record.index + 1;
        FrameStreams streams = FrameStreams::derive(mConfig.seed, next);
        Checkpoint checkpoint{next,
                              frame.raw,
                              {{"init", streams.init.serialize()}, {"optimize", streams.optimize.serialize()}},
                              mManifest.config_hash};
        write_file_atomic(mOut / "checkpoint.bin", serialize_checkpoint(checkpoint));

        if (mProgress) {
            mProgress({frame.record.index, mLayout.total_frames, frame.record.initial_loss, frame.record.final_loss,
                       seconds_since(mStart)});
        }
    }

    void write_manifest() {
        mManifest.total_wall_seconds = mPriorWall + seconds_since(mStart);
        mManifest.measured_fps = mManifest.optimization_seconds > 0.0
                                     ? static_cast<double>(mManifest.frames.size()) / mManifest.optimization_seconds
                                     : 0.0;
        write_file_atomic(mOut / "manifest.json", manifest_to_json(mManifest).dump(2) + "\n");
    }

    const GenerationConfig& mConfig;
    Scorer& mScorer;
    Denoiser& mDenoiser;
    const ProgressSink& mProgress;
    const RunControl& mControl;
    fs::path mOut;
    Clock::time_point mStart;
    double mPriorWall = 0.0;
    SegmentLayout mLayout;
    TemperatureParams mTemperature;
    std::vector<TextEmbedding> mEmbeddings;
    VideoManifest mManifest;
};

void remove_stale_outputs(const fs::path& out) {
    for (const char* sub : {"raw", "post"}) {
        const fs::path dir = out / sub;
        if (!fs::is_directory(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (entry.is_regular_file() && name.starts_with("frame_") && name.ends_with(".png")) {
                fs::remove(entry.path());
            }
        }
    }
    fs::remove(out / "checkpoint.bin");
    fs::remove(out / "manifest.json");
}

}  // namespace

VideoManifest generate(const GenerationConfig& config, Scorer& scorer, Denoiser& denoiser,
                       const ProgressSink& progress, const RunControl& control) {
    config.validate();
    remove_stale_outputs(config.output_dir);
    Session session(config, scorer, denoiser, progress, control);
    return session.run(0, std::nullopt, std::nullopt);
}

VideoManifest resume(const Checkpoint& checkpoint, const GenerationConfig& config, Scorer& scorer,
                     Denoiser& denoiser, const ProgressSink& progress, const RunControl& control) {
    config.validate();
    const std::string hash = config_hash(config);
    if (checkpoint.config_hash != hash) {
        throw ValidationError("refusing to resume: checkpoint was written for a different configuration (" +
                              checkpoint.config_hash.substr(0, 12) + " vs " + hash.substr(0, 12) + ")");
    }
    const std::size_t total = build_layout(config.track).total_frames;
    if (checkpoint.next_index > total) {
        throw ValidationError("checkpoint points past the end of the track");
    }

    VideoManifest previous = read_manifest(config.output_dir / "manifest.json");
    if (previous.config_hash != hash) {
        throw ValidationError("refusing to resume: manifest belongs to a different configuration");
    }
    if (previous.frames.size() < checkpoint.next_index) {
        throw ValidationError("manifest is missing records before the checkpoint");
    }
    previous.frames.resize(checkpoint.next_index);

    std::optional<FrameState> prev;
    if (checkpoint.next_index > 0) {
        if (checkpoint.last_raw.index + 1 != checkpoint.next_index ||
            checkpoint.last_raw.pixels.height() != config.height || checkpoint.last_raw.pixels.width() != config.width) {
            throw ValidationError("checkpoint frame does not match the configuration");
        }
        prev = checkpoint.last_raw;
    }

    std::optional<FrameStreams> streams;
    std::optional<RngStream> init;
    std::optional<RngStream> optimize;
    for (const auto& [purpose, state] : checkpoint.rng_states) {
        if (purpose == "init") init = RngStream::deserialize(state);
        if (purpose == "optimize") optimize = RngStream::deserialize(state);
    }
    if (init && optimize) {
        streams = FrameStreams{*init, *optimize};
    }

    Session session(config, scorer, denoiser, progress, control);
    session.adopt_history(std::move(previous));
    return session.run(checkpoint.next_index, std::move(prev), std::move(streams));
}

ThroughputReport measure_throughput(const VideoManifest& manifest) {
    ThroughputReport r;
    r.frames = manifest.frames.size();
    r.total_wall_seconds = manifest.total_wall_seconds;
    r.optimization_seconds = manifest.optimization_seconds;
    for (const auto& f : manifest.frames) {
        r.per_frame_seconds.push_back(f.seconds);
    }
    if (r.optimization_seconds > 0.0) {
        r.fps = static_cast<double>(r.frames) / r.optimization_seconds;
    }
    if (r.total_wall_seconds > 0.0) {
        r.fps_inclusive = static_cast<double>(r.frames) / r.total_wall_seconds;
        r.scorer_fraction = manifest.scorer_seconds / r.total_wall_seconds;
        r.overhead_fraction = 1.0 - r.scorer_fraction;
    }
    return r;
}

}  // namespace t2v
