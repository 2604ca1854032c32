// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/prompt_schedule.hpp"

#include <algorithm>
#include <string>

#include "t2v/error.hpp"

namespace t2v {

void validate_track(const PromptTrack& track) {
    if (track.entries.empty()) {
        throw ValidationError("prompt track is empty");
    }
    for (std::size_t n = 0; n < track.entries.size(); ++n) {
        const auto& entry = track.entries[n];
        if (entry.text.empty()) {
            throw ValidationError("prompt " + std::to_string(n) + " has empty text");
        }
        if (entry.frames < 1) {
            throw ValidationError("prompt " + std::to_string(n) + " has a frame budget below 1");
        }
    }
}

std::size_t SegmentLayout::segment_of(std::size_t t) const {
    if (t >= total_frames) {
        throw BoundsError("frame index " + std::to_string(t) + " outside [0, " + std::to_string(total_frames) + ")");
    }
    const auto it = std::upper_bound(starts.begin(), starts.end(), t);
    return static_cast<std::size_t>(std::distance(starts.begin(), it)) - 1;
}

std::vector<std::pair<std::size_t, double>> PromptWeights::active() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t n = 0; n < weights.size(); ++n) {
        if (weights[n] > 0.0) {
            out.emplace_back(n, weights[n]);
        }
    }
    return out;
}

SegmentLayout build_layout(const PromptTrack& track) {
    validate_track(track);
    SegmentLayout layout;
    layout.starts.reserve(track.entries.size());
    std::size_t cursor = 0;
    for (const auto& entry : track.entries) {
        layout.starts.push_back(cursor);
        cursor += entry.frames;
    }
    layout.total_frames = cursor;
    return layout;
}

PromptWeights weights_at(const PromptTrack& track, const SegmentLayout& layout, std::size_t t) {
    if (layout.starts.size() != track.entries.size()) {
        throw ValidationError("weights_at: layout does not belong to this track");
    }
    const std::size_t n = layout.segment_of(t);
    PromptWeights out;
    out.frame_index = t;
    out.weights.assign(track.entries.size(), 0.0);
    if (n + 1 == track.entries.size()) {
        out.weights[n] = 1.0;
        return out;
    }
    const double local = static_cast<double>(t - layout.starts[n]);
    const double next = local / static_cast<double>(track.entries[n].frames);
    out.weights[n] = 1.0 - next;
    out.weights[n + 1] = next;
    return out;
}

}  // namespace t2v
