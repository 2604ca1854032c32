// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace t2v {

struct PromptEntry {
    std::string text;
    std::size_t frames = 0;

    friend bool operator==(const PromptEntry&, const PromptEntry&) = default;
};

/// Ordered narrative: each prompt owns a consecutive run of frames.
struct PromptTrack {
    std::vector<PromptEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    friend bool operator==(const PromptTrack&, const PromptTrack&) = default;
};

/// Throws ValidationError unless the track has at least one entry, every
/// text is nonempty and every budget is >= 1.
void validate_track(const PromptTrack& track);

struct SegmentLayout {
    std::vector<std::size_t> starts;  // starts[n] = first global frame of prompt n
    std::size_t total_frames = 0;

    /// Index of the segment containing frame t. Requires t < total_frames.
    std::size_t segment_of(std::size_t t) const;
};

/// Per-prompt blend coefficients for a single frame.
struct PromptWeights {
    std::vector<double> weights;
    std::size_t frame_index = 0;

    /// (prompt index, weight) for every nonzero weight, in prompt order.
    std::vector<std::pair<std::size_t, double>> active() const;
};

SegmentLayout build_layout(const PromptTrack& track);

/// Frame t of segment n fades linearly from prompt n toward prompt n+1 over
/// n's own budget; the final segment holds its prompt at full weight.
PromptWeights weights_at(const PromptTrack& track, const SegmentLayout& layout, std::size_t t);

}  // namespace t2v
