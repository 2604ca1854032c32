// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace t2v {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input failed a precondition (bad shape, empty track, out-of-range knob).
class ValidationError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

/// A loss or gradient became non-finite. `iteration()` is -1 when the
/// failure happened outside an optimizer loop.
class NumericError : public Error {
public:
    NumericError(const std::string& what, int iteration = -1)
        : Error(what), mIteration(iteration) {}
    int iteration() const noexcept { return mIteration; }

private:
    int mIteration;
};

/// Failure inside a scorer or denoiser adapter (process died, bad reply).
class AdapterError : public Error {
public:
    using Error::Error;
};

/// Adapter could not be constructed from its configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Configuration file failed schema validation. Carries every violation.
class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return mIssues; }

private:
    std::vector<std::string> mIssues;
};

/// Generation aborted while producing `frame_index()`.
class GenerationError : public Error {
public:
    GenerationError(const std::string& what, std::size_t frame_index)
        : Error(what), mFrameIndex(frame_index) {}
    std::size_t frame_index() const noexcept { return mFrameIndex; }

private:
    std::size_t mFrameIndex;
};

}  // namespace t2v
