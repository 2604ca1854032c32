// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "t2v/pipeline.hpp"

namespace t2v {

/// Command-line values that win over the config file.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> temperature;
    std::optional<int> width;
    std::optional<int> height;
    std::optional<double> fps;
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::string> scorer;    // "surrogate" or "external:<weights path>"
    std::optional<std::string> denoiser;  // "identity" or "external:<weights path>"
};

struct ParsedConfig {
    GenerationConfig config;
    std::vector<std::string> warnings;
};

/// Applies defaults, then overrides, then validates. Throws SchemaError
/// listing every problem found (type errors, unknown keys, range checks).
ParsedConfig parse_config_json(const nlohmann::json& document, const ConfigOverrides& overrides = {});
ParsedConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

enum class Subcommand { generate, resume, validate };

struct CliInvocation {
    Subcommand subcommand = Subcommand::generate;
    std::filesystem::path config_path;
    ConfigOverrides overrides;
    std::optional<std::size_t> stop_after;
    bool quiet = false;
};

/// Executes the invocation; returns the process exit status.
int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// Parses argv into an invocation. Returns the exit status instead when
/// parsing finished the program (help, usage errors).
std::variant<CliInvocation, int> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                                    std::ostream& err);

}  // namespace t2v
