// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/cli.hpp"

#include <iomanip>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "t2v/error.hpp"
#include "t2v/io.hpp"

namespace t2v {

namespace {

using nlohmann::json;

class SchemaReader {
public:
    std::vector<std::string> issues;

    void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.contains(key)) {
                issues.push_back(where + key + ": unknown key");
            }
        }
    }

    bool object(const json& parent, const char* key, const std::string& where) {
        if (!parent.contains(key)) return false;
        if (!parent.at(key).is_object()) {
            issues.push_back(where + key + ": expected an object");
            return false;
        }
        return true;
    }

    void number(const json& obj, const char* key, const std::string& where, double& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            issues.push_back(where + key + ": expected a number");
            return;
        }
        dst = v.get<double>();
    }

    void integer(const json& obj, const char* key, const std::string& where, int& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) {
            issues.push_back(where + key + ": expected an integer");
            return;
        }
        dst = v.get<int>();
    }

    void unsigned_integer(const json& obj, const char* key, const std::string& where, std::uint64_t& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            issues.push_back(where + key + ": expected a nonnegative integer");
            return;
        }
        dst = v.get<std::uint64_t>();
    }

    void string(const json& obj, const char* key, const std::string& where, std::string& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            issues.push_back(where + key + ": expected a string");
            return;
        }
        dst = v.get<std::string>();
    }

    void boolean(const json& obj, const char* key, const std::string& where, bool& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            issues.push_back(where + key + ": expected true or false");
            return;
        }
        dst = v.get<bool>();
    }

    void string_list(const json& obj, const char* key, const std::string& where, std::vector<std::string>& dst) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
            issues.push_back(where + key + ": expected a list of strings");
            return;
        }
        dst = v.get<std::vector<std::string>>();
    }
};

void read_prompts(SchemaReader& r, const json& doc, GenerationConfig& c) {
    if (!doc.contains("prompts")) {
        r.issues.emplace_back("prompts: required");
        return;
    }
    const auto& prompts = doc.at("prompts");
    if (!prompts.is_array()) {
        r.issues.emplace_back("prompts: expected a list of {text, frames}");
        return;
    }
    for (std::size_t n = 0; n < prompts.size(); ++n) {
        const std::string where = "prompts[" + std::to_string(n) + "].";
        const auto& p = prompts[n];
        if (!p.is_object()) {
            r.issues.push_back("prompts[" + std::to_string(n) + "]: expected an object");
            continue;
        }
        r.allow_keys(p, where, {"text", "frames"});
        PromptEntry entry;
        if (!p.contains("text")) {
            r.issues.push_back(where + "text: required");
        }
        r.string(p, "text", where, entry.text);
        std::uint64_t frames = 1;
        if (p.contains("frames") && p.at("frames").is_number_integer() && p.at("frames").get<std::int64_t>() < 1) {
            r.issues.push_back(where + "frames: must be >= 1");
        } else {
            r.unsigned_integer(p, "frames", where, frames);
        }
        entry.frames = static_cast<std::size_t>(frames);
        c.track.entries.push_back(std::move(entry));
    }
}

void read_document(SchemaReader& r, const json& doc, GenerationConfig& c) {
    if (!doc.is_object()) {
        r.issues.emplace_back("config: top level must be an object");
        return;
    }
    r.allow_keys(doc, "", {"prompts", "temperature", "width", "height", "fps", "seed", "optimizer",
                           "temperature_mapping", "scorer", "denoiser", "output_dir", "encoder_command",
                           "overlap_postprocess"});
    read_prompts(r, doc, c);
    r.number(doc, "temperature", "", c.temperature);
    r.integer(doc, "width", "", c.width);
    r.integer(doc, "height", "", c.height);
    r.number(doc, "fps", "", c.fps);
    r.unsigned_integer(doc, "seed", "", c.seed);
    std::string out = c.output_dir.string();
    r.string(doc, "output_dir", "", out);
    c.output_dir = out;
    r.string(doc, "encoder_command", "", c.encoder_command);
    r.boolean(doc, "overlap_postprocess", "", c.overlap_postprocess);

    if (r.object(doc, "optimizer", "")) {
        const auto& o = doc.at("optimizer");
        const std::string where = "optimizer.";
        r.allow_keys(o, where, {"iterations_first_frame", "iterations_per_frame", "step_size", "views",
                                "crop_scale", "scorer_input_size"});
        r.integer(o, "iterations_first_frame", where, c.optimizer.iterations_first_frame);
        r.integer(o, "iterations_per_frame", where, c.optimizer.iterations_per_frame);
        r.number(o, "step_size", where, c.optimizer.step_size);
        r.integer(o, "views", where, c.optimizer.augmentation.views_per_step);
        r.integer(o, "scorer_input_size", where, c.optimizer.augmentation.scorer_input_size);
        if (o.contains("crop_scale")) {
            const auto& cs = o.at("crop_scale");
            if (cs.is_array() && cs.size() == 2 && cs[0].is_number() && cs[1].is_number()) {
                c.optimizer.augmentation.crop_scale_low = cs[0].get<double>();
                c.optimizer.augmentation.crop_scale_high = cs[1].get<double>();
            } else {
                r.issues.emplace_back("optimizer.crop_scale: expected [low, high]");
            }
        }
    }
    if (r.object(doc, "temperature_mapping", "")) {
        const auto& m = doc.at("temperature_mapping");
        r.allow_keys(m, "temperature_mapping.", {"noise_per_degree", "max_stability_weight"});
        r.number(m, "noise_per_degree", "temperature_mapping.", c.temperature_mapping.noise_per_degree);
        r.number(m, "max_stability_weight", "temperature_mapping.", c.temperature_mapping.max_stability_weight);
    }
    if (r.object(doc, "scorer", "")) {
        const auto& s = doc.at("scorer");
        const std::string where = "scorer.";
        r.allow_keys(s, where, {"kind", "seed", "embedding_dim", "path", "device", "command"});
        r.string(s, "kind", where, c.scorer.kind);
        r.unsigned_integer(s, "seed", where, c.scorer.seed);
        std::uint64_t dim = c.scorer.embedding_dim;
        r.unsigned_integer(s, "embedding_dim", where, dim);
        c.scorer.embedding_dim = static_cast<std::size_t>(dim);
        r.string(s, "path", where, c.scorer.path);
        r.string(s, "device", where, c.scorer.device);
        r.string_list(s, "command", where, c.scorer.command);
    }
    if (r.object(doc, "denoiser", "")) {
        const auto& d = doc.at("denoiser");
        const std::string where = "denoiser.";
        r.allow_keys(d, where, {"kind", "path", "device", "command", "height"});
        r.string(d, "kind", where, c.denoiser.kind);
        r.string(d, "path", where, c.denoiser.path);
        r.string(d, "device", where, c.denoiser.device);
        r.string_list(d, "command", where, c.denoiser.command);
        if (d.contains("height") && !d.at("height").is_null()) {
            int h = 0;
            r.integer(d, "height", where, h);
            c.denoiser.height = h;
        }
    }
}

/// "kind" or "kind:path".
std::pair<std::string, std::string> split_selection(const std::string& value) {
    const auto colon = value.find(':');
    if (colon == std::string::npos) return {value, {}};
    return {value.substr(0, colon), value.substr(colon + 1)};
}

void apply_overrides(GenerationConfig& c, const ConfigOverrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.temperature) c.temperature = *o.temperature;
    if (o.width) c.width = *o.width;
    if (o.height) c.height = *o.height;
    if (o.fps) c.fps = *o.fps;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.scorer) {
        auto [kind, path] = split_selection(*o.scorer);
        c.scorer.kind = kind;
        if (!path.empty()) c.scorer.path = path;
    }
    if (o.denoiser) {
        auto [kind, path] = split_selection(*o.denoiser);
        c.denoiser.kind = kind;
        if (!path.empty()) c.denoiser.path = path;
    }
}

void print_report(std::ostream& out, const VideoManifest& manifest) {
    const ThroughputReport r = measure_throughput(manifest);
    out << std::fixed << std::setprecision(3);
    out << "frames: " << r.frames << "  status: " << manifest.status << "\n";
    out << "throughput: " << r.fps << " fps (optimization only), " << r.fps_inclusive
        << " fps (including post-processing and I/O)\n";
    out << "wall time: " << r.total_wall_seconds << " s total, " << r.optimization_seconds << " s optimizing\n";
    out << "scorer share: " << 100.0 * r.scorer_fraction << "%  pipeline overhead: " << 100.0 * r.overhead_fraction
        << "%\n";
    out << "encode with: " << manifest.encoder_command << "\n";
    out.unsetf(std::ios::floatfield);
}

}  // namespace

ParsedConfig parse_config_json(const nlohmann::json& document, const ConfigOverrides& overrides) {
    SchemaReader reader;
    ParsedConfig parsed;
    read_document(reader, document, parsed.config);
    apply_overrides(parsed.config, overrides);
    for (auto& issue : parsed.config.validation_issues()) {
        // Schema problems already reported for prompts would repeat here.
        if (std::find(reader.issues.begin(), reader.issues.end(), issue) == reader.issues.end()) {
            reader.issues.push_back(std::move(issue));
        }
    }
    if (!reader.issues.empty()) {
        throw SchemaError(std::move(reader.issues));
    }
    if (parsed.config.height > 720) {
        parsed.warnings.push_back("height " + std::to_string(parsed.config.height) +
                                  " exceeds 720 pixels; expect noisy, sparse frames and slow steps");
    }
    return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    if (!std::filesystem::exists(path)) {
        throw SchemaError({"config: file not found: " + path.string()});
    }
    json document;
    try {
        document = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError({std::string("config: not valid JSON: ") + e.what()});
    }
    return parse_config_json(document, overrides);
}

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    ParsedConfig parsed;
    try {
        parsed = parse_config(inv.config_path, inv.overrides);
    } catch (const SchemaError& e) {
        err << e.what() << "\n";
        return 2;
    }
    for (const auto& w : parsed.warnings) {
        err << "warning: " << w << "\n";
    }
    const GenerationConfig& config = parsed.config;

    if (inv.subcommand == Subcommand::validate) {
        const auto layout = build_layout(config.track);
        out << "config ok: " << config.track.size() << " prompt(s), " << layout.total_frames << " frames, "
            << config.width << "x" << config.height << " at " << config.fps << " fps, temperature "
            << config.temperature << "\n";
        return 0;
    }

    ScorerHandle scorer;
    DenoiserHandle denoiser;
    try {
        scorer = make_scorer(config.scorer);
        denoiser = make_denoiser(config.denoiser);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }

    ProgressSink progress;
    if (!inv.quiet) {
        progress = [&out](const ProgressEvent& ev) {
            out << "frame " << std::setw(5) << ev.frame_index + 1 << "/" << ev.total_frames << "  loss "
                << std::fixed << std::setprecision(4) << ev.initial_loss << " -> " << ev.final_loss << "  "
                << std::setprecision(1) << ev.elapsed_seconds << " s\n";
            out.unsetf(std::ios::floatfield);
            out.flush();
        };
    }
    RunControl control;
    control.stop_after_frames = inv.stop_after;

    try {
        VideoManifest manifest;
        if (inv.subcommand == Subcommand::resume) {
            const auto path = config.output_dir / "checkpoint.bin";
            if (!std::filesystem::exists(path)) {
                err << "error: no checkpoint at " << path.string() << "\n";
                return 2;
            }
            manifest = resume(read_checkpoint(path), config, *scorer, *denoiser, progress, control);
        } else {
            manifest = generate(config, *scorer, *denoiser, progress, control);
        }
        print_report(out, manifest);
    } catch (const GenerationError& e) {
        err << "error: generation aborted at frame " << e.frame_index() << ": " << e.what() << "\n"
            << "checkpoint kept in " << config.output_dir.string() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

std::variant<CliInvocation, int> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                                    std::ostream& err) {
    CliInvocation inv;
    CLI::App app{"Sequential text-to-video generation by pixel-space guidance"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file")->required();
    app.add_option("--out", inv.overrides.output_dir, "output directory");
    app.add_option("--seed", inv.overrides.seed, "master seed");
    app.add_option("--temperature", inv.overrides.temperature, "0 (steady) to 100 (restless)");
    app.add_option("--width", inv.overrides.width, "frame width in pixels");
    app.add_option("--height", inv.overrides.height, "frame height in pixels");
    app.add_option("--fps", inv.overrides.fps, "playback frame rate recorded in the manifest");
    app.add_option("--scorer", inv.overrides.scorer, "surrogate | external:<weights>");
    app.add_option("--denoiser", inv.overrides.denoiser, "identity | external:<weights>");
    bool resume_flag = false;
    bool validate_flag = false;
    app.add_flag("--resume", resume_flag, "continue from <out>/checkpoint.bin");
    app.add_flag("--validate-only", validate_flag, "check the config and exit without writing anything");
    app.add_option("--stop-after", inv.stop_after, "stop after N frames, keeping the checkpoint");
    app.add_flag("-q,--quiet", inv.quiet, "no per-frame progress lines");

    auto* gen_cmd = app.add_subcommand("generate", "run a fresh generation (default)");
    auto* resume_cmd = app.add_subcommand("resume", "continue an interrupted run");
    auto* validate_cmd = app.add_subcommand("validate", "validate the config only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    (void)gen_cmd;
    inv.config_path = config_path;
    if (resume_flag && validate_flag) {
        err << "--resume and --validate-only are mutually exclusive\n";
        return 2;
    }
    if (validate_flag || validate_cmd->parsed()) {
        inv.subcommand = Subcommand::validate;
    } else if (resume_flag || resume_cmd->parsed()) {
        inv.subcommand = Subcommand::resume;
    }
    return inv;
}

}  // namespace t2v
