// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstring>

#include "t2v/error.hpp"
#include "t2v/io.hpp"
#include "t2v/pipeline.hpp"

namespace t2v {

std::string frame_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05zu.png", index);
    return buf;
}

std::vector<std::string> VideoManifest::content_hashes() const {
    std::vector<std::string> out;
    out.reserve(frames.size() * 2);
    for (const auto& f : frames) {
        out.push_back(f.raw.sha256);
        out.push_back(f.post.sha256);
    }
    return out;
}

nlohmann::json manifest_to_json(const VideoManifest& m) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : m.frames) {
        nlohmann::json prompts = nlohmann::json::array();
        for (const auto& [index, weight] : f.prompts) {
            prompts.push_back({{"index", index}, {"weight", weight}});
        }
        frames.push_back({
            {"index", f.index},
            {"prompts", prompts},
            {"iterations", f.iterations},
            {"initial_loss", f.initial_loss},
            {"final_loss", f.final_loss},
            {"seconds", f.seconds},
            {"scorer_seconds", f.scorer_seconds},
            {"postprocess_seconds", f.postprocess_seconds},
            {"raw", {{"path", f.raw.path}, {"sha256", f.raw.sha256}}},
            {"post", {{"path", f.post.path}, {"sha256", f.post.sha256}}},
        });
    }
    nlohmann::json j = {
        {"format", "t2v-manifest/1"},
        {"status", m.status},
        {"config", m.config},
        {"config_hash", m.config_hash},
        {"scorer", m.scorer},
        {"denoiser", m.denoiser},
        {"frames", frames},
        {"timing",
         {{"total_wall_seconds", m.total_wall_seconds},
          {"optimization_seconds", m.optimization_seconds},
          {"scorer_seconds", m.scorer_seconds},
          {"postprocess_seconds", m.postprocess_seconds},
          {"measured_fps", m.measured_fps}}},
        {"encoder", {{"command", m.encoder_command}}},
    };
    if (!m.error.empty()) {
        j["error"] = m.error;
    }
    return j;
}

VideoManifest manifest_from_json(const nlohmann::json& j) {
    try {
        VideoManifest m;
        m.status = j.at("status").get<std::string>();
        m.error = j.value("error", std::string{});
        m.config = j.at("config");
        m.config_hash = j.at("config_hash").get<std::string>();
        m.scorer = j.value("scorer", std::string{});
        m.denoiser = j.value("denoiser", std::string{});
        for (const auto& fj : j.at("frames")) {
            FrameRecord f;
            f.index = fj.at("index").get<std::size_t>();
            for (const auto& p : fj.at("prompts")) {
                f.prompts.emplace_back(p.at("index").get<std::size_t>(), p.at("weight").get<double>());
            }
            f.iterations = fj.at("iterations").get<int>();
            f.initial_loss = fj.at("initial_loss").get<double>();
            f.final_loss = fj.at("final_loss").get<double>();
            f.seconds = fj.at("seconds").get<double>();
            f.scorer_seconds = fj.at("scorer_seconds").get<double>();
            f.postprocess_seconds = fj.at("postprocess_seconds").get<double>();
            f.raw = {fj.at("raw").at("path").get<std::string>(), fj.at("raw").at("sha256").get<std::string>()};
            f.post = {fj.at("post").at("path").get<std::string>(), fj.at("post").at("sha256").get<std::string>()};
            m.frames.push_back(std::move(f));
        }
        const auto& t = j.at("timing");
        m.total_wall_seconds = t.at("total_wall_seconds").get<double>();
        m.optimization_seconds = t.at("optimization_seconds").get<double>();
        m.scorer_seconds = t.at("scorer_seconds").get<double>();
        m.postprocess_seconds = t.at("postprocess_seconds").get<double>();
        m.measured_fps = t.at("measured_fps").get<double>();
        m.encoder_command = j.at("encoder").at("command").get<std::string>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
}

VideoManifest read_manifest(const std::filesystem::path& path) {
    try {
        return manifest_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
}

// Checkpoint layout (little-endian):
//   "T2VCKPT1" | u32 version | str config_hash | u64 next_index | u64 frame index
//   | i32 height | i32 width | f64[h*w*3] pixels | u32 n | n x (str purpose, str state)
// where str is u32 length followed by bytes.

namespace {

constexpr char kMagic[8] = {'T', '2', 'V', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    template <typename T>
    void put(T value) {
        const auto* p = reinterpret_cast<const char*>(&value);
        mOut.append(p, sizeof(T));
    }
    void put_string(const std::string& s) {
        put(static_cast<std::uint32_t>(s.size()));
        mOut.append(s);
    }
    void put_bytes(const void* data, std::size_t size) { mOut.append(static_cast<const char*>(data), size); }
    std::string take() { return std::move(mOut); }

private:
    std::string mOut;
};

class Reader {
public:
    explicit Reader(std::string_view in) : mIn(in) {}
    template <typename T>
    T get() {
        T value;
        get_bytes(&value, sizeof(T));
        return value;
    }
    std::string get_string() {
        const auto size = get<std::uint32_t>();
        need(size);
        std::string s(mIn.substr(mPos, size));
        mPos += size;
        return s;
    }
    void get_bytes(void* data, std::size_t size) {
        need(size);
        std::memcpy(data, mIn.data() + mPos, size);
        mPos += size;
    }
    bool at_end() const { return mPos == mIn.size(); }

private:
    void need(std::size_t size) const {
        if (mIn.size() - mPos < size) {
            throw ValidationError("checkpoint is truncated");
        }
    }
    std::string_view mIn;
    std::size_t mPos = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
    Writer w;
    w.put_bytes(kMagic, sizeof(kMagic));
    w.put(kVersion);
    w.put_string(c.config_hash);
    w.put(static_cast<std::uint64_t>(c.next_index));
    w.put(static_cast<std::uint64_t>(c.last_raw.index));
    w.put(static_cast<std::int32_t>(c.last_raw.pixels.height()));
    w.put(static_cast<std::int32_t>(c.last_raw.pixels.width()));
    auto px = c.last_raw.pixels.values();
    w.put_bytes(px.data(), px.size() * sizeof(double));
    w.put(static_cast<std::uint32_t>(c.rng_states.size()));
    for (const auto& [purpose, state] : c.rng_states) {
        w.put_string(purpose);
        w.put_string(state);
    }
    return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    char magic[8];
    r.get_bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ValidationError("not a checkpoint file");
    }
    if (r.get<std::uint32_t>() != kVersion) {
        throw ValidationError("unsupported checkpoint version");
    }
    Checkpoint c;
    c.config_hash = r.get_string();
    c.next_index = static_cast<std::size_t>(r.get<std::uint64_t>());
    c.last_raw.index = static_cast<std::size_t>(r.get<std::uint64_t>());
    const auto h = r.get<std::int32_t>();
    const auto w = r.get<std::int32_t>();
    if (h < 0 || w < 0) {
        throw ValidationError("checkpoint has negative frame dimensions");
    }
    c.last_raw.pixels = Image(h, w);
    auto px = c.last_raw.pixels.values();
    r.get_bytes(px.data(), px.size() * sizeof(double));
    const auto n = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string purpose = r.get_string();
        std::string state = r.get_string();
        c.rng_states.emplace_back(std::move(purpose), std::move(state));
    }
    if (!r.at_end()) {
        throw ValidationError("checkpoint has trailing bytes");
    }
    return c;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    return deserialize_checkpoint(read_file(path));
}

}  // namespace t2v
