// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Wire protocol shared by the external scorer and denoiser adapters.
//
// Every message is one line of UTF-8 JSON terminated by '\n', optionally
// followed by a binary payload of little-endian float64 values. The header
// field "payload" gives the payload length in values (absent means zero).
// Replies carry "ok": true, or "ok": false plus an "error" string.

#pragma once

#include <memory>
#include <string>
#include <sys/types.h>
#include <vector>

#include <json.hpp>

namespace t2v {

struct AdapterMessage {
    nlohmann::json header;
    std::vector<double> payload;
};

/// Framed message stream over a pair of file descriptors. Does not own them.
class MessageChannel {
public:
    MessageChannel(int read_fd, int write_fd) : mReadFd(read_fd), mWriteFd(write_fd) {}

    void send(nlohmann::json header, const std::vector<double>& payload = {});
    /// Throws AdapterError on EOF or malformed framing.
    AdapterMessage receive();

private:
    void write_all(const void* data, std::size_t size);
    void read_exact(void* data, std::size_t size);
    std::string read_line();

    int mReadFd;
    int mWriteFd;
    std::vector<char> mBuffer;
    std::size_t mBufferPos = 0;
};

/// Child process speaking the adapter protocol on its stdin/stdout.
/// stderr is inherited so adapter diagnostics reach the user.
class AdapterProcess {
public:
    explicit AdapterProcess(std::vector<std::string> argv);
    ~AdapterProcess();

    AdapterProcess(const AdapterProcess&) = delete;
    AdapterProcess& operator=(const AdapterProcess&) = delete;

    /// Sends a request and returns the reply; throws AdapterError when the
    /// reply is {"ok": false} or the child went away.
    AdapterMessage call(const nlohmann::json& header, const std::vector<double>& payload = {});

    const std::string& command_line() const noexcept { return mCommandLine; }

private:
    std::string mCommandLine;
    pid_t mPid = -1;
    int mSocket = -1;
    std::unique_ptr<MessageChannel> mChannel;
};

}  // namespace t2v
