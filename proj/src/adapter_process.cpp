// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/adapter_process.hpp"

#include <cerrno>
#include <cstring>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "t2v/error.hpp"

extern char** environ;

namespace t2v {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

void MessageChannel::write_all(const void* data, std::size_t size) {
    const char* p = static_cast<const char*>(data);
    while (size > 0) {
        const ssize_t n = ::send(mWriteFd, p, size, MSG_NOSIGNAL);
        if (n < 0 && errno == ENOTSOCK) {
            const ssize_t m = ::write(mWriteFd, p, size);
            if (m < 0) {
                if (errno == EINTR) continue;
                throw AdapterError(errno_text("adapter write failed"));
            }
            p += m;
            size -= static_cast<std::size_t>(m);
            continue;
        }
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AdapterError(errno_text("adapter write failed"));
        }
        p += n;
        size -= static_cast<std::size_t>(n);
    }
}

void MessageChannel::read_exact(void* data, std::size_t size) {
    char* p = static_cast<char*>(data);
    const std::size_t buffered = std::min(size, mBuffer.size() - mBufferPos);
    std::memcpy(p, mBuffer.data() + mBufferPos, buffered);
    mBufferPos += buffered;
    p += buffered;
    size -= buffered;
    while (size > 0) {
        const ssize_t n = ::read(mReadFd, p, size);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AdapterError(errno_text("adapter read failed"));
        }
        if (n == 0) {
            throw AdapterError("adapter closed the stream mid-payload");
        }
        p += n;
        size -= static_cast<std::size_t>(n);
    }
}

std::string MessageChannel::read_line() {
    std::string line;
    while (true) {
        for (; mBufferPos < mBuffer.size(); ++mBufferPos) {
            const char ch = mBuffer[mBufferPos];
            if (ch == '\n') {
                ++mBufferPos;
                return line;
            }
            line.push_back(ch);
        }
        mBuffer.resize(64 * 1024);
        mBufferPos = 0;
        ssize_t n;
        do {
            n = ::read(mReadFd, mBuffer.data(), mBuffer.size());
        } while (n < 0 && errno == EINTR);
        if (n <= 0) {
            mBuffer.clear();
            throw AdapterError(n == 0 ? "adapter closed the stream" : errno_text("adapter read failed"));
        }
        mBuffer.resize(static_cast<std::size_t>(n));
    }
}

void MessageChannel::send(nlohmann::json header, const std::vector<double>& payload) {
    header["payload"] = payload.size();
    std::string line = header.dump();
    line.push_back('\n');
    write_all(line.data(), line.size());
    if (!payload.empty()) {
        write_all(payload.data(), payload.size() * sizeof(double));
    }
}

AdapterMessage MessageChannel::receive() {
    AdapterMessage msg;
    const std::string line = read_line();
    try {
        msg.header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw AdapterError(std::string("adapter sent a malformed header: ") + e.what());
    }
    if (!msg.header.is_object()) {
        throw AdapterError("adapter header is not a JSON object");
    }
    const std::size_t count = msg.header.value("payload", std::size_t{0});
    msg.payload.resize(count);
    if (count > 0) {
        read_exact(msg.payload.data(), count * sizeof(double));
    }
    return msg;
}

AdapterProcess::AdapterProcess(std::vector<std::string> argv) {
    if (argv.empty()) {
        throw ConfigError("adapter command is empty");
    }
    for (const auto& arg : argv) {
        if (!mCommandLine.empty()) mCommandLine.push_back(' ');
        mCommandLine += arg;
    }

    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        throw ConfigError(errno_text("socketpair"));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (auto& arg : argv) cargv.push_back(arg.data());
    cargv.push_back(nullptr);

    const int rc = ::posix_spawnp(&mPid, cargv[0], &actions, nullptr, cargv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
        ::close(fds[0]);
        throw ConfigError("failed to launch adapter '" + mCommandLine + "': " + std::strerror(rc));
    }
    mSocket = fds[0];
    mChannel = std::make_unique<MessageChannel>(mSocket, mSocket);
}

AdapterProcess::~AdapterProcess() {
    if (mSocket >= 0) {
        ::shutdown(mSocket, SHUT_RDWR);
        ::close(mSocket);
    }
    if (mPid > 0) {
        int status = 0;
        while (::waitpid(mPid, &status, 0) < 0 && errno == EINTR) {
        }
    }
}

AdapterMessage AdapterProcess::call(const nlohmann::json& header, const std::vector<double>& payload) {
    AdapterMessage reply;
    try {
        mChannel->send(header, payload);
        reply = mChannel->receive();
    } catch (const AdapterError& e) {
        throw AdapterError(std::string(e.what()) + " (adapter: " + mCommandLine + "; see its stderr)");
    }
    if (!reply.header.value("ok", false)) {
        throw AdapterError("adapter '" + mCommandLine + "' reported: " +
                           reply.header.value("error", std::string("unknown error")));
    }
    return reply;
}

}  // namespace t2v
