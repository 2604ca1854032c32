// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "t2v/cli.hpp"

int main(int argc, char** argv) {
    auto parsed = t2v::parse_command_line(argc, argv, std::cout, std::cerr);
    if (const int* status = std::get_if<int>(&parsed)) {
        return *status;
    }
    return t2v::run(std::get<t2v::CliInvocation>(parsed), std::cout, std::cerr);
}
