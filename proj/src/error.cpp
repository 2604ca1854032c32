// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/error.hpp"

namespace t2v {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration (" + std::to_string(issues.size()) + " issue" +
                      (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& issue : issues) {
        out += "\n  - " + issue;
    }
    return out;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> issues) : Error(join_issues(issues)), mIssues(std::move(issues)) {}

}  // namespace t2v
