// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace endd::io {

std::string read_file(const std::filesystem::path& path);

/// Writes `contents`, creating parent directories. Throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Strict parse of a full token as double; throws ParseError.
double parse_double(std::string_view token);

} // namespace endd::io
