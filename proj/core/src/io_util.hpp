#pragma once

// Private text/file helpers shared by the readers and writers in core.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace invcol::detail {

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: parent directories are created first.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n', stripping a trailing '\r'. A final empty line is not reported.
std::vector<std::string_view> lines(std::string_view text);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Fixed-precision decimal formatting, locale independent.
std::string format_fixed(double value, int precision = 6);

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out);

}  // namespace invcol::detail
