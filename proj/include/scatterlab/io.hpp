#pragma once

#include <string>
#include <vector>

namespace scatterlab::io {

/// Writes `content` to a sibling temp file, flushes, then renames over `path`.
/// A reader never sees a half-written file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

/// Shortest decimal that round-trips the double ("%.17g").
std::string fmt(double v);

/// One CSV row from doubles, joined with commas, newline-terminated.
std::string csv_row(const std::vector<double>& v);

/// Hex FNV-1a 64 of a byte string; used as the config hash in manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace scatterlab::io
