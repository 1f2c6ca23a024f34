#pragma once

#include <filesystem>
#include <string>

#include "datacopy/geometry.hpp"

namespace datacopy {

// Point files: one point per line, comma-separated decimal fields, an
// optional single leading header line starting with '#'. Values are written
// with 17 significant digits, so writer output parses back bit-exactly.
PointSet read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, const PointSet& points,
                      bool header = true);

// FNV-1a digest of a file's bytes, for reproducibility records in reports.
std::string file_digest(const std::filesystem::path& path);

}  // namespace datacopy
