#include "datacopy/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "datacopy/errors.hpp"

namespace datacopy {

PointSet read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open point file " + path.string());

  PointSet out;
  std::string line;
  long line_no = 0;
  std::vector<double> coords;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && !line.empty() && line[0] == '#') continue;
    if (line.empty()) continue;

    coords.clear();
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected a decimal field, got '" + std::string(p) + "'",
                         line_no);
      }
      coords.push_back(v);
      p = end;
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == ',') {
        ++p;
        continue;
      }
      if (*p == '\0' || *p == '\r') break;
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": unexpected trailing characters '" + std::string(p) + "'",
                       line_no);
    }
    if (out.dim() != 0 && static_cast<int>(coords.size()) != out.dim()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(out.dim()) + " fields, got " +
                           std::to_string(coords.size()),
                       line_no);
    }
    out.push_back(coords);
  }
  return out;
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points, bool header) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  if (header) {
    out << "# points n=" << points.size() << " d=" << points.dim() << "\n";
  }
  char buf[40];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
  return hex;
}

}  // namespace datacopy
