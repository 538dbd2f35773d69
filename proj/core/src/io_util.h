// Internal file helpers shared by the serializers.

#ifndef POPGEN_SRC_IO_UTIL_H
#define POPGEN_SRC_IO_UTIL_H

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "popgen/error.h"

namespace popgen::detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace popgen::detail

#endif  // POPGEN_SRC_IO_UTIL_H
