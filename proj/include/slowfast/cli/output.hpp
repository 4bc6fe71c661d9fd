#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>
#include <unistd.h>

#include "slowfast/cli/config.hpp"
#include "slowfast/error.hpp"

namespace slowfast::cli {

namespace fs = std::filesystem;

/// Comma-separated rows with a header; numbers use the shortest round-trip
/// decimal form so reruns are byte-identical.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
  }

  CsvTable& row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw Error(ErrorKind::InvalidParameter, "CSV row has " + std::to_string(cells.size()) +
                                                   " cells, expected " + std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    return *this;
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  std::size_t columns_;
  std::ostringstream out_;
};

inline std::string cell(double v) { return detail::fmt(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::string_view v) { return std::string(v); }

/// Writes through a temporary file in the same directory and renames it into
/// place, so the final name only ever holds complete content.
inline void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& produce) {
  const fs::path tmp = path.parent_path() /
                       (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    produce(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::IoError, "write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename " + tmp.string() + " to " + path.string());
  }
}

inline void atomic_write(const fs::path& path, std::string_view content) {
  atomic_write(path, [&](std::ostream& o) { o.write(content.data(), std::ssize(content)); });
}

[[nodiscard]] inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoError, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

[[nodiscard]] inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace slowfast::cli
