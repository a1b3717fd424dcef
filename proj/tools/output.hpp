#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dsp::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

/// 17 significant digits, so every double round-trips.
std::string format_double(double v);
/// RFC 4180 quoting when the field needs it.
std::string csv_field(const std::string& s);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

/// Collects the files of one run and writes the manifest at the end.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<Cell>>& rows);
  void write_text(const std::string& name, const std::string& text);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

}  // namespace dsp::cli
