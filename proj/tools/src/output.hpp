#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "riddled/basin.hpp"

namespace riddled::cli {

/// Shortest text with 17 significant digits, '.' decimal point regardless of
/// locale; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

/// Accumulates a CSV document in memory.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header);

  Csv& cell(double v);
  Csv& cell(long long v);
  Csv& cell(const std::string& v);
  Csv& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  Csv& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

  const std::string& str() const noexcept { return text_; }

 private:
  void sep();
  std::string text_;
  bool row_open_ = false;
};

/// 8-bit binary PGM: header "P5 nx ny 255\n", one byte per cell, first image
/// row = grid row j = 0. CPlus is black (0), CMinus white (255), Unresolved
/// mid-gray (128).
std::string pgm_bytes(const GridResult& grid);

/// Label matrix CSV: one row per y, first column y, then one column per x.
std::string label_matrix_csv(const GridResult& grid);

std::string sha256_hex(const std::string& bytes);

/// Collects output files, writes them single-threaded and records their
/// content hashes for the manifest.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  void add(const std::string& name, std::string bytes);
  void add_json(const std::string& name, const nlohmann::json& j);

  /// Writes every file plus manifest.json (which lists the others with their
  /// SHA-256). The manifest holds no timing, so identical runs give identical
  /// bytes.
  void write(const nlohmann::json& manifest_body) const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump_json(const nlohmann::json& j);

}  // namespace riddled::cli
