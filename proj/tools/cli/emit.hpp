#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace smdkit::cli {

/* Doubles are printed with %.12g everywhere a file is written, so reruns with
 * the same config and seeds reproduce outputs byte for byte. */
std::string num(double v);

/* Output directory: the --out flag when given, else $SMDKIT_OUT_DIR, else
 * ./runs. Created on first use. */
std::filesystem::path resolve_out_dir(const std::string& flag_value);

/* CSV with leading "#" comment lines (each bound column names the formula it
 * is computed from there), then one header row. row() enforces the column
 * count. */
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path,
          const std::vector<std::string>& comments,
          const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace smdkit::cli
