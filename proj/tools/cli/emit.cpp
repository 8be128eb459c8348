#include "emit.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace smdkit::cli {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  std::filesystem::path dir;
  if (!flag_value.empty()) {
    dir = flag_value;
  } else if (const char* env = std::getenv("SMDKIT_OUT_DIR"); env && *env) {
    dir = env;
  } else {
    dir = "runs";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

CsvFile::CsvFile(const std::filesystem::path& path,
                 const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns)
    : path_(path), out_(path), width_(columns.size()) {
  if (!out_) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& line : comments) out_ << "# " << line << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << "\n";
}

void CsvFile::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw std::logic_error("csv row width mismatch in " + path_.string());
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out_ << (i ? "," : "") << cells[i];
  }
  out_ << "\n";
  if (!out_) throw std::runtime_error("write failed on " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed on " + path.string());
}

}  // namespace smdkit::cli
