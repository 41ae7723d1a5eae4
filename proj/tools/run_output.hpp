#pragma once

// Output plumbing for the command-line front-end: CSV text, companion
// gnuplot scripts and run manifests, all written atomically once a command
// has finished computing.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "bacc/error.hpp"

namespace cli {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits: round-trips every double.
inline std::string num(double v) { return fmt::format("{:.17g}", v); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { row_strings(std::move(header)); }

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> r{cell(cells)...};
    bacc::require(r.size() == columns_, bacc::errc::invalid_parameter, "CSV row width mismatch");
    row_strings(std::move(r));
  }

  [[nodiscard]] const std::string& text() const noexcept { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(std::string_view v) { return std::string(v); }

  void row_strings(std::vector<std::string> r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) text_ += ',';
      text_ += r[i];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

/// Writes to a sibling temp file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw bacc::error(bacc::errc::io_failure, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw bacc::error(bacc::errc::io_failure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct Plot {
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  /// gnuplot `plot` arguments; {csv} is replaced by the CSV file name.
  std::string plot;
};

inline std::string gnuplot_script(const std::filesystem::path& csv, const Plot& p) {
  std::string body = p.plot;
  const std::string name = csv.filename().string();
  for (std::size_t at = body.find("{csv}"); at != std::string::npos; at = body.find("{csv}", at + name.size()))
    body.replace(at, 5, name);
  std::string s;
  s += "set datafile separator ','\n";
  s += fmt::format("set xlabel '{}'\nset ylabel '{}'\n", p.xlabel, p.ylabel);
  if (p.log_y) s += "set logscale y\n";
  s += "set key top left\n";
  s += "plot " + body + "\n";
  return s;
}

/// Collects what a command produced; nothing touches the disk until commit().
class Run {
 public:
  Run(std::string command, nlohmann::ordered_json config, std::uint64_t seed)
      : command_(std::move(command)), config_(std::move(config)), seed_(seed),
        start_(std::chrono::steady_clock::now()) {}

  void add_csv(std::filesystem::path path, std::string text, Plot plot) {
    files_.push_back({path, std::move(text)});
    auto gp = path;
    gp.replace_extension(".gp");
    files_.push_back({gp, gnuplot_script(path, plot)});
    csv_ = path;
  }

  void add_file(std::filesystem::path path, std::string text) { files_.push_back({std::move(path), std::move(text)}); }

  void commit() {
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["config"] = config_;
    m["master_seed"] = seed_;
    m["library_version"] = kVersion;
    m["outputs"] = nlohmann::ordered_json::array();
    for (const auto& f : files_) m["outputs"].push_back(f.first.string());
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    for (const auto& [path, text] : files_) write_atomic(path, text);
    if (!csv_.empty()) {
      auto manifest = csv_;
      manifest.replace_extension(".manifest.json");
      write_atomic(manifest, m.dump(2) + "\n");
    }
  }

 private:
  std::string command_;
  nlohmann::ordered_json config_;
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
  std::filesystem::path csv_;
};

}  // namespace cli
