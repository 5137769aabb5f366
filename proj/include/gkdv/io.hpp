#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkdv/signal.hpp"

namespace gkdv::io {

/// %.17g; enough digits to round-trip any double.
std::string format_number(double x);

/// Minimal CSV writer: one header row, then rows of pre-formatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::vector<std::string> row_;
};

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Columns amp_re, amp_im, freq, degree.
void write_signal_csv(const std::filesystem::path& path, const ExponentialSignal& s);
ExponentialSignal read_signal_csv(const std::filesystem::path& path);

}  // namespace gkdv::io
