#include "gkdv/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace gkdv::io {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  row_.assign(header.begin(), header.end());
  end_row();
}

CsvWriter& CsvWriter::cell(double x) {
  row_.push_back(format_number(x));
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  row_.push_back(std::to_string(x));
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  row_.push_back(s);
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != columns_) throw std::logic_error("CSV row width does not match header");
  for (std::size_t i = 0; i < row_.size(); ++i) out_ << (i ? "," : "") << row_[i];
  out_ << '\n';
  row_.clear();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

void write_signal_csv(const std::filesystem::path& path, const ExponentialSignal& s) {
  CsvWriter csv(path, {"amp_re", "amp_im", "freq", "degree"});
  for (const ExpTerm& t : s.terms()) {
    csv.cell(t.amplitude.real()).cell(t.amplitude.imag()).cell(t.frequency).cell(t.degree);
    csv.end_row();
  }
}

ExponentialSignal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  ExponentialSignal s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string re, im, freq, deg;
    std::getline(row, re, ',');
    std::getline(row, im, ',');
    std::getline(row, freq, ',');
    std::getline(row, deg, ',');
    s.add({{std::stod(re), std::stod(im)}, std::stod(freq), std::stoi(deg)});
  }
  return s;
}

}  // namespace gkdv::io
